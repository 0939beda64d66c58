"""Analytics of the omega0 = 0 limit.

With the atomic splitting switched off the Hamiltonian commutes with Jx and
splits into one quadratic bosonic block per spin projection m_x.  A
Bogoliubov rotation c = (a - sigma*a') / sqrt(1 - sigma^2) diagonalizes each
block into a harmonic ladder

    E(n_c, m_x) = Omega_mx * (n_c + 1/2) - omega/2,

with Omega_mx = omega * sqrt(1 - 4*lambda^2), lambda = 2*gamma*m_x/(omega*N).
The ladder collapses (Omega -> 0) when |lambda| reaches 1/2, which bounds the
coupling by gamma < j*omega / (2*|m_x|) per block and omega/2 overall.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectralCollapse, Unbounded
from .model import ModelParams

OVERLAY_POINTS = 512


@dataclass(frozen=True)
class BogoliubovData:
    """Bogoliubov parameters of one fixed-m_x block (doubled m_x kept exact)."""

    two_mx: int
    lam: float      # dimensionless coupling 2*gamma*m_x / (omega*N)
    omega_mx: float  # oscillator frequency omega*sqrt(1 - 4*lam^2)
    sigma: float     # squeezing parameter, positive root, sign opposite to lam


def bogoliubov(params: ModelParams, two_mx: int) -> BogoliubovData:
    """Bogoliubov data for the block with spin projection m_x = two_mx / 2.

    Raises SpectralCollapse when |lambda| >= 1/2, reporting the per-block
    threshold gamma = j*omega / (2*|m_x|).
    """
    if abs(two_mx) > params.two_j:
        raise ValueError(f"two_mx={two_mx} outside [-two_j, two_j]")
    lam = params.gamma * two_mx / (params.omega * params.two_j)
    if abs(lam) >= 0.5:
        threshold = gamma_collapse(params, two_mx)
        raise SpectralCollapse(
            f"|lambda|={abs(lam):.6g} >= 1/2 for two_mx={two_mx}; "
            f"coupling must stay below {threshold:.6g}",
            gamma_threshold=threshold,
        )
    omega_mx = params.omega * np.sqrt(1.0 - 4.0 * lam * lam)
    # positive root of the quadratic for sigma; continuous (-> 0) at lam = 0
    sigma = 0.0 if lam == 0.0 else (omega_mx / params.omega - 1.0) / (2.0 * lam)
    return BogoliubovData(two_mx, lam, omega_mx, sigma)


def gamma_collapse(params: ModelParams, two_mx: int) -> float:
    """Largest coupling the m_x block admits: j*omega / (2*|m_x|)."""
    if two_mx == 0:
        raise Unbounded("the m_x = 0 block never collapses")
    return params.two_j * params.omega / (2.0 * abs(two_mx))


def analytic_energy(params: ModelParams, n_c: int, two_mx: int) -> float:
    """Ladder energy Omega_mx * (n_c + 1/2) - omega/2."""
    if n_c < 0:
        raise ValueError(f"n_c must be >= 0, got {n_c}")
    data = bogoliubov(params, two_mx)
    return data.omega_mx * (n_c + 0.5) - 0.5 * params.omega


def analytic_spectrum(params: ModelParams, n_c_max: int) -> list[tuple[int, float, float]]:
    """All (n_c, m_x, E) triples with n_c <= n_c_max and m_x in {-j..j}.

    Requires the normal phase gamma < omega/2, where every block is below
    its collapse threshold.
    """
    params.require_normal_phase()
    out = []
    for two_mx in range(-params.two_j, params.two_j + 1, 2):
        omega_mx = bogoliubov(params, two_mx).omega_mx
        for n_c in range(n_c_max + 1):
            out.append((n_c, two_mx / 2.0, omega_mx * (n_c + 0.5) - 0.5 * params.omega))
    return out


def analytic_energies_sorted(params: ModelParams, e_max: float) -> np.ndarray:
    """Ascending multiset of all ladder energies up to e_max."""
    params.require_normal_phase()
    energies = []
    for two_mx in range(-params.two_j, params.two_j + 1, 2):
        omega_mx = bogoliubov(params, two_mx).omega_mx
        n_top = int(np.floor((e_max + 0.5 * params.omega) / omega_mx - 0.5))
        if n_top < 0:
            continue
        n_c = np.arange(n_top + 1)
        energies.append(omega_mx * (n_c + 0.5) - 0.5 * params.omega)
    if not energies:
        return np.empty(0)
    return np.sort(np.concatenate(energies))


def overlay_curves(
    params: ModelParams,
    n_c_values: list[int],
    variable: str = "mx",
    n_points: int = OVERLAY_POINTS,
) -> list[tuple[int, int, np.ndarray, np.ndarray]]:
    """Continuous-m_x overlay curves (one per n_c) for lattice plots.

    Returns tuples (curve_id, n_c, value, epsilon) where ``value`` is m_x
    (variable='mx') or m_x^2 ('mx2') swept over [-j, j], and epsilon = E/j.
    """
    if variable not in ("mx", "mx2"):
        raise ValueError(f"variable must be 'mx' or 'mx2', got {variable!r}")
    params.require_normal_phase()
    j = params.j
    mx = np.linspace(-j, j, n_points)
    lam = 2.0 * params.gamma * mx / (params.omega * params.two_j)
    omega_mx = params.omega * np.sqrt(1.0 - 4.0 * lam * lam)
    curves = []
    for curve_id, n_c in enumerate(n_c_values):
        energy = omega_mx * (n_c + 0.5) - 0.5 * params.omega
        value = mx if variable == "mx" else mx**2
        curves.append((curve_id, n_c, value, energy / j))
    return curves


def cdagc_operator(sigma: float, n_max: int) -> np.ndarray:
    """Matrix of c'c in the truncated Fock basis, for real squeezing sigma.

    From c = (a - sigma*a') / sqrt(1 - sigma^2):

        c'c = [(1 + sigma^2) a'a - sigma (a'^2 + a^2) + sigma^2] / (1 - sigma^2),

    i.e. diagonal [(1+sigma^2) n + sigma^2]/(1-sigma^2) and two-photon
    off-diagonals -sigma*sqrt((n+1)(n+2))/(1-sigma^2).
    """
    if not abs(sigma) < 1.0:
        raise ValueError(f"|sigma| must be < 1, got {sigma}")
    denom = 1.0 - sigma * sigma
    n = np.arange(n_max + 1, dtype=float)
    m = np.diag(((1.0 + sigma * sigma) * n + sigma * sigma) / denom)
    off = -sigma * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) / denom
    idx = np.arange(n_max - 1)
    m[idx, idx + 2] = off
    m[idx + 2, idx] = off
    return m


