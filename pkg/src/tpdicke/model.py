"""Product basis, parity sectors, and operator matrices for the two-photon Dicke model.

The Hamiltonian is

    H = omega * a'a + omega0 * Jz + (gamma / N) * (a'^2 + a^2) * (J+ + J-),

acting on the product of a truncated Fock space (n = 0..n_max) and a
collective spin-j space, with N = 2j atoms.  Spin quantum numbers are kept
as doubled integers (two_j = 2j, two_mz = 2*m_z) so half-integer j is exact.

The generalized excitation number Lambda = a'a/2 + Jz + j generates a parity
symmetry with eigenvalues p in {+1, +i, -1, -i}; the Hamiltonian never
couples different parity classes, so matrices can be assembled restricted to
one sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, SectorMismatch, SpectralCollapse

OBSERVABLE_NAMES = ("number", "jz", "jx", "jx2", "j2")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters (omega, omega0, gamma, j, n_max) of one model instance.

    Parameters
    ----------
    omega : float
        Field frequency (energy units), > 0.
    omega0 : float
        Atomic level splitting (energy units).
    gamma : float
        Atom-photon coupling strength (energy units), >= 0.
    two_j : int
        Doubled collective spin 2j, >= 1.  The number of atoms is N = 2j.
    n_max : int
        Photon-number truncation, >= 2.
    """

    omega: float
    omega0: float
    gamma: float
    two_j: int
    n_max: int

    def __post_init__(self):
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ConfigError(f"omega must be positive and finite, got {self.omega}")
        if not np.isfinite(self.omega0):
            raise ConfigError(f"omega0 must be finite, got {self.omega0}")
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0 and finite, got {self.gamma}")
        if int(self.two_j) != self.two_j or self.two_j < 1:
            raise ConfigError(f"two_j must be an integer >= 1, got {self.two_j}")
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ConfigError(f"n_max must be an integer >= 2, got {self.n_max}")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def n_atoms(self) -> int:
        """Number of atoms N = 2j."""
        return self.two_j

    @property
    def dim(self) -> int:
        """Full product-basis dimension (n_max+1)(2j+1)."""
        return (self.n_max + 1) * (self.two_j + 1)

    @property
    def gamma_collapse(self) -> float:
        """Spectral-collapse threshold omega/2 (smallest over all m_x blocks)."""
        return self.omega / 2.0

    def require_normal_phase(self):
        """Raise SpectralCollapse unless gamma < omega/2."""
        if self.gamma >= self.gamma_collapse:
            raise SpectralCollapse(
                f"gamma={self.gamma} is at or beyond the collapse threshold "
                f"omega/2={self.gamma_collapse}",
                gamma_threshold=self.gamma_collapse,
            )


class BasisState(NamedTuple):
    """One product-basis label |n; j, m_z> with the spin projection doubled."""

    n: int
    two_mz: int

    @property
    def m_z(self) -> float:
        return self.two_mz / 2.0


class ParitySector(Enum):
    """Parity class of the generalized excitation number Lambda = a'a/2 + Jz + j.

    The residue (n + 2*m_z + 2j) mod 4 is the enum value; the parity
    eigenvalue is i**residue.  The residue -> label assignment is a fixed
    convention; the physics depends only on the partition.
    """

    PLUS_ONE = 0
    PLUS_I = 1
    MINUS_ONE = 2
    MINUS_I = 3

    @property
    def residue(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return {0: "+1", 1: "+i", 2: "-1", 3: "-i"}[self.value]

    @classmethod
    def from_name(cls, name: str) -> "ParitySector":
        key = name.strip().lower()
        table = {
            "plus1": cls.PLUS_ONE, "+1": cls.PLUS_ONE,
            "plusi": cls.PLUS_I, "+i": cls.PLUS_I,
            "minus1": cls.MINUS_ONE, "-1": cls.MINUS_ONE,
            "minusi": cls.MINUS_I, "-i": cls.MINUS_I,
        }
        if key not in table:
            raise ConfigError(f"unknown parity sector {name!r}")
        return table[key]


def build_basis(params: ModelParams) -> list[BasisState]:
    """Enumerate the product basis, n outer and m_z inner, both ascending."""
    return [
        BasisState(n, two_mz)
        for n in range(params.n_max + 1)
        for two_mz in range(-params.two_j, params.two_j + 1, 2)
    ]


def parity_class(state: BasisState, params: ModelParams) -> ParitySector:
    """Parity sector of a basis state, from (n + 2*m_z + 2j) mod 4."""
    return ParitySector((state.n + state.two_mz + params.two_j) % 4)


def sector_states(params: ModelParams, sector: ParitySector) -> list[BasisState]:
    """Sector-restricted basis, in the same lexicographic order as build_basis."""
    return [s for s in build_basis(params) if parity_class(s, params) is sector]


@dataclass
class SymmetricOperator:
    """A real symmetric matrix together with the basis it is expressed in.

    ``sector`` is None for the full product basis; ``states`` lists the
    basis labels in row/column order.
    """

    matrix: np.ndarray
    states: list[BasisState]
    sector: ParitySector | None
    params: ModelParams

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def same_basis(self, other: "SymmetricOperator") -> bool:
        return self.sector is other.sector and self.states == other.states


def _state_arrays(states):
    ns = np.fromiter((s.n for s in states), dtype=np.int64, count=len(states))
    tz = np.fromiter((s.two_mz for s in states), dtype=np.int64, count=len(states))
    return ns, tz


def _position_table(params, states):
    """Lookup (n, m_z column) -> index into ``states``, or -1 if absent."""
    pos = np.full((params.n_max + 1, params.two_j + 1), -1, dtype=np.int64)
    ns, tz = _state_arrays(states)
    pos[ns, (tz + params.two_j) // 2] = np.arange(len(states))
    return pos, ns, tz


def _a_factor(n):
    """A_n = sqrt((n+1)(n+2)) for the two-photon ladder a^2 / a'^2."""
    return np.sqrt((n + 1.0) * (n + 2.0))


def _c_factor(two_j, two_mz, sign):
    """C^(+/-)_{m_z} = sqrt(j(j+1) - m_z(m_z +/- 1)), in doubled integers."""
    two_mz = np.asarray(two_mz, dtype=float)
    return 0.5 * np.sqrt(two_j * (two_j + 2.0) - two_mz * (two_mz + 2.0 * sign))


def _states_for(params, sector):
    if sector is None:
        return build_basis(params)
    return sector_states(params, sector)


def hamiltonian(params: ModelParams, sector: ParitySector | None = None) -> SymmetricOperator:
    """Assemble the Hamiltonian matrix, optionally restricted to one parity sector.

    Diagonal entries are omega*n + omega0*m_z; the two-photon coupling links
    (n, m_z) <-> (n+2, m_z +/- 1) with strength (gamma/N) * A_n * C^(+/-)_{m_z}.
    """
    states = _states_for(params, sector)
    pos, ns, tz = _position_table(params, states)
    d = len(states)
    h = np.zeros((d, d))
    idx = np.arange(d)
    h[idx, idx] = params.omega * ns + 0.5 * params.omega0 * tz

    coupling = params.gamma / params.n_atoms
    for sign in (+1, -1):
        src = (ns + 2 <= params.n_max) & (np.abs(tz + 2 * sign) <= params.two_j)
        if not np.any(src):
            continue
        tgt = pos[ns[src] + 2, (tz[src] + 2 * sign + params.two_j) // 2]
        # sector-restricted bases always contain the partner state (parity closure)
        val = coupling * _a_factor(ns[src]) * _c_factor(params.two_j, tz[src], sign)
        rows, cols = tgt, idx[src]
        h[rows, cols] = val
        h[cols, rows] = val
    return SymmetricOperator(h, states, sector, params)


def observable(
    params: ModelParams, which: str, sector: ParitySector | None = None
) -> SymmetricOperator:
    """Matrix of a named observable: 'number', 'jz', 'jx', 'jx2', or 'j2'.

    All except 'jx' are parity-diagonal and may be sector-restricted; 'jx'
    couples sectors and must be requested in the full basis.
    """
    if which not in OBSERVABLE_NAMES:
        raise ConfigError(f"unknown observable {which!r}; choose from {OBSERVABLE_NAMES}")
    if which == "jx" and sector is not None:
        raise SectorMismatch("Jx couples parity sectors; request it in the full basis")

    states = _states_for(params, sector)
    pos, ns, tz = _position_table(params, states)
    d = len(states)
    m = np.zeros((d, d))
    idx = np.arange(d)

    if which == "number":
        m[idx, idx] = ns
    elif which == "jz":
        m[idx, idx] = 0.5 * tz
    elif which == "j2":
        m[idx, idx] = 0.25 * params.two_j * (params.two_j + 2.0)
    elif which == "jx":
        src = tz + 2 <= params.two_j
        tgt = pos[ns[src], (tz[src] + 2 + params.two_j) // 2]
        val = 0.5 * _c_factor(params.two_j, tz[src], +1)
        m[tgt, idx[src]] = val
        m[idx[src], tgt] = val
    elif which == "jx2":
        # (Jx^2) diagonal (j(j+1) - m_z^2)/2; off-diagonal couples m_z <-> m_z + 2
        m[idx, idx] = 0.125 * (params.two_j * (params.two_j + 2.0) - tz.astype(float) ** 2)
        src = tz + 4 <= params.two_j
        tgt = pos[ns[src], (tz[src] + 4 + params.two_j) // 2]
        val = 0.25 * _c_factor(params.two_j, tz[src] + 2, +1) * _c_factor(
            params.two_j, tz[src], +1
        )
        m[tgt, idx[src]] = val
        m[idx[src], tgt] = val
    return SymmetricOperator(m, states, sector, params)


def perturbed_hamiltonian(params: ModelParams, epsilon: float) -> SymmetricOperator:
    """Full-basis Hamiltonian plus the parity-breaking term epsilon * Jx."""
    if not np.isfinite(epsilon):
        raise ConfigError(f"perturbation strength must be finite, got {epsilon}")
    h = hamiltonian(params, sector=None)
    jx = observable(params, "jx", sector=None)
    h.matrix += epsilon * jx.matrix
    return h


def spin_jx_matrix(two_j: int) -> np.ndarray:
    """Jx in the (2j+1)-dimensional spin space alone, m_z ascending."""
    dim = two_j + 1
    m = np.zeros((dim, dim))
    for col in range(dim - 1):
        two_mz = -two_j + 2 * col
        val = 0.5 * _c_factor(two_j, two_mz, +1)
        m[col + 1, col] = val
        m[col, col + 1] = val
    return m
