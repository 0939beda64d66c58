"""Peres lattices: per-eigenstate expectation values against scaled energy.

Ordered lattice patterns signal integrable dynamics, scattered ones chaos.
Only eigenstates passing the truncation filter enter a lattice, since
spurious truncation states would fill it with artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .eigensolve import SpectrumResult
from .errors import BasisMismatch, MissingVectors
from .integrable import cdagc_operator
from .model import ModelParams, SymmetricOperator, spin_jx_matrix


@dataclass(frozen=True)
class PeresPoint:
    """One lattice point: eigenstate index, scaled energy, expectation value.

    The value is carried raw and in the two common scalings (1/j, 1/j^2) so
    downstream plotting never has to guess a convention.
    """

    k: int
    epsilon: float
    value: float
    value_over_j: float
    value_over_j2: float
    dominance: str | None = None


def _converged_slice(result: SpectrumResult) -> int:
    if result.vectors is None:
        raise MissingVectors("Peres lattices need eigenvectors")
    return result.dim if result.converged_count is None else result.converged_count


def peres_lattice(result: SpectrumResult, op: SymmetricOperator) -> list[PeresPoint]:
    """Expectation lattice <E_k|op|E_k> vs epsilon = E_k/j, converged states only."""
    if op.sector is not result.sector or op.states != result.states:
        raise BasisMismatch("operator and spectrum use different bases")
    k_max = _converged_slice(result)
    j = result.params.j
    v = result.vectors[:, :k_max]
    values = np.sum(v * (op.matrix @ v), axis=0)
    return [
        PeresPoint(k, float(result.energies[k]) / j, float(val), float(val) / j, float(val) / j**2)
        for k, val in enumerate(values)
    ]


def _full_grid(result: SpectrumResult, columns: np.ndarray) -> np.ndarray:
    """Scatter eigenvector columns onto the (n, m_z) grid, zero off-sector."""
    params = result.params
    grid = np.zeros((params.n_max + 1, params.two_j + 1, columns.shape[1]))
    ns = np.fromiter((s.n for s in result.states), dtype=np.int64)
    cols = np.fromiter(
        ((s.two_mz + params.two_j) // 2 for s in result.states), dtype=np.int64
    )
    grid[ns, cols, :] = columns
    return grid


def cdagc_lattice(result: SpectrumResult, params: ModelParams | None = None) -> list[PeresPoint]:
    """Lattice of the transformed number operator c'c.

    The Bogoliubov frame is defined per fixed-m_x block, so for each
    eigenstate the squeezing parameter is evaluated at that state's own Jx
    expectation (a declared convention; exact for omega0 = 0 product
    eigenstates, where <Jx> = m_x).
    """
    params = result.params if params is None else params
    params.require_normal_phase()
    k_max = _converged_slice(result)
    grid = _full_grid(result, result.vectors[:, :k_max])
    jx_spin = spin_jx_matrix(params.two_j)

    # bosonic reduced density: diagonal and the two-photon off-diagonal
    rho_diag = np.einsum("nmk,nmk->nk", grid, grid)
    rho_off2 = np.einsum("nmk,nmk->nk", grid[:-2], grid[2:])
    # <Jx> per state from the spin reduced density
    spin_rho = np.einsum("nak,nbk->abk", grid, grid)
    jx_mean = np.einsum("ab,abk->k", jx_spin, spin_rho)

    n = np.arange(params.n_max + 1, dtype=float)
    a2 = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
    j = params.j
    points = []
    for k in range(k_max):
        lam = 2.0 * params.gamma * jx_mean[k] / (params.omega * params.two_j)
        omega_mx = params.omega * np.sqrt(1.0 - 4.0 * lam * lam)
        sigma = 0.0 if lam == 0.0 else (omega_mx / params.omega - 1.0) / (2.0 * lam)
        denom = 1.0 - sigma * sigma
        diag = ((1.0 + sigma * sigma) * n + sigma * sigma) / denom
        val = float(diag @ rho_diag[:, k] - 2.0 * sigma / denom * (a2 @ rho_off2[:, k]))
        points.append(
            PeresPoint(k, float(result.energies[k]) / j, val, val / j, val / j**2)
        )
    return points


def dominance_classify(
    result: SpectrumResult, threshold: float = 0.0
) -> list[str]:
    """Label converged eigenstates 'z' or 'x' by their dominant product basis.

    The metric is the largest single-component probability in the (n, m_z)
    basis versus the (n, m_x) basis (spin factor rotated by the orthogonal
    Jx eigenbasis); ties within ``threshold`` go to 'z'.
    """
    k_max = _converged_slice(result)
    grid = _full_grid(result, result.vectors[:, :k_max])
    _, rot = scipy.linalg.eigh(spin_jx_matrix(result.params.two_j))
    labels = []
    for k in range(k_max):
        c = grid[:, :, k]
        max_z = float(np.max(c * c))
        cx = c @ rot
        max_x = float(np.max(cx * cx))
        labels.append("x" if max_x > max_z + threshold else "z")
    return labels
