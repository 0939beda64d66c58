"""Dense diagonalization of sector matrices and the truncation-convergence filter.

Truncating the Fock space at n_max produces spurious high-lying solutions.
An eigenstate counts as converged when the probability of occupying the two
highest photon levels, P(n_max) + P(n_max - 1), stays below a tolerance
delta; scanning in ascending energy, the first violator caps the converged
set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import MissingVectors, NumericalFailure
from .model import BasisState, ModelParams, ParitySector, SymmetricOperator, hamiltonian

# Tail weight P(n_max) + P(n_max - 1) below which an eigenstate counts as
# converged.  The resulting eigenvalue error tracks ~delta/2, so 1e-9 keeps
# converged levels stable to well below 1e-8 under further truncation growth.
DEFAULT_DELTA = 1e-9


@dataclass
class SpectrumResult:
    """Eigendecomposition of one sector (or full-basis) matrix.

    ``energies`` ascend; ``vectors`` holds eigenvectors as columns in the
    order of ``states`` (None when only energies were kept).
    ``converged_count`` is the number of leading eigenstates passing the
    truncation filter, or None if the filter has not been applied.
    """

    energies: np.ndarray
    vectors: np.ndarray | None
    states: list[BasisState]
    sector: ParitySector | None
    params: ModelParams
    converged_count: int | None = None

    @property
    def dim(self) -> int:
        return len(self.energies)

    def converged_energies(self) -> np.ndarray:
        k = self.dim if self.converged_count is None else self.converged_count
        return self.energies[:k]


@dataclass
class PhotonDistribution:
    """Probability P_n of finding n photons in one eigenstate."""

    probs: np.ndarray


def diagonalize(op: SymmetricOperator, vectors: bool = True) -> SpectrumResult:
    """Full symmetric eigendecomposition, energies ascending.

    Eigenvector signs are fixed by making the largest-magnitude coefficient
    positive, so repeated runs dump identical vectors.
    """
    if not np.all(np.isfinite(op.matrix)):
        raise NumericalFailure("matrix contains non-finite entries")
    try:
        if vectors:
            energies, vecs = scipy.linalg.eigh(op.matrix, driver="evd", check_finite=False)
        else:
            energies = scipy.linalg.eigh(
                op.matrix, eigvals_only=True, driver="ev", check_finite=False
            )
            vecs = None
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailure(f"symmetric eigensolver did not converge: {exc}") from exc
    if vecs is not None:
        flip = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(vecs.shape[1])] < 0
        vecs[:, flip] *= -1.0
    return SpectrumResult(energies, vecs, op.states, op.sector, op.params)


def photon_distribution(result: SpectrumResult, k: int) -> PhotonDistribution:
    """P_n = sum_{m_z} |c_{n,m_z}|^2 for eigenstate k."""
    if result.vectors is None:
        raise MissingVectors("photon distribution needs eigenvectors")
    ns = np.fromiter((s.n for s in result.states), dtype=np.int64, count=len(result.states))
    probs = np.zeros(result.params.n_max + 1)
    np.add.at(probs, ns, result.vectors[:, k] ** 2)
    return PhotonDistribution(probs)


def truncation_tail(result: SpectrumResult) -> np.ndarray:
    """P(n_max) + P(n_max - 1) for every eigenstate, in energy order."""
    if result.vectors is None:
        raise MissingVectors("truncation tail needs eigenvectors")
    n_max = result.params.n_max
    rows = [i for i, s in enumerate(result.states) if s.n >= n_max - 1]
    return np.sum(result.vectors[rows, :] ** 2, axis=0)


def converged_count(result: SpectrumResult, delta: float = DEFAULT_DELTA) -> int:
    """Index of the lowest-energy eigenstate violating the tail criterion.

    All eigenstates below the returned index pass P(n_max) + P(n_max-1) <= delta;
    the scan runs in ascending energy and stops at the first violation even if
    later states would pass.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    tail = truncation_tail(result)
    bad = np.nonzero(tail > delta)[0]
    return int(bad[0]) if bad.size else result.dim


def solve_sector(
    params: ModelParams,
    sector: ParitySector | None,
    delta: float = DEFAULT_DELTA,
    vectors: bool = True,
) -> SpectrumResult:
    """Assemble, diagonalize, and convergence-filter one sector in one call."""
    result = diagonalize(hamiltonian(params, sector), vectors=vectors)
    if vectors:
        result.converged_count = converged_count(result, delta)
    return result


def solve_all_sectors(
    params: ModelParams, delta: float = DEFAULT_DELTA
) -> dict[ParitySector, SpectrumResult]:
    """Diagonalize all four parity sectors (independent, order fixed by enum)."""
    return {sec: solve_sector(params, sec, delta) for sec in ParitySector}


def converged_union(results: list[SpectrumResult]) -> np.ndarray:
    """Merged converged spectrum of several sectors, cut at a common energy.

    Each sector's converged set reaches a different top energy; keeping only
    levels below the lowest of those tops makes the union a gap-free head of
    the true spectrum, safe for level-by-level comparison.
    """
    tops = []
    pieces = []
    for result in results:
        e = result.converged_energies()
        if e.size == 0:
            return np.empty(0)
        pieces.append(e)
        tops.append(e[-1])
    cut = min(tops)
    return np.sort(np.concatenate([e[e <= cut] for e in pieces]))
