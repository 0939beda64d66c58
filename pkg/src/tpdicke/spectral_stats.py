"""Unfolding, spacing distributions, ratio statistics, and Anderson-Darling tests.

Unfolded spacings of chaotic spectra follow the Wigner-Dyson (GOE) surmise
P(s) = (pi/2) s exp(-pi s^2 / 4); uncorrelated (integrable) spectra follow
Poisson P(s) = exp(-s).  The scale-free spacing ratio
r_k = min(s_k, s_{k-1}) / max(s_k, s_{k-1}) averages to 4 - 2*sqrt(3) ~ 0.536
for GOE and 2*ln(2) - 1 ~ 0.386 for Poisson, and needs no unfolding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import TooFewLevels, TooFewSamples, ZeroSpacing
from .model import ModelParams

R_MEAN_GOE = 4.0 - 2.0 * np.sqrt(3.0)
R_MEAN_POISSON = 2.0 * np.log(2.0) - 1.0

DEFAULT_NU = 10
DEFAULT_WINDOW = 400
DEFAULT_STRIDE = 200
DEGENERACY_FACTOR = 1e-12

MODELS = ("goe", "poisson")


@dataclass
class SpacingSample:
    """Unfolded spacings plus the scaled-energy window they came from."""

    s: np.ndarray
    window_center: float
    window_width: float


@dataclass(frozen=True)
class RatioPoint:
    """Windowed mean spacing ratio at one scaled-energy center."""

    epsilon_center: float
    r_mean: float
    n_levels: int


def merge_degenerate(energies: np.ndarray, warn: bool = True) -> np.ndarray:
    """Collapse symmetry-induced degeneracies before spacing statistics.

    Levels closer than 1e-12 * max(1, spectral span) are merged to their
    first representative; the dropped count is reported as a warning.
    """
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < 2:
        return e
    tol = DEGENERACY_FACTOR * max(1.0, float(e[-1] - e[0]))
    keep = np.concatenate(([True], np.diff(e) > tol))
    dropped = int(e.size - np.count_nonzero(keep))
    if dropped and warn:
        warnings.warn(f"merged {dropped} degenerate level(s) before statistics")
    return e[keep]


def _local_mean_spacing(spacings: np.ndarray, nu: int) -> np.ndarray:
    """Mean over the (2 nu + 1)-spacing window centered at each index, edge-clipped."""
    n = spacings.size
    csum = np.concatenate(([0.0], np.cumsum(spacings)))
    k = np.arange(n)
    lo = np.maximum(0, k - nu)
    hi = np.minimum(n, k + nu + 1)
    return (csum[hi] - csum[lo]) / (hi - lo)


def unfold(energies: np.ndarray, nu: int = DEFAULT_NU, scale: float = 1.0) -> SpacingSample:
    """Unfold by local mean-spacing normalization: s_k = (E_{k+1}-E_k) / S(E_k).

    S(E_k) averages the raw spacings in a (2 nu + 1)-wide window around k,
    clipped at the spectrum edges.  ``scale`` (usually j) converts energies
    to the intensive shell variable for the window-center metadata.
    """
    e = merge_degenerate(energies)
    if e.size < 2 * nu + 2:
        raise TooFewLevels(f"unfolding needs >= {2 * nu + 2} levels, got {e.size}")
    d = np.diff(e)
    s = d / _local_mean_spacing(d, nu)
    return SpacingSample(s, float(np.mean(e)) / scale, float(np.std(e)) / scale)


def goe_pdf(s):
    """Wigner-Dyson surmise (pi/2) s exp(-pi s^2 / 4)."""
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s * s)


def poisson_pdf(s):
    """Poisson spacing density exp(-s)."""
    s = np.asarray(s, dtype=float)
    return np.exp(-s)


def goe_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-0.25 * np.pi * s * s)


def poisson_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-s)


_CDF = {"goe": goe_cdf, "poisson": poisson_cdf}
_PDF = {"goe": goe_pdf, "poisson": poisson_pdf}


def sample_spacings(model: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws from a reference spacing distribution."""
    u = rng.random(n)
    if model == "goe":
        return np.sqrt(-4.0 * np.log1p(-u) / np.pi)
    if model == "poisson":
        return -np.log1p(-u)
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")


def ratio_sequence(energies: np.ndarray) -> np.ndarray:
    """r_k = min(s_k, s_{k-1}) / max(s_k, s_{k-1}) on raw spacings.

    Ratios are scale-free, so no unfolding is applied.  A 0/0 from a
    consecutive degeneracy raises ZeroSpacing with the offending index.
    """
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < 3:
        raise TooFewLevels(f"ratio statistics need >= 3 levels, got {e.size}")
    d = np.diff(e)
    lo = np.minimum(d[:-1], d[1:])
    hi = np.maximum(d[:-1], d[1:])
    zero = hi == 0.0
    if np.any(zero):
        idx = int(np.nonzero(zero)[0][0])
        raise ZeroSpacing(
            f"consecutive degenerate levels at spacing index {idx} give r = 0/0; "
            "merge degeneracies first",
            index=idx,
        )
    return lo / hi


def windowed_mean_ratio(
    energies: np.ndarray,
    params: ModelParams,
    window_levels: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
) -> list[RatioPoint]:
    """Mean spacing ratio over sliding windows of consecutive levels.

    Degenerate levels are merged first; each full window of
    ``window_levels`` levels (advancing by ``stride``) yields one point at
    the window's mean scaled energy.
    """
    if window_levels < 50:
        raise TooFewLevels(f"window must hold >= 50 levels, got {window_levels}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    e = merge_degenerate(energies)
    if e.size < window_levels:
        raise TooFewLevels(
            f"spectrum has {e.size} usable levels, window needs {window_levels}"
        )
    points = []
    for start in range(0, e.size - window_levels + 1, stride):
        window = e[start : start + window_levels]
        r = ratio_sequence(window)
        points.append(
            RatioPoint(float(np.mean(window)) / params.j, float(np.mean(r)), window_levels)
        )
    return points


def average_ratio_curves(curves: list[list[RatioPoint]]) -> list[RatioPoint]:
    """Average several sector curves on a common scaled-energy grid.

    Each curve is interpolated onto a uniform grid spanning the overlap of
    all curves, then averaged pointwise; processing order cannot matter.
    """
    if not curves or any(len(c) < 2 for c in curves):
        raise TooFewLevels("averaging needs >= 2 points per curve")
    lo = max(c[0].epsilon_center for c in curves)
    hi = min(c[-1].epsilon_center for c in curves)
    if not lo < hi:
        raise TooFewLevels("sector curves do not overlap in energy")
    grid = np.linspace(lo, hi, max(len(c) for c in curves))
    stack = np.vstack(
        [
            np.interp(grid, [p.epsilon_center for p in c], [p.r_mean for p in c])
            for c in curves
        ]
    )
    # summing in sorted order makes the average exactly independent of the
    # sector processing order
    mean_r = np.sort(stack, axis=0).mean(axis=0)
    n_levels = sum(c[0].n_levels for c in curves)
    return [RatioPoint(float(x), float(r), n_levels) for x, r in zip(grid, mean_r)]


def anderson_darling(samples: np.ndarray, model: str) -> float:
    """A^2 statistic of the samples against a reference spacing CDF.

    Uses the standard order-statistic form with no small-sample correction;
    the working decision threshold is A^2 <= 2.5.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 20:
        raise TooFewSamples(f"Anderson-Darling needs >= 20 samples, got {n}")
    z = np.clip(_CDF[model](x), np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    i = np.arange(1, n + 1)
    return float(-n - np.sum((2 * i - 1) * (np.log(z) + np.log1p(-z[::-1]))) / n)


AD_THRESHOLD = 2.5


@dataclass
class SpacingHistogram:
    """Density-normalized spacing histogram with both model overlays."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    density: np.ndarray
    goe_pdf_mid: np.ndarray
    poisson_pdf_mid: np.ndarray
    clipped_fraction: float


def spacing_histogram(
    sample: SpacingSample, bins: int = 50, s_max: float = 4.0
) -> SpacingHistogram:
    """Histogram of unfolded spacings on [0, s_max], area normalized to 1."""
    s = np.asarray(sample.s, dtype=float)
    if s.size == 0:
        raise TooFewSamples("empty spacing sample")
    clipped = float(np.mean(s > s_max))
    if clipped > 0.01:
        warnings.warn(f"{100 * clipped:.1f}% of spacings exceed s_max={s_max} and are clipped")
    density, edges = np.histogram(s, bins=bins, range=(0.0, s_max), density=True)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return SpacingHistogram(
        edges[:-1], edges[1:], density, goe_pdf(mid), poisson_pdf(mid), clipped
    )
