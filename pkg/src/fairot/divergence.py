"""
Distances and divergences between score distributions.

Total variation, Kullback-Leibler and Jensen-Shannon operate on binned
(discrete) distributions sharing the same edges; logs are natural, so
KL and JS are in nats. Wasserstein distances are computed exactly from
the empirical quantile functions, or in closed form for Gaussians.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDistribution, build_ecdf
from .errors import BinRangeError, DimError, EdgeMismatch, EmptySample, MatrixError, SizeError, SupportError
from .linalg import PSD_TOL, SYM_TOL, as_square, matrix_sqrt

__all__ = [
    "BinnedDistribution",
    "GaussianParams",
    "default_edges",
    "bin_scores",
    "total_variation",
    "kl_divergence",
    "js_divergence",
    "wasserstein_empirical",
    "wasserstein_gaussian",
    "ot_cost_bruteforce",
]

KL_EPSILON = 1e-9
BRUTEFORCE_MAX_N = 8


@dataclass(frozen=True, eq=False)
class BinnedDistribution:
    edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float).ravel()
        masses = np.asarray(self.masses, dtype=float).ravel()
        if edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise BinRangeError("bin edges must be strictly increasing with at least two entries")
        if masses.size != edges.size - 1:
            raise BinRangeError(f"{masses.size} masses for {edges.size - 1} bins")
        if np.any(masses < 0) or abs(math.fsum(masses) - 1.0) > 1e-12:
            raise ValueError("masses must be non-negative and sum to 1")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "masses", masses)


def _check_edges(p: BinnedDistribution, q: BinnedDistribution):
    if not np.array_equal(p.edges, q.edges):
        raise EdgeMismatch("distributions are binned on different edges")


def default_edges(bins: int = 20) -> np.ndarray:
    """``bins`` equal-width bins over ``[0, 1]``."""
    if bins < 1:
        raise ValueError("need at least one bin")
    return np.linspace(0.0, 1.0, bins + 1)


def bin_scores(dist: EmpiricalDistribution, edges) -> BinnedDistribution:
    """Histogram of ``dist`` with bins ``(e_b, e_{b+1}]``; the first bin also holds ``e_0``."""
    edges = np.asarray(edges, dtype=float).ravel()
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise BinRangeError("bin edges must be strictly increasing with at least two entries")
    if dist.min < edges[0] or dist.max > edges[-1]:
        raise BinRangeError(
            f"sample range [{dist.min}, {dist.max}] is not covered by edges [{edges[0]}, {edges[-1]}]"
        )
    idx = np.searchsorted(edges, dist.values, side="left") - 1
    idx[idx < 0] = 0
    counts = np.bincount(idx, minlength=edges.size - 1)
    return BinnedDistribution(edges, counts / dist.n)


def total_variation(p: BinnedDistribution, q: BinnedDistribution, one_sided: bool = False) -> float:
    """Symmetric TV ``sum|p - q| / 2``, or the one-sided ``sum max(p - q, 0)``."""
    _check_edges(p, q)
    d = p.masses - q.masses
    if one_sided:
        return math.fsum(np.maximum(d, 0.0))
    return 0.5 * math.fsum(np.abs(d))


def _smooth(masses, eps):
    m = masses + eps
    return m / m.sum()


def kl_divergence(p: BinnedDistribution, q: BinnedDistribution, smoothing: bool = False,
                  epsilon: float = KL_EPSILON) -> float:
    """``KL(p || q)`` in nats, with ``0 log 0 = 0``.

    With ``smoothing`` every bin of both distributions receives ``epsilon``
    extra mass before renormalizing. Without it, a bin where ``q`` is empty
    but ``p`` is not raises :class:`SupportError`.
    """
    _check_edges(p, q)
    pm, qm = p.masses, q.masses
    if smoothing:
        pm, qm = _smooth(pm, epsilon), _smooth(qm, epsilon)
    return _kl(pm, qm)


def _kl(pm, qm):
    support = pm > 0
    if np.any(qm[support] <= 0):
        raise SupportError("q has zero mass on a bin where p is positive; KL is infinite")
    with np.errstate(over="ignore"):
        terms = pm[support] * np.log(pm[support] / qm[support])
    if not np.all(np.isfinite(terms)):
        raise SupportError("q mass is too small relative to p; KL overflows")
    return max(math.fsum(terms), 0.0)


def js_divergence(p: BinnedDistribution, q: BinnedDistribution) -> float:
    """Jensen-Shannon divergence in nats; bounded by ``ln 2``."""
    _check_edges(p, q)
    mid = 0.5 * (p.masses + q.masses)
    js = 0.5 * _kl(p.masses, mid) + 0.5 * _kl(q.masses, mid)
    return min(js, math.log(2.0))


def _power_mean(diffs, k) -> float:
    # fsum is order independent, so equal multisets of |differences| give identical results
    terms = [abs(d) ** k for d in diffs]
    return (math.fsum(terms) / len(terms)) ** (1.0 / k)


def _as_dist(x) -> EmpiricalDistribution:
    if isinstance(x, EmpiricalDistribution):
        return x
    return build_ecdf(x)


def wasserstein_empirical(x, y, k: int = 2) -> float:
    """Wasserstein-k distance between two empirical distributions on the line.

    Equal sizes use the order statistics directly. Otherwise the quantile
    difference is a step function on the merged grid ``{i/n_x} U {j/n_y}``
    and is integrated exactly, piece by piece.

    Parameters
    ----------
    x, y : EmpiricalDistribution or sequence of float
    k : int
        Order of the distance, ``k >= 1``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    try:
        x, y = _as_dist(x), _as_dist(y)
    except EmptySample:
        raise EmptySample("Wasserstein distance needs two non-empty samples") from None
    if x.n == y.n:
        return _power_mean((x.values - y.values).tolist(), k)
    grid = np.union1d(np.arange(1, x.n + 1) / x.n, np.arange(1, y.n + 1) / y.n)
    widths = np.diff(grid, prepend=0.0)
    # on (grid[j-1], grid[j]] both quantile functions equal their value at grid[j]
    gaps = np.abs(x.quantile(grid) - y.quantile(grid)) ** k
    return math.fsum(widths * gaps) ** (1.0 / k)


def ot_cost_bruteforce(x, y, k: int = 2) -> float:
    """Optimal transport cost by enumerating every permutation coupling.

    Only for tiny equal-size samples (``n <= 8``); this is a reference
    oracle for :func:`wasserstein_empirical`.
    """
    x = np.asarray(x, dtype=float).ravel().tolist()
    y = np.asarray(y, dtype=float).ravel().tolist()
    n = len(x)
    if n != len(y):
        raise SizeError(f"samples must have equal length, got {n} and {len(y)}")
    if n == 0:
        raise EmptySample("empty samples")
    if n > BRUTEFORCE_MAX_N:
        raise SizeError(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got {n}")
    return min(
        _power_mean([a - b for a, b in zip(x, perm)], k) for perm in itertools.permutations(y)
    )


@dataclass(frozen=True, eq=False)
class GaussianParams:
    """Mean vector and covariance matrix of a (possibly univariate) Gaussian.

    For ``d = 1`` pass scalars: ``GaussianParams(0.0, 4.0)`` is N(0, 4),
    i.e. variance 4 and standard deviation 2.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float)).ravel()
        cov = as_square(self.cov, "covariance")
        if cov.shape[0] != mean.size:
            raise DimError(f"mean has dimension {mean.size} but covariance is {cov.shape}")
        if np.max(np.abs(cov - cov.T), initial=0.0) > SYM_TOL:
            raise MatrixError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov)[0] < -PSD_TOL:
            raise MatrixError("covariance is not positive semi-definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def from_std(cls, mean: float, std: float) -> "GaussianParams":
        return cls(mean, std * std)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def std(self) -> float:
        """Standard deviation; univariate only."""
        if self.dim != 1:
            raise DimError("std is only defined for univariate parameters")
        return math.sqrt(max(self.cov[0, 0], 0.0))


def wasserstein_gaussian(g0: GaussianParams, g1: GaussianParams) -> float:
    """Closed-form W2 between two Gaussians.

    ``W2^2 = |mu1 - mu0|^2 + tr(S0 + S1 - 2 (S1^{1/2} S0 S1^{1/2})^{1/2})``,
    which in one dimension is ``(mu1 - mu0)^2 + (sigma1 - sigma0)^2``.
    """
    if g0.dim != g1.dim:
        raise DimError(f"dimension mismatch: {g0.dim} vs {g1.dim}")
    if g0.dim == 1:
        return math.hypot(g1.mean[0] - g0.mean[0], g1.std - g0.std)
    r1 = matrix_sqrt(g1.cov)
    cross = matrix_sqrt(r1 @ g0.cov @ r1)
    bures = np.trace(g0.cov) + np.trace(g1.cov) - 2.0 * np.trace(cross)
    dm = g1.mean - g0.mean
    return math.sqrt(max(float(dm @ dm) + bures, 0.0))
