"""
Optimal transport maps on the line and between Gaussians.

On the line the optimal map for any convex cost is the monotone
rearrangement ``x -> F_target^{-1}(F_source(x))``. Between Gaussians it is
affine, ``x -> mu1 + A (x - mu0)`` with ``A`` the unique SPD solution of
``A S0 A = S1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__
from .divergence import GaussianParams
from .empirical import EmpiricalDistribution, build_ecdf
from .errors import DimError, ValidationError
from .linalg import matrix_inv_sqrt, matrix_sqrt

__all__ = [
    "TransportMap",
    "AffineMap",
    "fit_monotone_map",
    "apply_map",
    "fit_gaussian_map",
    "matrix_sqrt",
]


@dataclass(frozen=True)
class TransportMap:
    """Monotone rearrangement from ``source`` onto ``target``.

    Inputs below (above) the source support map to the target minimum
    (maximum).
    """

    source: EmpiricalDistribution
    target: EmpiricalDistribution

    def __call__(self, x):
        return self.target.quantile(self.source.cdf(x))

    def to_dict(self) -> dict:
        return {
            "kind": "monotone_map",
            "version": __version__,
            "direction": "source->target",
            "source": self.source.values.tolist(),
            "target": self.target.values.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TransportMap":
        if doc.get("kind") != "monotone_map":
            raise ValidationError(f"not a monotone map document (kind={doc.get('kind')!r})")
        return cls(build_ecdf(doc["source"]), build_ecdf(doc["target"]))


def fit_monotone_map(source, target) -> TransportMap:
    if not isinstance(source, EmpiricalDistribution):
        source = build_ecdf(source)
    if not isinstance(target, EmpiricalDistribution):
        target = build_ecdf(target)
    return TransportMap(source, target)


def apply_map(tmap: TransportMap, x):
    return tmap(x)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``x -> target_mean + A (x - source_mean)``."""

    source_mean: np.ndarray
    target_mean: np.ndarray
    A: np.ndarray

    @property
    def shift(self) -> np.ndarray:
        return self.target_mean - self.A @ self.source_mean

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.A.shape == (1, 1) and x.ndim <= 1:
            out = self.target_mean[0] + self.A[0, 0] * (x - self.source_mean[0])
            return float(out) if out.ndim == 0 else out
        # rows are points
        return self.target_mean + (x - self.source_mean) @ self.A.T


def fit_gaussian_map(g0: GaussianParams, g1: GaussianParams) -> AffineMap:
    """Optimal affine map pushing N(mu0, S0) onto N(mu1, S1).

    ``A = S0^{-1/2} (S0^{1/2} S1 S0^{1/2})^{1/2} S0^{-1/2}``. ``S0`` must be
    strictly positive definite (condition number at most 1e12); a singular
    source raises :class:`SingularSourceError`.
    """
    if g0.dim != g1.dim:
        raise DimError(f"dimension mismatch: {g0.dim} vs {g1.dim}")
    r0_inv = matrix_inv_sqrt(g0.cov, "source covariance")
    if g0.dim == 1:
        A = np.array([[g1.std / g0.std]])
    else:
        r0 = matrix_sqrt(g0.cov)
        A = r0_inv @ matrix_sqrt(r0 @ g1.cov @ r0) @ r0_inv
        A = 0.5 * (A + A.T)
    return AffineMap(g0.mean.copy(), g1.mean.copy(), A)
