"""
Discrimination mitigation.

Two post-processing transforms for group-conditional scores:

* proportional scaling, ``m*(x, s) = E[m] / E[m | s] * m(x, s)``, which
  equalizes group means only;
* the fair barycenter score, which sends every score to the Wasserstein
  barycenter of the group distributions,
  ``m*(x, s) = sum_g w_g F_g^{-1}(F_s(x))`` with ``w_g`` the share of group
  ``g`` and the own-group term equal to ``x`` itself.

Also the Gaussian W2 barycenter, found by fixed-point iteration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .divergence import GaussianParams
from .empirical import EmpiricalDistribution, GroupedScores, build_ecdf, partition_by_group
from .errors import (
    ClampWarning,
    ConvergenceError,
    DegenerateGroupError,
    DimError,
    NothingToMitigate,
    UnknownGroupError,
    ValidationError,
)
from .linalg import matrix_inv_sqrt, matrix_sqrt

__all__ = [
    "ScalingTransform",
    "BarycenterTransform",
    "fit_scaling",
    "apply_scaling",
    "fit_barycenter",
    "apply_barycenter",
    "gaussian_barycenter",
    "transform_from_dict",
]

SINGLE_GROUP_WARNING = "single group"


@dataclass(frozen=True)
class ScalingTransform:
    """Per-group multiplicative factors ``overall_mean / group_mean``."""

    factors: dict
    overall_mean: float | None = None
    group_means: dict | None = None
    column: str = "score"

    @property
    def labels(self) -> list[str]:
        return list(self.factors)

    def factor(self, group: str) -> float:
        try:
            return self.factors[group]
        except KeyError:
            raise UnknownGroupError(f"group {group!r} is not known to the scaling transform") from None

    def apply(self, scores, groups, clip: bool = True):
        """Scale a batch; returns ``(scaled, n_clamped)``."""
        factors = np.array([self.factor(g) for g in groups], dtype=float)
        out = np.asarray(scores, dtype=float) * factors
        if not clip:
            return out, 0
        clamped = (out < 0.0) | (out > 1.0)
        return np.clip(out, 0.0, 1.0), int(clamped.sum())

    def to_dict(self) -> dict:
        doc = {"kind": "scaling", "version": __version__, "column": self.column}
        if self.overall_mean is not None:
            doc["overall_mean"] = self.overall_mean
        if self.group_means is not None:
            doc["group_means"] = dict(self.group_means)
        doc["factors"] = dict(self.factors)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ScalingTransform":
        factors = {str(g): float(f) for g, f in doc["factors"].items()}
        if any(not (f > 0 and math.isfinite(f)) for f in factors.values()):
            raise ValidationError("scaling factors must be positive and finite")
        return cls(factors, doc.get("overall_mean"), doc.get("group_means"), doc.get("column", "score"))


def fit_scaling(data: GroupedScores, column: str = "score") -> ScalingTransform:
    overall = math.fsum(data.scores) / len(data)
    means = {g: math.fsum(s) / s.size for g, s in data.group_scores().items()}
    for g, m in means.items():
        if m <= 0.0:
            raise DegenerateGroupError(f"group {g!r} has mean score 0; cannot rescale")
    factors = {g: overall / m for g, m in means.items()}
    return ScalingTransform(factors, overall, means, column)


def apply_scaling(t: ScalingTransform, score: float, group: str, clip: bool = True) -> float:
    """``factor_g * score``; values leaving ``[0, 1]`` are clamped with a :class:`ClampWarning`."""
    out = t.factor(group) * score
    if clip and not 0.0 <= out <= 1.0:
        warnings.warn(f"scaled score {out!r} for group {group!r} clamped to [0, 1]", ClampWarning, stacklevel=2)
        out = min(max(out, 0.0), 1.0)
    return out


@dataclass(frozen=True)
class BarycenterTransform:
    """Fitted group distributions and weights for the fair barycenter score.

    With a single group the transform is the identity and ``warning`` is set.
    """

    distributions: dict
    weights: dict
    column: str = "score"
    warning: str | None = None
    labels: list = field(init=False)

    def __post_init__(self):
        labels = list(self.distributions)
        if set(labels) != set(self.weights):
            raise ValidationError("weights and distributions must cover the same groups")
        if abs(math.fsum(self.weights.values()) - 1.0) > 1e-12:
            raise ValidationError("group weights must sum to 1")
        object.__setattr__(self, "labels", labels)

    def counterparts(self, score, group: str) -> dict:
        """Quantile counterparts of ``score`` in every group, own group = ``score``."""
        try:
            own = self.distributions[group]
        except KeyError:
            raise UnknownGroupError(f"group {group!r} is not known to the barycenter transform") from None
        u = own.cdf(score)
        return {
            g: (np.asarray(score, dtype=float) if g == group else self.distributions[g].quantile(u))
            for g in self.labels
        }

    def apply_group(self, scores, group: str) -> np.ndarray:
        """Fair scores for a batch of scores all belonging to ``group``."""
        parts = self.counterparts(np.asarray(scores, dtype=float), group)
        out = np.zeros(np.shape(scores))
        # fixed label order: identical rank pairs give bitwise identical sums across groups
        for g in self.labels:
            out = out + self.weights[g] * parts[g]
        return out

    def apply(self, scores, groups) -> np.ndarray:
        scores = np.asarray(scores, dtype=float)
        groups = np.asarray(groups, dtype=object)
        out = np.empty_like(scores)
        for g in dict.fromkeys(groups.tolist()):
            mask = groups == g
            out[mask] = self.apply_group(scores[mask], g)
        return out

    def to_dict(self) -> dict:
        doc = {
            "kind": "barycenter",
            "version": __version__,
            "column": self.column,
            "groups": list(self.labels),
            "weights": {g: self.weights[g] for g in self.labels},
            "distributions": {g: self.distributions[g].values.tolist() for g in self.labels},
        }
        if self.warning:
            doc["warning"] = self.warning
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "BarycenterTransform":
        labels = [str(g) for g in doc["groups"]]
        dists = {g: build_ecdf(doc["distributions"][g]) for g in labels}
        weights = {g: float(doc["weights"][g]) for g in labels}
        return cls(dists, weights, doc.get("column", "score"), doc.get("warning"))


def fit_barycenter(data: GroupedScores, column: str = "score") -> BarycenterTransform:
    dists, weights = partition_by_group(data)
    warning = None
    if len(dists) < 2:
        warning = SINGLE_GROUP_WARNING
        warnings.warn("only one group present; the barycenter transform is the identity",
                      NothingToMitigate, stacklevel=2)
    return BarycenterTransform(dists, weights, column, warning)


def apply_barycenter(t: BarycenterTransform, score: float, group: str) -> float:
    return float(t.apply_group(score, group))


def transform_from_dict(doc: dict):
    """Rebuild a scaling or barycenter transform from its JSON document."""
    kind = doc.get("kind")
    if kind == "scaling":
        return ScalingTransform.from_dict(doc)
    if kind == "barycenter":
        return BarycenterTransform.from_dict(doc)
    raise ValidationError(f"unknown transform kind {kind!r}")


def gaussian_barycenter(params, weights, tol: float = 1e-8, max_iter: int = 500, full_output: bool = False):
    """W2 barycenter of Gaussians.

    The mean is the weighted mean. The covariance ``S`` solves
    ``S = sum_i w_i (S^{1/2} S_i S^{1/2})^{1/2}``; starting from
    ``sum_i w_i S_i`` we iterate
    ``S <- S^{-1/2} (sum_i w_i (S^{1/2} S_i S^{1/2})^{1/2})^2 S^{-1/2}``
    until the Frobenius residual of the fixed-point equation is ``<= tol``.

    Parameters
    ----------
    params : sequence of GaussianParams
    weights : sequence of float
        Positive, summing to 1.
    tol : float
    max_iter : int
    full_output : bool
        Also return ``{"iterations": ..., "residual": ...}``.

    Raises
    ------
    ConvergenceError
        If the residual is still above ``tol`` after ``max_iter`` iterations.
    """
    params = list(params)
    w = np.asarray(weights, dtype=float).ravel()
    if not params or w.size != len(params):
        raise ValidationError("need one weight per Gaussian")
    if np.any(w <= 0) or abs(math.fsum(w) - 1.0) > 1e-9:
        raise ValidationError("weights must be positive and sum to 1")
    d = params[0].dim
    if any(p.dim != d for p in params):
        raise DimError("all Gaussians must have the same dimension")
    for p in params:
        matrix_inv_sqrt(p.cov, "covariance")

    mean = sum(wi * p.mean for wi, p in zip(w, params))
    S = sum(wi * p.cov for wi, p in zip(w, params))
    residual = math.inf
    for it in range(max_iter + 1):
        R = matrix_sqrt(S)
        T = sum(wi * matrix_sqrt(R @ p.cov @ R) for wi, p in zip(w, params))
        residual = float(np.linalg.norm(S - T, "fro"))
        if residual <= tol:
            out = GaussianParams(mean, S)
            return (out, {"iterations": it, "residual": residual}) if full_output else out
        if it == max_iter:
            break
        R_inv = matrix_inv_sqrt(S)
        S = R_inv @ T @ T @ R_inv
        S = 0.5 * (S + S.T)
    raise ConvergenceError("Gaussian barycenter fixed point did not converge", residual, max_iter)
