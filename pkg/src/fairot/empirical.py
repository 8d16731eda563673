"""
Empirical score distributions.

An :class:`EmpiricalDistribution` is the plug-in measure of a sample: the
ECDF ``F(x) = #{x_i <= x} / n`` (right-continuous) and its generalized
inverse ``F^{-1}(u) = inf{x : F(x) >= u}``. There is no interpolation and
no smoothing; ties are kept as repeated values so a k-fold tie is a jump
of height k/n.

:class:`GroupedScores` is the record table (id, score, group, outcome)
that everything downstream consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, EmptySample, InvalidValue, ValidationError

__all__ = [
    "EmpiricalDistribution",
    "GroupedScores",
    "build_ecdf",
    "cdf_eval",
    "quantile",
    "partition_by_group",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted sample defining an ECDF and a step quantile function.

    Build instances with :func:`build_ecdf`; the constructor assumes
    ``values`` is already sorted and finite.
    """

    values: np.ndarray
    _levels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.values.shape[0]
        # (i + 1) / n, computed exactly like cdf() so that quantile(cdf(v)) hits v
        object.__setattr__(self, "_levels", _frozen(np.arange(1, n + 1) / n))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])

    def mean(self) -> float:
        return math.fsum(self.values) / self.n

    def cdf(self, x):
        """Fraction of sample values ``<= x``. Vectorized over ``x``."""
        counts = np.searchsorted(self.values, x, side="right")
        return counts / self.n

    def quantile(self, u):
        """Generalized inverse ``inf{x : F(x) >= u}``; ``u = 0`` gives the minimum.

        Vectorized over ``u``. Raises :class:`DomainError` if any ``u`` is
        outside ``[0, 1]``.
        """
        u_arr = np.asarray(u, dtype=float)
        if np.any(~((u_arr >= 0.0) & (u_arr <= 1.0))):
            raise DomainError(f"quantile level must lie in [0, 1], got {u!r}")
        idx = np.searchsorted(self._levels, u_arr, side="left")
        out = self.values[np.minimum(idx, self.n - 1)]
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        if not isinstance(other, EmpiricalDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def __len__(self):
        return self.n


def build_ecdf(samples: Iterable[float]) -> EmpiricalDistribution:
    """Sort ``samples`` (ties kept) into an :class:`EmpiricalDistribution`."""
    arr = np.array(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    arr = arr.ravel()
    if arr.size == 0:
        raise EmptySample("cannot build an empirical distribution from an empty sample")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise InvalidValue(f"non-finite sample value {arr[i]!r} at index {i}", index=i)
    return EmpiricalDistribution(_frozen(np.sort(arr, kind="stable")))


def cdf_eval(dist: EmpiricalDistribution, x: float) -> float:
    return float(dist.cdf(x))


def quantile(dist: EmpiricalDistribution, u: float) -> float:
    return dist.quantile(u)


@dataclass(frozen=True, eq=False)
class GroupedScores:
    """Per-record scores with a group label and an optional 0/1 outcome.

    Parameters
    ----------
    ids : sequence of str
        Unique record identifiers.
    scores : array-like of float
        Scores in ``[0, 1]``. Values outside are rejected, not clamped.
    groups : sequence of str
        Non-empty group labels.
    outcomes : array-like of {0, 1}, optional
        Observed outcomes, all present or absent.
    """

    ids: tuple
    scores: np.ndarray
    groups: tuple
    outcomes: np.ndarray | None = None

    def __init__(self, ids: Sequence[str], scores, groups: Sequence[str], outcomes=None):
        ids = tuple(str(i) for i in ids)
        groups = tuple(str(g) for g in groups)
        scores = np.array(scores, dtype=float).ravel()
        n = len(ids)
        if not (len(groups) == n == scores.shape[0]):
            raise ValidationError(
                f"length mismatch: {n} ids, {scores.shape[0]} scores, {len(groups)} groups"
            )
        if n == 0:
            raise EmptySample("score table has no records")
        bad = np.flatnonzero(~(np.isfinite(scores) & (scores >= 0.0) & (scores <= 1.0)))
        if bad.size:
            i = int(bad[0])
            raise InvalidValue(f"score {scores[i]!r} of record {ids[i]!r} is outside [0, 1]", index=i)
        for i, g in enumerate(groups):
            if not g:
                raise InvalidValue(f"record {ids[i]!r} has an empty group label", index=i)
        if len(set(ids)) != n:
            seen = set()
            for i, r in enumerate(ids):
                if r in seen:
                    raise InvalidValue(f"duplicate record id {r!r}", index=i)
                seen.add(r)
        if outcomes is not None:
            outcomes = np.array(outcomes, dtype=float).ravel()
            if outcomes.shape[0] != n:
                raise ValidationError(f"{outcomes.shape[0]} outcomes for {n} records")
            bad = np.flatnonzero((outcomes != 0.0) & (outcomes != 1.0))
            if bad.size:
                i = int(bad[0])
                raise InvalidValue(f"outcome {outcomes[i]!r} of record {ids[i]!r} is not 0 or 1", index=i)
            outcomes = _frozen(outcomes)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "scores", _frozen(scores))
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "outcomes", outcomes)

    def __len__(self):
        return len(self.ids)

    @property
    def labels(self) -> list[str]:
        """Distinct group labels, sorted lexicographically."""
        return sorted(set(self.groups))

    def group_mask(self, label: str) -> np.ndarray:
        return np.fromiter((g == label for g in self.groups), dtype=bool, count=len(self.groups))

    def group_scores(self) -> dict[str, np.ndarray]:
        return {g: self.scores[self.group_mask(g)] for g in self.labels}

    def counts(self) -> dict[str, int]:
        return {g: int(self.group_mask(g).sum()) for g in self.labels}

    def with_scores(self, scores) -> "GroupedScores":
        return GroupedScores(self.ids, scores, self.groups, self.outcomes)

    @classmethod
    def from_records(cls, records: Iterable[Sequence]) -> "GroupedScores":
        """Build from ``(id, score, group)`` or ``(id, score, group, outcome)`` tuples."""
        records = list(records)
        ids = [r[0] for r in records]
        scores = [r[1] for r in records]
        groups = [r[2] for r in records]
        outcomes = None
        if records and all(len(r) > 3 and r[3] is not None for r in records):
            outcomes = [r[3] for r in records]
        return cls(ids, scores, groups, outcomes)

    @classmethod
    def from_groups(cls, scores_by_group: Mapping[str, Sequence[float]]) -> "GroupedScores":
        """Convenience constructor; ids are generated as ``<group>-<index>``."""
        ids, scores, groups = [], [], []
        for g, vals in scores_by_group.items():
            for i, v in enumerate(vals):
                ids.append(f"{g}-{i}")
                scores.append(v)
                groups.append(g)
        return cls(ids, scores, groups)


def partition_by_group(data: GroupedScores) -> tuple[dict[str, EmpiricalDistribution], dict[str, float]]:
    """Split ``data`` into one distribution per group plus empirical group weights.

    Weights are ``count_g / total``; the last label's weight is ``1 - sum(others)``
    so the weights sum to one.
    """
    labels = data.labels
    total = len(data)
    dists = {g: build_ecdf(s) for g, s in data.group_scores().items()}
    weights = {}
    for g in labels[:-1]:
        weights[g] = dists[g].n / total
    weights[labels[-1]] = 1.0 - math.fsum(weights.values())
    return {g: dists[g] for g in labels}, weights
