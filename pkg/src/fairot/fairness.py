"""
Demographic-parity and balance diagnostics, and the assembled report.

Weak demographic parity compares group means; strong demographic parity
compares whole group score distributions (W2 = 0 exactly when the group
distributions coincide). The balance check compares the mean prediction
with the observed outcome frequency.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .divergence import (
    bin_scores,
    default_edges,
    js_divergence,
    kl_divergence,
    total_variation,
    wasserstein_empirical,
)
from .empirical import GroupedScores, partition_by_group
from .errors import DomainError, JoinError, MissingOutcomeError, SupportError, ValidationError

__all__ = [
    "METRICS",
    "REPORT_SCHEMA",
    "Balance",
    "Diagnostics",
    "ModelEntry",
    "FairnessReport",
    "weak_dp_gap",
    "strong_dp_distance",
    "balance_check",
    "diagnose",
    "build_report",
]

METRICS = ("W1", "W2", "TV", "KL", "JS")
REPORT_SCHEMA = "fairot.report/1"


def _group_means(data: GroupedScores) -> dict:
    return {g: math.fsum(s) / s.size for g, s in data.group_scores().items()}


def weak_dp_gap(data: GroupedScores) -> float:
    """Largest pairwise difference between group mean scores."""
    means = _group_means(data)
    if len(means) < 2:
        raise DomainError("weak demographic parity needs at least two groups")
    return max(means.values()) - min(means.values())


def strong_dp_distance(data: GroupedScores, metric: str = "W2", edges=None,
                       smoothing: bool = False) -> dict:
    """Distance between every pair of group score distributions.

    Returns ``{(g, h): value}`` for ``g < h`` in label order. KL is
    ``KL(P_g || P_h)``. TV, KL and JS bin scores on ``edges`` (default 20
    equal-width bins on ``[0, 1]``).
    """
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    dists, _ = partition_by_group(data)
    if len(dists) < 2:
        raise DomainError("strong demographic parity needs at least two groups")
    if metric in ("W1", "W2"):
        k = int(metric[1])
        return {(g, h): wasserstein_empirical(dists[g], dists[h], k)
                for g, h in itertools.combinations(dists, 2)}
    edges = default_edges() if edges is None else edges
    binned = {g: bin_scores(d, edges) for g, d in dists.items()}
    out = {}
    for g, h in itertools.combinations(dists, 2):
        p, q = binned[g], binned[h]
        if metric == "TV":
            out[(g, h)] = total_variation(p, q)
        elif metric == "KL":
            out[(g, h)] = kl_divergence(p, q, smoothing=smoothing)
        else:
            out[(g, h)] = js_divergence(p, q)
    return out


@dataclass(frozen=True)
class Balance:
    mean_prediction: float
    mean_outcome: float
    gap: float
    relative_gap: float | None
    tolerance: float
    balanced: bool


def balance_check(data: GroupedScores, tolerance: float = 0.01) -> Balance:
    """Compare mean score to mean outcome.

    Balanced when ``gap / mean_outcome <= tolerance``; with a zero outcome
    frequency only a zero gap counts as balanced.
    """
    if data.outcomes is None:
        raise MissingOutcomeError("balance check needs an outcome for every record")
    if not tolerance > 0:
        raise ValidationError("tolerance must be positive")
    n = len(data)
    mean_pred = math.fsum(data.scores) / n
    mean_out = math.fsum(data.outcomes) / n
    gap = abs(mean_pred - mean_out)
    rel = gap / mean_out if mean_out > 0 else None
    balanced = gap == 0.0 or (rel is not None and rel <= tolerance)
    return Balance(mean_pred, mean_out, gap, rel, tolerance, balanced)


@dataclass(frozen=True)
class Diagnostics:
    counts: dict
    group_means: dict
    overall_mean: float
    weak_dp_gap: float | None
    strong_dp: list
    balance: Balance | None


def diagnose(data: GroupedScores, edges=None, tolerance: float = 0.01,
             kl_smoothing: bool = False) -> Diagnostics:
    """All fairness diagnostics for one score column.

    KL is ``None`` where it is infinite (disjoint support without smoothing).
    """
    edges = default_edges() if edges is None else np.asarray(edges, dtype=float)
    dists, _ = partition_by_group(data)
    labels = list(dists)
    binned = {g: bin_scores(d, edges) for g, d in dists.items()}
    pairs = []
    for g, h in itertools.combinations(labels, 2):
        p, q = binned[g], binned[h]
        try:
            kl = kl_divergence(p, q, smoothing=kl_smoothing)
        except SupportError:
            kl = None
        pairs.append({
            "groups": [g, h],
            "W1": wasserstein_empirical(dists[g], dists[h], 1),
            "W2": wasserstein_empirical(dists[g], dists[h], 2),
            "TV": total_variation(p, q),
            "KL": kl,
            "JS": js_divergence(p, q),
        })
    balance = balance_check(data, tolerance) if data.outcomes is not None else None
    return Diagnostics(
        counts=data.counts(),
        group_means=_group_means(data),
        overall_mean=math.fsum(data.scores) / len(data),
        weak_dp_gap=weak_dp_gap(data) if len(labels) >= 2 else None,
        strong_dp=pairs,
        balance=balance,
    )


@dataclass(frozen=True)
class ModelEntry:
    model: str
    before: Diagnostics
    after: Diagnostics | None = None


@dataclass(frozen=True)
class FairnessReport:
    models: list
    bin_edges: list
    balance_tolerance: float = 0.01
    metadata: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA
    version: str = __version__
    log_base: str = "e"

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "version": self.version,
            "log_base": self.log_base,
            "bin_edges": list(self.bin_edges),
            "balance_tolerance": self.balance_tolerance,
            "metadata": dict(self.metadata),
            "models": [asdict(m) for m in self.models],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FairnessReport":
        if doc.get("schema") != REPORT_SCHEMA:
            raise ValidationError(f"unsupported report schema {doc.get('schema')!r}")

        def diag(d):
            if d is None:
                return None
            bal = Balance(**d["balance"]) if d.get("balance") is not None else None
            return Diagnostics(d["counts"], d["group_means"], d["overall_mean"], d["weak_dp_gap"],
                               d["strong_dp"], bal)

        models = [ModelEntry(m["model"], diag(m["before"]), diag(m.get("after"))) for m in doc["models"]]
        return cls(models, doc["bin_edges"], doc["balance_tolerance"], doc.get("metadata", {}),
                   doc["schema"], doc["version"], doc.get("log_base", "e"))


def model_entry(raw: GroupedScores, mitigated: GroupedScores | None = None, model: str = "score",
                edges=None, tolerance: float = 0.01, kl_smoothing: bool = False) -> ModelEntry:
    if mitigated is not None:
        if list(raw.ids) != list(mitigated.ids) and sorted(raw.ids) != sorted(mitigated.ids):
            raise JoinError("raw and mitigated tables do not contain the same record ids")
    before = diagnose(raw, edges, tolerance, kl_smoothing)
    after = diagnose(mitigated, edges, tolerance, kl_smoothing) if mitigated is not None else None
    return ModelEntry(model, before, after)


def build_report(raw: GroupedScores, mitigated: GroupedScores | None = None, metadata: dict | None = None,
                 *, model: str = "score", edges=None, tolerance: float = 0.01,
                 kl_smoothing: bool = False) -> FairnessReport:
    """Before/after diagnostics for a single score column."""
    edges = default_edges() if edges is None else np.asarray(edges, dtype=float)
    entry = model_entry(raw, mitigated, model, edges, tolerance, kl_smoothing)
    return FairnessReport([entry], edges.tolist(), tolerance, dict(metadata or {}))
