"""
Synthetic two-group score tables for desk-scale experiments.

Scores in each group follow a Beta distribution parameterized by its mean
and concentration ``a + b``. Draws are stratified: the i-th record gets the
Beta quantile of a uniform draw inside the stratum ``[k/n, (k+1)/n)`` for a
random permutation ``k``, so group means land very close to their targets.

Outcomes are Bernoulli(score) drawn by systematic sampling: one uniform
offset ``U`` and ``y_i = floor(C_i + U) - floor(C_{i-1} + U)`` where ``C`` is
the running sum of scores. Each outcome has marginal probability equal to
its score, and the outcome total is within one of the score total, so the
table satisfies the balance property up to rounding.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .io import ScoreTable, fmt_float

# group means used in the motor-insurance illustration (men / women)
DEFAULT_MEANS = (0.0894, 0.0820)
DEFAULT_SIZES = (7973, 4464)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_a: int = DEFAULT_SIZES[0]
    n_b: int = DEFAULT_SIZES[1]
    mean_a: float = DEFAULT_MEANS[0]
    mean_b: float = DEFAULT_MEANS[1]
    concentration_a: float = 20.0
    concentration_b: float = 30.0
    label_a: str = "A"
    label_b: str = "B"

    def as_dict(self) -> dict:
        return asdict(self)


def stratified_beta(rng: np.random.Generator, n: int, mean: float, concentration: float) -> np.ndarray:
    if not 0.0 < mean < 1.0:
        raise ValueError(f"mean must lie in (0, 1), got {mean}")
    if concentration <= 0:
        raise ValueError("concentration must be positive")
    u = (rng.permutation(n) + rng.random(n)) / n
    return stats.beta.ppf(u, mean * concentration, (1.0 - mean) * concentration)


def systematic_bernoulli(rng: np.random.Generator, p: np.ndarray) -> np.ndarray:
    c = np.concatenate([[0.0], np.cumsum(p)])
    k = np.floor(c + rng.random())
    return np.diff(k).astype(int)


def generate(config: SynthConfig) -> ScoreTable:
    rng = np.random.default_rng(config.seed)
    a = stratified_beta(rng, config.n_a, config.mean_a, config.concentration_a)
    b = stratified_beta(rng, config.n_b, config.mean_b, config.concentration_b)
    scores = np.concatenate([a, b])
    groups = [config.label_a] * config.n_a + [config.label_b] * config.n_b
    outcomes = systematic_bernoulli(rng, scores)
    width = len(str(scores.size))
    rows = [
        [f"r{i:0{width}d}", fmt_float(s), g, str(int(y))]
        for i, (s, g, y) in enumerate(zip(scores, groups, outcomes))
    ]
    return ScoreTable(["id", "score", "group", "outcome"], rows)
