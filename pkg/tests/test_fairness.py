import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairot.barycenter import fit_barycenter
from fairot.empirical import GroupedScores
from fairot.errors import DomainError, JoinError, MissingOutcomeError
from fairot.fairness import FairnessReport, balance_check, build_report, strong_dp_distance, weak_dp_gap


def test_weak_dp_gap_paper_means():
    data = GroupedScores.from_groups({"A": [0.0894] * 3, "B": [0.0820] * 2})
    assert weak_dp_gap(data) == pytest.approx(0.0074, abs=1e-12)


def test_weak_dp_gap_cases():
    assert weak_dp_gap(GroupedScores.from_groups({"A": [0.1, 0.3], "B": [0.3, 0.1]})) == 0
    three = GroupedScores.from_groups({"A": [0.1], "B": [0.2], "C": [0.4]})
    assert weak_dp_gap(three) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        weak_dp_gap(GroupedScores.from_groups({"A": [0.1]}))


def test_strong_dp_identical_groups():
    data = GroupedScores.from_groups({"A": [0.1, 0.5, 0.9], "B": [0.9, 0.1, 0.5]})
    for metric in ("W1", "W2", "TV", "KL", "JS"):
        assert strong_dp_distance(data, metric)[("A", "B")] == 0


def test_strong_dp_shift():
    data = GroupedScores.from_groups({"A": [0.1, 0.2, 0.3], "B": [0.2, 0.3, 0.4]})
    assert strong_dp_distance(data, "W1")[("A", "B")] == pytest.approx(0.1, abs=1e-15)


def test_strong_dp_after_barycenter_is_zero():
    rng = np.random.default_rng(0)
    data = GroupedScores.from_groups({"A": rng.random(200), "B": rng.random(200) ** 2})
    t = fit_barycenter(data)
    fair = data.with_scores(t.apply(data.scores, data.groups))
    assert strong_dp_distance(fair, "W2")[("A", "B")] == 0.0
    assert weak_dp_gap(fair) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 10), min_size=1, max_size=8), st.lists(st.integers(0, 10), min_size=1, max_size=8),
       st.integers(1, 3), st.integers(1, 3))
def test_w2_zero_iff_same_distribution(a, b, ra, rb):
    # replicate to compare multisets on a common quantile grid
    a_vals, b_vals = [x / 10 for x in a] * ra, [x / 10 for x in b] * rb
    data = GroupedScores.from_groups({"A": a_vals, "B": b_vals})
    w2 = strong_dp_distance(data, "W2")[("A", "B")]
    # equal as distributions iff equal multisets after scaling to a common size
    same = sorted(a * len(b)) == sorted(b * len(a))
    assert (w2 == 0) == same


def test_balance_check_examples():
    data = GroupedScores(["a", "b"], [0.0867, 0.0867], ["A", "B"], [1, 0])
    b = balance_check(data)
    assert b.gap == pytest.approx(abs(0.0867 - 0.5))
    flat = GroupedScores([str(i) for i in range(4)], [0.5] * 4, ["A"] * 4, [1, 0, 0, 0])
    b = balance_check(flat)
    assert b.gap == 0.25 and not b.balanced
    zero = GroupedScores(["a", "b"], [0.0, 0.0], ["A", "B"], [0, 0])
    b = balance_check(zero)
    assert b.gap == 0 and b.balanced
    with pytest.raises(MissingOutcomeError):
        balance_check(GroupedScores(["a"], [0.1], ["A"]))


def test_balance_at_paper_frequency():
    n = 10_000
    k = 867
    data = GroupedScores([str(i) for i in range(n)], [0.0867] * n, ["A"] * n, [1] * k + [0] * (n - k))
    b = balance_check(data)
    assert b.gap == pytest.approx(0, abs=1e-12) and b.balanced


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(20))))
def test_balance_permutation_invariant(perm):
    rng = np.random.default_rng(0)
    scores, outcomes = rng.random(20), rng.integers(0, 2, 20)
    base = balance_check(GroupedScores([str(i) for i in range(20)], scores, ["A"] * 20, outcomes))
    p = np.array(perm)
    shuffled = balance_check(GroupedScores([str(i) for i in p], scores[p], ["A"] * 20, outcomes[p]))
    assert shuffled.gap == base.gap


def test_report_before_after_and_round_trip():
    rng = np.random.default_rng(1)
    data = GroupedScores([str(i) for i in range(300)], rng.beta(2, 20, 300), ["A"] * 200 + ["B"] * 100,
                         rng.integers(0, 2, 300))
    t = fit_barycenter(data)
    fair = data.with_scores(t.apply(data.scores, data.groups))
    report = build_report(data, fair, {"note": "test"})
    entry = report.models[0]
    assert entry.after.strong_dp[0]["W2"] <= entry.before.strong_dp[0]["W2"]
    assert entry.before.counts == {"A": 200, "B": 100}
    doc = json.loads(json.dumps(report.to_dict()))
    assert FairnessReport.from_dict(doc) == report
    assert FairnessReport.from_dict(doc).to_dict() == report.to_dict()


def test_report_identity_and_join_error():
    data = GroupedScores.from_groups({"A": [0.1, 0.2], "B": [0.3, 0.5]})
    report = build_report(data, data)
    assert report.models[0].before == report.models[0].after
    other = GroupedScores(["x", "y", "z", "w"], [0.1, 0.2, 0.3, 0.4], ["A", "A", "B", "B"])
    with pytest.raises(JoinError):
        build_report(data, other)


def test_report_kl_infinite_is_null():
    data = GroupedScores.from_groups({"A": [0.01, 0.02], "B": [0.9, 0.95]})
    report = build_report(data)
    assert report.models[0].before.strong_dp[0]["KL"] is None
    json.dumps(report.to_dict(), allow_nan=False)
    smoothed = build_report(data, kl_smoothing=True)
    assert smoothed.models[0].before.strong_dp[0]["KL"] > 0
