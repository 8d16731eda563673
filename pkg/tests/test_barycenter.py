import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairot.barycenter import (
    BarycenterTransform,
    ScalingTransform,
    apply_barycenter,
    apply_scaling,
    fit_barycenter,
    fit_scaling,
    gaussian_barycenter,
    transform_from_dict,
)
from fairot.divergence import GaussianParams, wasserstein_empirical
from fairot.empirical import GroupedScores
from fairot.errors import ClampWarning, ConvergenceError, DegenerateGroupError, NothingToMitigate, UnknownGroupError
from fairot.fairness import strong_dp_distance

TINY = GroupedScores.from_groups({"A": [0.2, 0.4], "B": [0.3, 0.5]})


def two_groups(rng, n_a, n_b):
    return GroupedScores.from_groups({"A": rng.beta(2, 18, n_a), "B": rng.beta(3, 30, n_b)})


def test_fit_scaling_paper_means():
    # overall 8.67%, men 8.94%, women 8.20%
    t = ScalingTransform({"A": 0.0867 / 0.0894, "B": 0.0867 / 0.0820})
    assert t.factor("B") == pytest.approx(1.058, abs=0.001)
    assert t.factor("A") == pytest.approx(0.970, abs=0.001)


def test_fit_scaling_factors_and_parity():
    rng = np.random.default_rng(0)
    data = two_groups(rng, 300, 200)
    t = fit_scaling(data)
    means = {g: s.mean() for g, s in data.group_scores().items()}
    assert t.factor("A") == pytest.approx(data.scores.mean() / means["A"], rel=1e-12)
    scaled, _ = t.apply(data.scores, data.groups, clip=False)
    post = {g: scaled[data.group_mask(g)].mean() for g in data.labels}
    assert abs(post["A"] - post["B"]) <= 1e-12
    assert post["A"] == pytest.approx(data.scores.mean(), abs=1e-12)


def test_fit_scaling_single_group_and_degenerate():
    assert fit_scaling(GroupedScores.from_groups({"A": [0.1, 0.3]})).factors == {"A": 1.0}
    with pytest.raises(DegenerateGroupError):
        fit_scaling(GroupedScores.from_groups({"A": [0.1], "B": [0.0, 0.0]}))


def test_apply_scaling_table_values():
    assert apply_scaling(ScalingTransform({"B": 1.112}), 0.05, "B") == pytest.approx(0.0556)
    assert apply_scaling(ScalingTransform({"A": 0.9455}), 0.10, "A") == pytest.approx(0.09455)
    assert round(apply_scaling(ScalingTransform({"A": 0.9455}), 0.10, "A"), 4) == pytest.approx(0.0946, abs=1e-4)
    assert apply_scaling(ScalingTransform({"A": 1.0}), 0.37, "A") == 0.37


def test_apply_scaling_clamps_with_warning():
    t = ScalingTransform({"A": 2.0})
    with pytest.warns(ClampWarning):
        assert apply_scaling(t, 0.8, "A") == 1.0
    assert t.apply([0.8, 0.2], ["A", "A"]) [1] == 1
    with pytest.raises(UnknownGroupError):
        apply_scaling(t, 0.1, "Z")


def test_fit_barycenter_tiny():
    t = fit_barycenter(TINY)
    assert t.weights == {"A": 0.5, "B": 0.5}
    assert t.distributions["A"].values.tolist() == [0.2, 0.4]


def test_apply_barycenter_tiny():
    t = fit_barycenter(TINY)
    assert apply_barycenter(t, 0.2, "A") == pytest.approx(0.25)
    assert apply_barycenter(t, 0.3, "B") == pytest.approx(0.25)
    assert apply_barycenter(t, 0.4, "A") == pytest.approx(0.45)
    assert apply_barycenter(t, 0.4, "A") == apply_barycenter(t, 0.5, "B")
    with pytest.raises(UnknownGroupError):
        apply_barycenter(t, 0.2, "C")


def test_barycenter_weights_from_split():
    rng = np.random.default_rng(4)
    t = fit_barycenter(two_groups(rng, 7973, 4464))
    assert t.weights["A"] == pytest.approx(0.64, abs=0.005)
    assert t.weights["B"] == pytest.approx(0.36, abs=0.005)


def test_single_group_is_identity():
    with pytest.warns(NothingToMitigate):
        t = fit_barycenter(GroupedScores.from_groups({"A": [0.1, 0.5, 0.7]}))
    assert t.warning == "single group"
    for x in (0.1, 0.33, 0.7):
        assert apply_barycenter(t, x, "A") == x


def test_identical_groups_identity():
    vals = [0.05, 0.1, 0.1, 0.3, 0.8]
    t = fit_barycenter(GroupedScores.from_groups({"A": vals, "B": vals}))
    for v in vals:
        assert apply_barycenter(t, v, "A") == pytest.approx(v, abs=1e-15)
        assert apply_barycenter(t, v, "B") == pytest.approx(v, abs=1e-15)


def test_equal_sizes_exact_rank_pairing():
    rng = np.random.default_rng(9)
    data = two_groups(rng, 500, 500)
    t = fit_barycenter(data)
    fair = data.with_scores(t.apply(data.scores, data.groups))
    a, b = (np.sort(v) for v in fair.group_scores().values())
    assert np.array_equal(a, b)
    assert strong_dp_distance(fair, "W2")[("A", "B")] == 0.0


def test_balance_preserved():
    rng = np.random.default_rng(12)
    for n_a, n_b in ((1000, 1000), (1000, 400), (50, 3000)):
        data = two_groups(rng, n_a, n_b)
        t = fit_barycenter(data)
        fair = t.apply(data.scores, data.groups)
        spread = data.scores.max() - data.scores.min()
        assert abs(fair.mean() - data.scores.mean()) <= 2 * spread / min(n_a, n_b)


def test_contraction_and_convergence():
    rng = np.random.default_rng(21)
    after = []
    for n in (100, 1000, 10000):
        data = two_groups(rng, n, n // 2)
        t = fit_barycenter(data)
        fair = data.with_scores(t.apply(data.scores, data.groups))
        before_w2 = strong_dp_distance(data, "W2")[("A", "B")]
        after_w2 = strong_dp_distance(fair, "W2")[("A", "B")]
        assert after_w2 <= before_w2
        after.append(after_w2)
    assert after[0] > after[1] > after[2]


def test_three_groups():
    data = GroupedScores.from_groups({"A": [0.1, 0.2, 0.3], "B": [0.2, 0.4, 0.6], "C": [0.5, 0.6, 0.7]})
    t = fit_barycenter(data)
    # rank i in every group maps to the weighted average of the i-th order statistics
    expected = [(0.1 + 0.2 + 0.5) / 3, (0.2 + 0.4 + 0.6) / 3, (0.3 + 0.6 + 0.7) / 3]
    for g, vals in (("A", [0.1, 0.2, 0.3]), ("B", [0.2, 0.4, 0.6]), ("C", [0.5, 0.6, 0.7])):
        assert t.apply_group(vals, g) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("AB"), st.floats(0, 1)), min_size=2, max_size=80))
def test_rank_preservation_and_range(records):
    data = GroupedScores([str(i) for i in range(len(records))], [r[1] for r in records], [r[0] for r in records])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NothingToMitigate)
        t = fit_barycenter(data)
    fair = t.apply(data.scores, data.groups)
    for g in data.labels:
        m = data.group_mask(g)
        order = np.argsort(data.scores[m], kind="stable")
        assert np.all(np.diff(fair[m][order]) >= -1e-15)
    assert fair.min() >= data.scores.min() - 1e-15 and fair.max() <= data.scores.max() + 1e-15


def test_transform_json_round_trip():
    t = fit_barycenter(TINY)
    t2 = transform_from_dict(json.loads(json.dumps(t.to_dict())))
    assert isinstance(t2, BarycenterTransform)
    assert t2.weights == t.weights and t2.labels == t.labels
    assert apply_barycenter(t2, 0.2, "A") == apply_barycenter(t, 0.2, "A")
    s = fit_scaling(TINY)
    s2 = transform_from_dict(json.loads(json.dumps(s.to_dict())))
    assert s2.factors == s.factors


def test_gaussian_barycenter_1d():
    out, info = gaussian_barycenter([GaussianParams(0, 1), GaussianParams(2, 9)], [0.5, 0.5], full_output=True)
    assert out.mean[0] == pytest.approx(1.0, abs=1e-12)
    assert out.cov[0, 0] == pytest.approx(4.0, abs=1e-8)
    assert info["residual"] <= 1e-8


def test_gaussian_barycenter_weighted_std_1d():
    ps = [GaussianParams.from_std(m, s) for m, s in ((0, 1), (1, 2), (5, 0.5))]
    w = [0.2, 0.3, 0.5]
    out = gaussian_barycenter(ps, w)
    assert out.std == pytest.approx(0.2 * 1 + 0.3 * 2 + 0.5 * 0.5, abs=1e-8)
    assert out.mean[0] == pytest.approx(0.3 + 2.5)


def test_gaussian_barycenter_single_and_commuting():
    g = GaussianParams([1, 2], [[2.0, 0.5], [0.5, 1.0]])
    out = gaussian_barycenter([g], [1.0])
    assert np.array_equal(out.cov, g.cov) and np.array_equal(out.mean, g.mean)
    out = gaussian_barycenter([GaussianParams([0, 0], np.diag([1.0, 4.0])),
                               GaussianParams([0, 0], np.diag([9.0, 16.0]))], [0.5, 0.5])
    assert np.allclose(out.cov, np.diag([4.0, 9.0]), atol=1e-8)


def test_gaussian_barycenter_general_fixed_point():
    rng = np.random.default_rng(8)
    covs = []
    for _ in range(3):
        A = rng.normal(size=(3, 3))
        covs.append(A @ A.T + np.eye(3))
    w = [0.2, 0.5, 0.3]
    out, info = gaussian_barycenter([GaussianParams(np.zeros(3), c) for c in covs], w, full_output=True)
    from fairot.linalg import matrix_sqrt
    R = matrix_sqrt(out.cov)
    rhs = sum(wi * matrix_sqrt(R @ c @ R) for wi, c in zip(w, covs))
    assert np.linalg.norm(out.cov - rhs) <= 1e-8
    assert info["iterations"] <= 500


def test_gaussian_barycenter_all_equal_inputs():
    g = GaussianParams([0.5, 0.5], [[1.0, 0.2], [0.2, 2.0]])
    out, info = gaussian_barycenter([g, g, g], [0.3, 0.3, 0.4], full_output=True)
    assert np.allclose(out.cov, g.cov, atol=1e-12)
    assert info["iterations"] == 0


def test_gaussian_barycenter_convergence_error():
    rng = np.random.default_rng(3)
    covs = [np.diag(rng.uniform(0.5, 5, 3)) + 0.3 for _ in range(3)]
    with pytest.raises(ConvergenceError) as exc:
        gaussian_barycenter([GaussianParams(np.zeros(3), c) for c in covs], [0.2, 0.3, 0.5], tol=1e-300, max_iter=3)
    assert exc.value.residual > 0 and exc.value.iterations == 3
