import math

import pytest

from greedypaths import (
    TruncationBiasTooLarge,
    error_decomposition,
    estimate_limit,
    estimate_rate,
    estimate_truncated_constant,
    max_weight_path,
    replica_field,
)
from greedypaths.weights import Bernoulli, Constant, TwoPoint, overshoot_mean

INF = math.inf


def test_constant_law_degenerate():
    row = estimate_rate(Constant(2.0), 2, 9, INF, 20, 7)
    assert row.mean == 2.0 and row.stderr == 0.0
    assert row.ci_low == row.ci_high == 2.0
    assert row.exact_fraction == 1.0


def test_all_weights_one():
    row = estimate_rate(TwoPoint(1, 0, 0.0), 2, 6, INF, 10, 3)
    assert row.mean == 1.0 and row.stderr == 0.0


def test_row_invariants():
    row = estimate_rate(Bernoulli(0.5), 2, 8, INF, 50, 11)
    assert row.ci_low <= row.mean <= row.ci_high
    assert row.stderr >= 0.0
    assert 0.0 <= row.exact_fraction <= 1.0


def test_nonnegative_law_truncation_inactive():
    # same replicas, any m >= 0: per-sample values bit-identical
    for m in (0.0, 2.0, 8.0):
        a = estimate_rate(Bernoulli(0.5), 2, 8, m, 30, 5)
        b = estimate_rate(Bernoulli(0.5), 2, 8, INF, 30, 5)
        assert a.mean == b.mean and a.stderr == b.stderr


def test_per_sample_coupling_monotone_in_m():
    spec = TwoPoint(1, 10, 0.3)
    for r in range(25):
        field = replica_field(spec, 2, 13, r)
        vals = [max_weight_path(field, 9, m).value / 9 for m in (0.0, 2.0, 4.0, 8.0)]
        raw = max_weight_path(field, 9).value / 9
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] >= raw - 1e-12


def test_workers_do_not_change_results():
    a = estimate_rate(TwoPoint(1, 10, 0.3), 2, 7, 4.0, 40, 21, workers=1)
    b = estimate_rate(TwoPoint(1, 10, 0.3), 2, 7, 4.0, 40, 21, workers=3)
    assert a == b


def test_truncated_constant_constant_law():
    est = estimate_truncated_constant(Constant(2.0), 2, 1.0, [3, 5, 7], 5, 9)
    assert est.estimate == 2.0 and est.drift == 0.0 and est.uncertainty == 0.0


def test_truncated_constant_nonnegative_floor():
    est = estimate_truncated_constant(Bernoulli(0.5), 2, 0.0, [4, 6, 8], 40, 9)
    assert est.estimate >= 0.0
    assert est.rows[-1].n == 8


def test_truncated_constant_needs_grid():
    with pytest.raises(ValueError):
        estimate_truncated_constant(Constant(2.0), 2, 1.0, [3, 5], 5, 9)


def test_limit_constant_law():
    lim = estimate_limit(Constant(2.0), 2, [0.0, 2.0], [3, 5, 7], 5, 3)
    assert lim.limit == 2.0 and lim.bias_bound == 0.0 and lim.monotone_ok


def test_limit_nonnegative_law_any_grid():
    a = estimate_limit(Bernoulli(0.5), 2, [0.0, 4.0], [4, 6, 8], 30, 5)
    b = estimate_limit(Bernoulli(0.5), 2, [0.0], [4, 6, 8], 30, 5)
    assert a.limit == b.limit  # truncation never binds
    assert a.monotone_ok


def test_limit_two_point_above_mean_weight():
    spec = TwoPoint(1, 10, 0.3)
    lim = estimate_limit(spec, 2, [2.0, 4.0, 8.0], [4, 6, 8], 60, 17)
    assert lim.limit >= spec.mean()  # = 0.7 - 3.0 = -2.3
    assert lim.monotone_ok


def test_limit_bias_target():
    with pytest.raises(TruncationBiasTooLarge):
        estimate_limit(TwoPoint(1, 10, 0.3), 2, [0.0, 2.0], [3, 4, 5], 10, 1,
                       target_bias=1e-6)


def test_beam_fallback_flagged_in_exact_fraction():
    # n beyond the exact-solve gate: the beam heuristic serves the cell and
    # the row reports it through exact_fraction
    row = estimate_rate(Bernoulli(0.5), 2, 9, INF, 10, 3, n_budget=8, beam_width=16)
    assert row.exact_fraction == 0.0
    exact = estimate_rate(Bernoulli(0.5), 2, 9, INF, 10, 3)
    assert exact.exact_fraction == 1.0
    assert row.mean <= exact.mean + 1e-12  # beam values are lower bounds


def test_error_decomposition_nonnegative():
    ed = error_decomposition(Bernoulli(0.5), 2, 8, 2.0, 40, 3)
    assert ed.mean_defect_rate == 0.0
    assert ed.sandwich_violations == 0
    assert ed.bound_holds


def test_error_decomposition_constant():
    ed = error_decomposition(Constant(2.0), 2, 6, 1.0, 10, 3)
    assert ed.mean_abs_error == 0.0
    assert ed.mean_trunc_deviation == 0.0
    assert ed.plug_in_gap == 0.0
    assert ed.bound_holds


def test_error_decomposition_defect_rate_bounded():
    # one-sided: mean defect per vertex below the unconditional overshoot mean
    spec = TwoPoint(1, 10, 0.3)
    ed = error_decomposition(spec, 2, 10, 4.0, 200, 29)
    assert ed.bound_holds
    limit = overshoot_mean(spec, 4.0)  # 1.8
    assert ed.mean_defect_rate <= limit + 3 * ed.defect_rate_stderr
