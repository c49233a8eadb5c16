import math

import numpy as np
import pytest

from censored_pricing.oracle import RevenueCurve, optimal_price
from censored_pricing.policies import C20CB, UCBGrid
from censored_pricing.simulate import TRACE_COLUMNS, run_replica

from conftest import canonical

BOUNDS = canonical().known_bounds()


def test_trace_columns():
    assert TRACE_COLUMNS == ("t", "stage", "gamma", "price", "bin", "d_potential", "d_observed", "indicator",
                             "reward", "opt_price", "opt_reward", "regret_inst", "regret_cum")


def test_trace_consistency():
    inst = canonical()
    summary, tr = run_replica(inst, C20CB(BOUNDS, 5000, 2, scale=0.001, scale_n=0.2), 5000, 2)
    assert len(tr) == 5000
    np.testing.assert_array_equal(tr.d_observed, np.minimum(tr.gamma, tr.d_potential))
    np.testing.assert_array_equal(tr.reward, tr.price * tr.d_observed)
    np.testing.assert_allclose(np.cumsum(tr.regret_inst), tr.regret_cum)
    assert tr.regret_inst.min() >= -1e-9
    assert summary.final_regret == tr.regret_cum[-1]
    for i in np.random.default_rng(0).choice(5000, 20, replace=False):
        opt = optimal_price(RevenueCurve(inst, tr.gamma[i]))
        assert tr.opt_price[i] == pytest.approx(opt.p_star, abs=1e-8)
        assert tr.opt_reward[i] == pytest.approx(opt.r_star, abs=1e-10)
    assert 0 <= summary.coverage <= 1 and summary.coverage_rounds > 0
    assert summary.a_error >= 0 and summary.stage1_rounds >= 71


def test_csv_bins_blank_when_absent():
    _, tr = run_replica(canonical(), UCBGrid(BOUNDS, 4), 100, 0)
    text = tr.to_csv().splitlines()
    assert text[1].split(",")[4] == "0"
    _, tr = run_replica(canonical(), C20CB(BOUNDS, 100, 0), 100, 0)
    assert tr.to_csv().splitlines()[1].split(",")[4] == ""


def test_ucb_summary_has_no_estimates():
    s, _ = run_replica(canonical(), UCBGrid(BOUNDS, 4), 200, 0, keep_trace=False)
    assert math.isnan(s.a_error) and math.isnan(s.coverage)
