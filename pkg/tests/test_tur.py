import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from ergotropic_otto.model import EngineParams, ParameterError, UNITARY_NAMES, named_unitary
from ergotropic_otto.statistics import cycle_statistics
from ergotropic_otto.tur import (evaluate_bounds, generalized_loose_bound,
                                 generalized_tight_bound, inverse_x_tanh_x, loose_bound,
                                 snr_sweep, standard_bound, standard_bound_product,
                                 sweep_params, tight_bound, tur_report)


@given(st.floats(0, 1e6))
def test_inverse_x_tanh_x_residual(y):
    x = inverse_x_tanh_x(y)
    assert x >= 0
    assert abs(x * math.tanh(x) - y) <= 1e-12 * max(1.0, y)


@given(st.floats(1e-300, 1e-3))
def test_inverse_x_tanh_x_small(y):
    assert inverse_x_tanh_x(y) == pytest.approx(math.sqrt(y), rel=1e-3)


def test_inverse_x_tanh_x_domain():
    with pytest.raises(ParameterError):
        inverse_x_tanh_x(-1e-3)
    assert inverse_x_tanh_x(0) == 0


@given(st.floats(1e-6, 50))
def test_bound_ordering(s):
    # tight TUR lies between the loose one and the standard one
    assert loose_bound(s) <= tight_bound(s) * (1 + 1e-12)
    assert tight_bound(s) <= standard_bound(s) * (1 + 1e-12)
    assert generalized_loose_bound(s, s) <= generalized_tight_bound(s, s) * (1 + 1e-12)


@given(st.floats(1e-6, 50))
def test_generalized_reduce_to_symmetric(s):
    assert generalized_tight_bound(s, s) == pytest.approx(tight_bound(s) / 2, rel=1e-12)
    assert generalized_loose_bound(s, s) == pytest.approx(loose_bound(s) / 2, rel=1e-12)


def test_tight_bound_series_branch_is_continuous():
    # csch^2(g(s/2)) = 2/s - 2/3 + O(s)
    below, above = tight_bound(0.999e-8), tight_bound(1.001e-8)
    assert below == pytest.approx(2 / 0.999e-8 - 2 / 3, abs=1e-4)
    assert above == pytest.approx(2 / 1.001e-8 - 2 / 3, abs=1e-4)


def test_tight_bound_small_entropy_limit():
    s = 1e-4
    assert tight_bound(s) == pytest.approx(2 / s - 2 / 3, abs=1e-3)


def test_zero_entropy_bounds_infinite():
    assert standard_bound(0) == math.inf and tight_bound(0) == math.inf
    assert loose_bound(0) == math.inf and generalized_loose_bound(0, 0) == math.inf


def test_negative_entropy_rejected():
    with pytest.raises(ParameterError):
        standard_bound(-0.1)
    assert standard_bound(-1e-15) == math.inf


def test_standard_product_form():
    assert standard_bound_product(2.5, 0.8) == pytest.approx(2.0)


def test_double_swap_violates_standard_at_three_quarters():
    report = tur_report(EngineParams(1, 0.75, 0.5, 4), named_unitary("u3"))
    assert report.bounds["standard"].satisfied is False
    assert report.bounds["swap"].applicable is False
    assert report.operational


def test_double_swap_violates_tight_bound_lower_in_window():
    report = tur_report(EngineParams(1, 0.65, 0.5, 4), named_unitary("u3"))
    assert report.bounds["tight"].satisfied is False
    assert report.bounds["standard"].satisfied is False


def test_swap_satisfies_swap_bound():
    report = tur_report(EngineParams(1, 0.75, 0.5, 4), named_unitary("u1"))
    assert report.bounds["swap"].applicable
    assert report.bounds["swap"].satisfied


def test_identity_not_operational():
    report = tur_report(EngineParams(1, 0.75, 0.5, 4), named_unitary("identity"))
    assert not report.operational
    assert report.bounds["standard"].satisfied is None
    assert report.violated() == []


def test_bound_values_frozen():
    report = tur_report(EngineParams(1, 0.75, 0.5, 4), named_unitary("u3"))
    b = report.bounds
    assert b["standard"].value == pytest.approx(2.9174057831846074, rel=1e-13)
    assert b["tight"].value == pytest.approx(2.2832312395014642, rel=1e-11)
    assert b["loose"].value == pytest.approx(2.0307774950961388, rel=1e-13)


def test_hermitian_strokes_never_break_symmetric_bounds():
    rng = np.random.default_rng(12)
    for _ in range(200):
        params = EngineParams(1, rng.uniform(0.05, 3), rng.uniform(0, 4), rng.uniform(0, 4))
        for name in ("u1", "u2", "u2t"):
            report = tur_report(params, named_unitary(name))
            if not report.operational:
                continue
            for key in ("tight", "loose", "swap", "generalized_tight", "generalized_loose"):
                assert report.bounds[key].satisfied is not False, (name, key, params)


@given(st.floats(0.05, 3), st.floats(0, 4), st.floats(0, 4), st.sampled_from(UNITARY_NAMES))
@settings(max_examples=150, deadline=None)
def test_generalized_bounds_hold(wb, ba, bb, name):
    report = tur_report(EngineParams(1, wb, ba, bb), named_unitary(name))
    # below this the margin between the two sides is under the float resolution
    assume(report.mean_entropy + report.backward.mean_entropy > 1e-6)
    assert report.bounds["generalized_tight"].satisfied is not False
    assert report.bounds["generalized_loose"].satisfied is not False


def test_evaluate_without_backward():
    stats = cycle_statistics(EngineParams(1, 0.75, 0.5, 4), named_unitary("u3"))
    report = evaluate_bounds(stats)
    assert set(report.bounds) == {"standard", "swap", "tight", "loose"}
    assert math.isnan(report.generalized_lhs)


def test_sweep_params_modes():
    base = EngineParams(1, 0.5, 0.5, 4)
    assert sweep_params(base, "omega-b", 0.9).omega_b == 0.9
    assert sweep_params(base, "beta-b-omega-b", 3).beta_omega_b == pytest.approx(3)
    assert sweep_params(base, "beta-a-omega-a", 1e-3).beta_omega_a == pytest.approx(1e-3)
    with pytest.raises(ParameterError):
        sweep_params(base, "x", 1)


def test_sweep_auto_and_fixed():
    base = EngineParams(1, 0.5, 0.5, 4)
    rows = snr_sweep(base, "omega-b", [0.3, 0.75], "auto")
    assert [r.regime for r in rows] == ["Swap", "DoubleSwap"]
    rows = snr_sweep(base, "omega-b", [0.3, 0.75], "u3")
    assert [r.regime for r in rows] == ["DoubleSwap", "DoubleSwap"]
    assert rows[1].stats.mean_work == pytest.approx(0.23731849724495235, rel=1e-14)
