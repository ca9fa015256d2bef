import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergotropic_otto.model import (BasisPermutation, EngineParams, ParameterError,
                                   UNITARY_NAMES, gibbs_state, named_unitary)
from ergotropic_otto.statistics import (backward_joint, characteristic_function,
                                        characteristic_function_trace, closed_form_entropy,
                                        closed_form_relative_fluctuations, cycle_statistics,
                                        detailed_ft_check, integral_ft_residual,
                                        joint_distribution, moments, work_marginal)

NAMED = [n for n in UNITARY_NAMES if n != "identity"]
params_st = st.builds(EngineParams, st.floats(0.1, 3), st.floats(0.1, 3),
                      st.floats(0, 4), st.floats(0, 4))
perms9 = st.permutations(range(9)).map(BasisPermutation)


def tpm_oracle(params, u):
    """Two-point measurement statistics from dense projectors and |<f|U|i>|^2."""
    n, m = params.levels()
    ea, eb = params.omega_a * n, params.omega_b * m
    p = gibbs_state(params).probs
    mat = u.matrix()
    out = defaultdict(float)
    for i in range(params.size):
        for f in range(params.size):
            weight = abs(mat[f, i]) ** 2 * p[i]
            if weight:
                w = ea[i] + eb[i] - ea[f] - eb[f]
                out[(round(w, 9), round(ea[f] - ea[i], 9))] += weight
    return dict(out)


@given(params_st, perms9)
@settings(max_examples=60, deadline=None)
def test_joint_matches_projector_oracle(params, u):
    joint = joint_distribution(params, u)
    oracle = tpm_oracle(params, u)
    mine = defaultdict(float)
    for a in joint:
        mine[(round(a.work, 9), round(a.delta_e_a, 9))] += a.probability
    assert set(mine) == set(oracle)
    for k in oracle:
        assert mine[k] == pytest.approx(oracle[k], rel=1e-12, abs=1e-300)
    assert math.fsum(a.probability for a in joint) == pytest.approx(1, abs=1e-14)
    assert len(joint) <= params.size


@given(params_st, perms9)
@settings(max_examples=40, deadline=None)
def test_first_law_per_atom(params, u):
    for a in joint_distribution(params, u):
        assert a.work + a.delta_e_a + a.delta_e_b == pytest.approx(0, abs=1e-14)
        assert a.delta_e_b == pytest.approx(-params.omega_b * a.dn_b, abs=1e-14)


def test_identity_is_a_single_atom():
    joint = joint_distribution(EngineParams(1, 0.3, 0.5, 4), named_unitary("identity"))
    assert len(joint) == 1
    assert joint.atoms[0].probability == 1
    assert joint.atoms[0].work == 0


def test_mismatched_sizes():
    with pytest.raises(ParameterError):
        joint_distribution(EngineParams(1, 1, 1, 1, 2, 2), named_unitary("u3"))


@pytest.mark.parametrize("name", NAMED)
def test_moments_against_oracle(name):
    params = EngineParams(1, 0.65, 0.4, 2.5)
    u = named_unitary(name)
    oracle = tpm_oracle(params, u)
    joint = joint_distribution(params, u)
    for j in range(4):
        for k in range(4 - j):
            expected = math.fsum(p * w ** j * d ** k for (w, d), p in oracle.items())
            assert moments(joint, j, k) == pytest.approx(expected, rel=1e-10, abs=1e-13)
    with pytest.raises(ParameterError):
        moments(joint, 5, 4)


@pytest.mark.parametrize("name", NAMED)
@pytest.mark.parametrize("lam,mu", [(0.3, -1.2), (2.0, 0.5), (-0.5j, 0.2j), (1 + 0.3j, -0.7)])
def test_characteristic_function_two_routes(name, lam, mu):
    params = EngineParams(1, 0.7, 0.6, 3)
    u = named_unitary(name)
    a = characteristic_function(params, u, lam, mu)
    b = characteristic_function_trace(params, u, lam, mu)
    assert abs(a - b) <= 1e-12 * max(1, abs(b))


@pytest.mark.parametrize("name", UNITARY_NAMES)
def test_characteristic_function_gives_integral_ft(name):
    params = EngineParams(1, 0.7, 0.6, 3)
    chi = characteristic_function(params, named_unitary(name),
                                  -1j * params.beta_b, 1j * (params.beta_a - params.beta_b))
    assert abs(chi - 1) < 1e-12


def test_characteristic_function_cap():
    params = EngineParams(1, 0.7, 0.6, 3)
    with pytest.raises(ParameterError):
        characteristic_function(params, named_unitary("u1"), 2e3j, 0)


def test_characteristic_function_moments_by_finite_difference():
    params = EngineParams(1, 0.7, 0.6, 3)
    u = named_unitary("u3")
    h = 1e-5
    d = (characteristic_function(params, u, h, 0) - characteristic_function(params, u, -h, 0)) / (2 * h)
    assert (d / 1j).real == pytest.approx(cycle_statistics(params, u).mean_work, rel=1e-8)


@given(params_st, perms9)
@settings(max_examples=60, deadline=None)
def test_fluctuation_theorems_any_permutation(params, u):
    assert integral_ft_residual(joint_distribution(params, u)) < 1e-10
    assert detailed_ft_check(params, u) < 1e-10


def test_fluctuation_theorems_extreme_temperatures():
    params = EngineParams(1, 0.75, 300, 500)
    for name in NAMED:
        assert integral_ft_residual(joint_distribution(params, named_unitary(name))) < 1e-10
        assert detailed_ft_check(params, named_unitary(name)) < 1e-10


def test_mean_entropy_non_negative_and_entropy_formula():
    rng = np.random.default_rng(2)
    for _ in range(30):
        params = EngineParams(1, rng.uniform(0.1, 3), rng.uniform(0, 3), rng.uniform(0, 3))
        for name in NAMED:
            stats = cycle_statistics(params, named_unitary(name))
            assert stats.mean_entropy >= -1e-14
            lhs = (params.beta_a - params.beta_b) * stats.mean_delta_e_a - params.beta_b * stats.mean_work
            assert stats.mean_entropy == pytest.approx(lhs, abs=1e-12)


def test_backward_is_inverse_stroke():
    params = EngineParams(1, 0.75, 0.5, 4)
    back = backward_joint(params, named_unitary("u3"))
    assert back.same_as(joint_distribution(params, named_unitary("u3t")))
    # hermitian strokes are their own reverse
    assert backward_joint(params, named_unitary("u1")).same_as(
        joint_distribution(params, named_unitary("u1")), tol=0)


def test_double_swap_backward_is_mirrored_forward():
    params = EngineParams(1, 0.75, 0.5, 4)
    back = cycle_statistics(params, named_unitary("u3t"))
    mirror = cycle_statistics(params.swapped(), named_unitary("u3"))
    assert back.mean_work == pytest.approx(mirror.mean_work, rel=1e-13)
    assert back.var_work == pytest.approx(mirror.var_work, rel=1e-13)
    assert back.mean_entropy == pytest.approx(mirror.mean_entropy, rel=1e-13)


@pytest.mark.parametrize("name", NAMED)
def test_closed_form_entropy_and_fluctuations(name):
    rng = np.random.default_rng(9)
    for _ in range(25):
        params = EngineParams(1, rng.uniform(0.1, 3), rng.uniform(0, 3), rng.uniform(0, 3))
        stats = cycle_statistics(params, named_unitary(name))
        assert closed_form_entropy(params, name) == pytest.approx(stats.mean_entropy,
                                                                  rel=1e-10, abs=1e-14)
        if abs(stats.mean_work) > 1e-6:
            assert closed_form_relative_fluctuations(params, name) == pytest.approx(
                stats.relative_fluctuations, rel=1e-9)


def test_swap_entropy_closed_form_at_equal_frequencies():
    # the frequency factor cancels, so omega_a = omega_b needs no special case
    params = EngineParams(1, 1, 0.5, 2)
    assert closed_form_entropy(params, "u1") == pytest.approx(
        cycle_statistics(params, named_unitary("u1")).mean_entropy, rel=1e-12)


def _p(params, n, m):
    return gibbs_state(params).probs[3 * n + m]


def test_idle_swap_three_points():
    params = EngineParams(1, 0.25, 0.5, 8)
    pm = work_marginal(joint_distribution(params, named_unitary("u2")))
    p = lambda n, m: _p(params, n, m)  # noqa: E731
    expected = {
        0.0: sum(p(k, k) for k in range(3)) + p(0, 1) + p(2, 1),
        1 - 0.5: p(1, 0) + p(2, 0),
        -1 + 0.5: p(0, 2) + p(1, 2),
    }
    assert len(pm) == 3
    for w, prob in pm:
        assert prob == pytest.approx(expected[round(w, 12)], rel=1e-12)


def test_marginal_merges_coincident_work():
    # omega_a = 2 omega_b: different level changes give the same work
    params = EngineParams(1, 0.5, 0.3, 2)
    joint = joint_distribution(params, named_unitary("u3"))
    pm = work_marginal(joint)
    assert len(pm) < len(joint)
    assert math.fsum(p for _, p in pm) == pytest.approx(1, abs=1e-14)


def test_snr_and_relative_fluctuations_edge_cases():
    stats = cycle_statistics(EngineParams(1, 1, 1, 1), named_unitary("identity"))
    assert math.isnan(stats.snr) and math.isnan(stats.relative_fluctuations)


def _alpha(params, a, b):
    x = b * params.omega_a / (a * params.omega_b)
    return x / (1 - x)


@pytest.mark.parametrize("name,combo", [("u1", (1, 1)), ("u2", (2, 1)), ("u2t", (1, 2))])
def test_moment_law_for_conserving_strokes(name, combo):
    rng = np.random.default_rng(4)
    for _ in range(10):
        params = EngineParams(1, rng.uniform(0.1, 0.45), rng.uniform(0, 2), rng.uniform(0, 2))
        joint = joint_distribution(params, named_unitary(name))
        alpha = _alpha(params, *combo)
        for j in range(5):
            for k in range(5 - j):
                lhs = moments(joint, j, k)
                rhs = alpha ** k * moments(joint, j + k, 0)
                assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_moment_law_fails_for_double_swap():
    params = EngineParams(1, 0.75, 0.5, 4)
    joint = joint_distribution(params, named_unitary("u3"))
    worst = 0.0
    for a, b in [(1, 1), (2, 1), (1, 2)]:
        alpha = _alpha(params, a, b)
        worst = max(worst, abs(moments(joint, 0, 1) - alpha * moments(joint, 1, 0)))
    assert worst > 1e-3
