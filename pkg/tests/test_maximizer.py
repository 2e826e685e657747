import math

import numpy as np
import pytest

from khashbound.maximizer import (
    FAMILIES,
    N_PARAMS,
    CasePoint,
    Method,
    case_point,
    compute_Mk,
    constrained_psi_max,
    family_bounds,
    global_check,
    maximize_case,
)
from khashbound.psipoly import big_psi, psi
from khashbound.simplex import sample_simplex

DELTA5 = (4 + math.sqrt(5)) / 44
M5 = 15 * (48 + math.sqrt(5)) / 1936


@pytest.fixture(scope="module")
def mk5():
    return compute_Mk(5)


@pytest.fixture(scope="module")
def mk6():
    return compute_Mk(6)


def test_case_point_a():
    p, q = case_point("a", 6)
    np.testing.assert_array_equal(p.entries, [1, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(q.entries, [0] + [0.2] * 5, rtol=0, atol=1e-16)


def test_case_point_b():
    p, q = case_point("b", 5)
    np.testing.assert_allclose(p.entries, 0.2, rtol=0, atol=1e-16)
    assert p == q


def test_case_point_g():
    p, q = CasePoint("g", 5, (DELTA5,)).materialize()
    np.testing.assert_allclose(p.entries, [0, 0.25, 0.25, 0.25, 0.25], atol=1e-16)
    np.testing.assert_allclose(q.entries, [1 - 4 * DELTA5] + [DELTA5] * 4, atol=1e-16)


@pytest.mark.parametrize(
    "family, k, params, zp, zq",
    [
        ("c", 6, (0.2, 0.3), [0, 1], [4, 5]),
        ("d", 6, (0.2, 0.2), [0, 1], [5]),
        ("e", 7, (0.1,), [0, 1], []),
        ("f", 5, (0.2, 0.1), [0], [4]),
        ("g", 6, (0.1,), [0], []),
    ],
)
def test_zero_patterns_and_constraints(family, k, params, zp, zq):
    p, q = case_point(family, k, params)
    assert all(p.entries[j] == 0.0 for j in zp)
    assert all(q.entries[j] == 0.0 for j in zq)
    assert abs(p.entries.sum() - 1) < 1e-15 and abs(q.entries.sum() - 1) < 1e-15


def test_case_c_linear_constraints():
    k, alpha, delta = 7, 0.1, 0.2
    p, q = case_point("c", k, (alpha, delta))
    beta, gamma = p.entries[-1], q.entries[0]
    assert (k - 4) * alpha + 2 * beta == pytest.approx(1, abs=1e-15)
    assert 2 * gamma + (k - 4) * delta == pytest.approx(1, abs=1e-15)


def test_case_point_errors():
    with pytest.raises(ValueError):
        case_point("g", 5, (0.3,))  # gamma = 1 - 4 * 0.3 < 0
    with pytest.raises(ValueError):
        case_point("h", 5)
    with pytest.raises(ValueError):
        case_point("c", 5, (0.1,))
    with pytest.raises(ValueError):
        case_point("a", 4)


@pytest.mark.parametrize("k", [5, 6, 7])
@pytest.mark.parametrize("family", [f for f in FAMILIES if N_PARAMS[f]])
def test_family_grid_points_are_valid(family, k):
    bounds = family_bounds(family, k)
    axes = [np.linspace(lo, hi, 21) for lo, hi in bounds]
    for params in np.array(np.meshgrid(*axes)).reshape(len(axes), -1).T:
        case_point(family, k, params)


def test_maximize_case_g5():
    res = maximize_case("g", 5, 1000, 1e-12)
    assert res.value == pytest.approx(M5, abs=1e-12)
    assert res.params[0] == pytest.approx(DELTA5, abs=1e-9)
    assert res.method is Method.GRID_POLISH


def test_maximize_case_closed_forms():
    assert maximize_case("a", 6).value == pytest.approx(24 / 125, abs=1e-15)
    b = maximize_case("b", 5)
    assert b.method is Method.CLOSED_FORM
    assert b.value == pytest.approx(big_psi(*case_point("b", 5)), abs=0)
    assert b.value == pytest.approx(2 * 120 / 625, abs=1e-15)


def test_maximize_case_rejects_coarse_grid():
    with pytest.raises(ValueError):
        maximize_case("g", 5, grid_steps=50)


def test_mk5(mk5):
    assert mk5.family == "g"
    assert abs(mk5.value - M5) <= 1e-9
    assert abs(mk5.value - big_psi(*case_point("g", 5, (DELTA5,)))) <= 1e-9
    d = mk5.params[0]
    assert abs(198 * d * d - 36 * d + 9 / 8) <= 1e-8
    assert mk5.certified


def test_mk6(mk6):
    assert mk6.family == "a"
    assert abs(mk6.value - 24 / 125) <= 1e-9
    assert mk6.certified


@pytest.mark.parametrize("res_name", ["mk5", "mk6"])
def test_maxresult_invariants(res_name, request):
    res = request.getfixturevalue(res_name)
    assert abs(big_psi(*res.argmax) - res.value) <= 1e-10
    assert set(res.candidates) == set(FAMILIES)
    assert max(res.candidates.values()) <= res.value + 1e-12


def test_mk7_is_flagged_case_a():
    res = compute_Mk(7)
    assert not res.certified
    assert res.family == "a"
    # case (a): only psi(q, p) survives, 5! * 6 * (1/6)^5
    assert res.value == pytest.approx(720 / 7776, abs=1e-12)


def test_compute_mk_rejects_small_k():
    with pytest.raises(ValueError):
        compute_Mk(4)


def test_global_check_few_starts():
    rep = global_check(5, 10, 0)
    assert rep.max_found <= M5 + 1e-7
    assert not rep.exceeded


def test_global_check_deterministic():
    a = global_check(6, 200, 11)
    b = global_check(6, 200, 11)
    assert a.to_dict() == b.to_dict()


def test_global_check_rejects_uncertified_k():
    with pytest.raises(ValueError):
        global_check(7, 100, 0)


def test_constrained_uniform_floor():
    res = constrained_psi_max(5, 0.2)
    g, f = res.argmax
    np.testing.assert_allclose(f.entries, 0.2, atol=1e-15)
    at_uniform = psi(np.full(5, 0.2), f)
    assert at_uniform == pytest.approx(0.192, abs=1e-15)
    assert res.value >= at_uniform - 1e-15


def test_constrained_zero_floor():
    res = constrained_psi_max(5, 0.0)
    np.testing.assert_array_equal(res.argmax[1].entries, [0, 0, 0, 0, 1])
    # psi(g, e_5) = 3! * e_3(g_1..g_4), largest at g = (1/4, ..., 1/4, 0)
    assert res.value == pytest.approx(6 * 4 / 64, abs=1e-14)


def test_constrained_errors():
    with pytest.raises(ValueError):
        constrained_psi_max(5, 0.25)
    with pytest.raises(ValueError):
        constrained_psi_max(5, -0.01)


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.15, 0.2])
def test_constrained_dominates_random_points(gamma):
    rng = np.random.default_rng(int(gamma * 100))
    k = 5
    bound = constrained_psi_max(k, gamma).value
    g = sample_simplex(k, rng, 1000)
    f = gamma + (1 - k * gamma) * sample_simplex(k, rng, 1000)
    assert np.all(psi(g, f) <= bound + 1e-9)


@pytest.mark.parametrize("gamma", [0.0, 0.07, 0.15])
def test_constrained_dominates_local_optima(gamma):
    # SLSQP over the full (g, f) space from random starts
    from scipy.optimize import minimize

    from khashbound.psipoly import psi_grad

    k = 5
    bound = constrained_psi_max(k, gamma).value
    rng = np.random.default_rng(1)
    cons = [
        {"type": "eq", "fun": lambda x: x[:k].sum() - 1},
        {"type": "eq", "fun": lambda x: x[k:].sum() - 1},
    ]
    best = 0.0
    for _ in range(30):
        x0 = np.r_[rng.dirichlet(np.ones(k)), gamma + (1 - k * gamma) * rng.dirichlet(np.ones(k))]
        res = minimize(
            lambda x: -psi(x[:k], x[k:]),
            x0,
            jac=lambda x: -np.concatenate(psi_grad(x[:k], x[k:])),
            bounds=[(0, 1)] * k + [(gamma, 1)] * k,
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 500},
        )
        best = max(best, -res.fun)
    assert best <= bound + 1e-7


def test_constrained_monotone_in_gamma():
    gammas = np.linspace(0, 0.2, 21)
    vals = [constrained_psi_max(5, g).value for g in gammas]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
