import numpy as np
import pytest

from khashbound.simplex import make_prob_vector, project_simplex, sample_simplex, uniform


def test_make_prob_vector_accepts_simplex_point():
    v = make_prob_vector([0.25, 0.25, 0.25, 0.25, 0.0], 5)
    assert v.k == 5
    assert v.entries.sum() == pytest.approx(1.0, abs=1e-15)


def test_make_prob_vector_uniform_six():
    v = make_prob_vector([1 / 6] * 6, 6)
    np.testing.assert_allclose(v.entries, 1 / 6, rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "values, k",
    [([0.5, 0.6], 2), ([0.5, 0.5], 3), ([1.1, -0.1], 2), ([float("nan"), 1.0], 2)],
)
def test_make_prob_vector_rejects(values, k):
    with pytest.raises(ValueError):
        make_prob_vector(values, k)


def test_make_prob_vector_clamps_tiny_negatives():
    v = make_prob_vector([0.5 + 5e-13, 0.5, -5e-13], 3)
    assert v.entries.min() == 0.0
    assert abs(v.entries.sum() - 1) < 1e-15


def test_prob_vector_is_read_only():
    v = uniform(4)
    with pytest.raises(ValueError):
        v.entries[0] = 1.0


def test_uniform():
    np.testing.assert_array_equal(uniform(5).entries, [0.2] * 5)
    np.testing.assert_array_equal(uniform(2).entries, [0.5, 0.5])
    with pytest.raises(ValueError):
        uniform(1)


def test_sample_simplex_deterministic():
    a = sample_simplex(5, 42)
    b = sample_simplex(5, 42)
    assert a == b
    assert np.all(a.entries >= 0) and abs(a.entries.sum() - 1) < 1e-12
    with pytest.raises(ValueError):
        sample_simplex(1, 0)


def test_sample_simplex_mean_is_uniform():
    draws = sample_simplex(5, np.random.default_rng(7), size=100_000)
    np.testing.assert_allclose(draws.mean(axis=0), 0.2, atol=5e-3)


def test_project_simplex_matches_bruteforce_qp():
    from scipy.optimize import minimize

    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.normal(size=5)
        got = project_simplex(v)
        res = minimize(
            lambda x: np.sum((x - v) ** 2),
            np.full(5, 0.2),
            bounds=[(0, 1)] * 5,
            constraints=[{"type": "eq", "fun": lambda x: x.sum() - 1}],
            method="SLSQP",
            options={"ftol": 1e-14},
        )
        np.testing.assert_allclose(got, res.x, atol=1e-6)
