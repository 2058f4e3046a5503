"""Smoke tests for the covsel python module (numpy interop + determinism)."""

import numpy as np
import pytest

import covsel


def test_vec_is_column_major():
    a = np.array([[1.0, 3.0], [2.0, 4.0]])
    assert np.array_equal(covsel.vec(a), np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.array_equal(covsel.vec(a), a.ravel(order="F"))


def test_unvec_round_trip():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 5))
    assert np.array_equal(covsel.unvec(covsel.vec(a), 3, 5), a)
    with pytest.raises(ValueError):
        covsel.unvec(np.zeros(7), 2, 3)


def test_kron_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((2, 3))
    b = rng.standard_normal((4, 2))
    assert np.allclose(covsel.kron(a, b), np.kron(a, b), rtol=0, atol=0)


def test_frobenius_inner():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4))
    assert covsel.frobenius_inner(a, b) == pytest.approx(np.sum(a * b), rel=1e-12)


def test_pseudo_inverse_matches_numpy():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 4))
    assert np.allclose(covsel.pseudo_inverse(a), np.linalg.pinv(a), atol=1e-10)


def test_projector_properties():
    rng = np.random.default_rng(4)
    g = rng.standard_normal((7, 3))
    pi, rank = covsel.projector(g)
    assert rank == 3
    assert np.allclose(pi @ pi, pi, atol=1e-10)
    assert np.allclose(pi @ g, g, atol=1e-10)


def test_design_matrix_and_basis():
    pts = covsel.equispaced_points(5)
    assert pts[0] == 0.0 and pts[-1] == 1.0
    g = covsel.design_matrix("cosine", 3, pts)
    assert g.shape == (5, 3)
    assert g[2, 1] == pytest.approx(np.cos(2 * np.pi * 0.5), abs=1e-14)
    assert covsel.eval_basis("brownian-bridge", 1, 0.5) == pytest.approx(np.sqrt(2.0))


def test_empirical_covariance():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((20, 4))
    pts = covsel.equispaced_points(4)
    s = covsel.empirical_covariance(x, pts)
    assert np.allclose(s, x.T @ x / 20, atol=1e-12)


def test_select_model_shape_and_determinism():
    sim = covsel.simulate_example("ex2", seed=11, n=200)
    x = np.asarray(sim["data"])
    assert x.shape == (200, 40)
    res1 = covsel.select_model(x, sim["points"], "cosine", 10)
    res2 = covsel.select_model(x, sim["points"], "cosine", 10)
    assert res1["m_hat"] == res2["m_hat"]
    assert len(res1["scores"]) == 10
    ure = [s["ure"] for s in res1["scores"]]
    assert res1["m_hat"] == int(np.argmin(ure)) + 1
    for s in res1["scores"]:
        assert s["ure"] == pytest.approx(s["residual_sq"] + 2 * s["gamma_sq"] / 200, rel=1e-12)
    sigma_hat = np.asarray(res1["sigma_hat"])
    assert np.allclose(sigma_hat, sigma_hat.T)


def test_simulate_example_reproducible():
    a = covsel.simulate_example("ex3", seed=9)
    b = covsel.simulate_example("ex3", seed=9)
    assert np.array_equal(np.asarray(a["data"]), np.asarray(b["data"]))
    sigma = np.asarray(a["sigma_true"])
    t = np.asarray(a["points"])
    expected = np.minimum.outer(t, t) * (1 - np.maximum.outer(t, t))
    assert np.allclose(sigma, expected, atol=1e-14)


def test_risk_curve_example():
    curve = covsel.risk_curve_example("ex3", seed=5, reps=150, threads=2)
    risk = np.asarray(curve["risk"])
    assert risk.shape == (20,)
    assert curve["m0"] == int(np.argmin(risk)) + 1
    gap = np.abs(risk - np.asarray(curve["bias_sq"]) - np.asarray(curve["variance_term"]))
    assert np.all(gap <= 4 * np.asarray(curve["std_err"]))
