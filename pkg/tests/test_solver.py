import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wmfs.solver import Expansion, coefficient_norm_sweep, min_norm_lstsq, min_norm_solve


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 3))
def test_min_norm_matches_dense_oracle(seed, spread):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((20, 8)) * 10.0 ** rng.uniform(-spread, spread, 8)
    b = rng.standard_normal(20)
    exp, diag = min_norm_solve((a, b))
    oracle = np.linalg.lstsq(a, b, rcond=None)[0]
    assert np.allclose(exp.d, oracle, rtol=1e-10, atol=1e-10 * np.abs(oracle).max())
    assert diag.rank_estimate == 8
    assert exp.residual_norm == pytest.approx(np.linalg.norm(a @ oracle - b), rel=1e-10)


def test_tiny_singular_values_are_not_truncated():
    # a thresholded pseudo-inverse drops sigma = 1e-14; the solver keeps it
    rng = np.random.default_rng(3)
    u, _ = np.linalg.qr(rng.standard_normal((20, 3)))
    v, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    a = u @ np.diag([1.0, 1e-3, 1e-14]) @ v.T
    exp, diag = min_norm_solve((a, u[:, 2]))
    assert np.allclose(exp.d, 1e14 * v[:, 2], rtol=1e-2)
    assert np.allclose(np.linalg.pinv(a, rcond=1e-12) @ u[:, 2], 0, atol=1e-6)
    assert diag.rank_estimate == 3  # 1e-14 is above max(M, N) eps sigma_max


def test_residual_is_stationary(rng):
    a = rng.standard_normal((30, 12))
    b = rng.standard_normal(30)
    exp, _ = min_norm_solve((a, b))
    for _ in range(20):
        step = 1e-4 * (a.T @ rng.standard_normal(30))
        assert np.linalg.norm(a @ (exp.d + step) - b) >= exp.residual_norm - 1e-9


def test_normal_equations_oracle_full_rank():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((20, 8))
    b = rng.standard_normal(20)
    d, s = min_norm_lstsq(a, b)
    assert np.allclose(d, np.linalg.solve(a.T @ a, a.T @ b), atol=1e-10)
    assert np.all(np.diff(s) <= 0)


def test_underdetermined_gives_min_norm():
    a = np.array([[1.0, 1.0]])
    exp, _ = min_norm_solve((a, np.array([2.0])))
    assert np.allclose(exp.d, [1.0, 1.0])


def test_zero_matrix_gives_zero():
    exp, diag = min_norm_solve((np.zeros((3, 2)), np.ones(3)))
    assert np.all(exp.d == 0) and diag.rank_estimate == 0


def test_invalid_input():
    with pytest.raises(ValueError):
        min_norm_lstsq(np.array([[np.nan]]), np.ones(1))
    with pytest.raises(ValueError):
        min_norm_lstsq(np.zeros((0, 0)), np.zeros(0))


def test_expansion_pairs_real_and_imaginary_parts():
    exp = Expansion(np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.array_equal(exp.coefficients, [1 + 3j, 2 + 4j])
    back = Expansion.from_dict(exp.to_dict())
    assert np.array_equal(back.d, exp.d)


def test_diagnostics_summary():
    _, diag = min_norm_solve((np.diag([4.0, 2.0]), np.ones(2)))
    summary = diag.summary()
    assert summary["condition"] == pytest.approx(2.0)
    assert summary["residual"] == pytest.approx(0.0, abs=1e-15)


def test_norm_sweep_survives_failures():
    class Sys:
        class family:
            size = 1

    def solve_one(cfg):
        if cfg == "bad":
            raise RuntimeError("boom")
        exp, diag = min_norm_solve((np.eye(2) * cfg, np.ones(2)))
        return Sys, exp, diag

    rows = coefficient_norm_sweep([1.0, "bad", 0.5], solve_one)
    assert rows[0][1] == pytest.approx(np.sqrt(2))
    assert np.isnan(rows[1][1])
    assert rows[2][1] == pytest.approx(2 * np.sqrt(2))


def test_solution_orthogonal_to_nullspace(rng):
    a = rng.standard_normal((6, 15))
    b = a @ rng.standard_normal(15)
    exp, _ = min_norm_solve((a, b))
    _, s, vt = np.linalg.svd(a)
    null = vt[s.size:]
    for v in null:
        assert abs(exp.d @ v) <= 1e-10 * np.linalg.norm(exp.d)
    assert exp.residual_norm < 1e-12


def test_solve_is_deterministic(rng):
    a = rng.standard_normal((40, 30))
    b = rng.standard_normal(40)
    assert np.array_equal(min_norm_solve((a, b))[0].d, min_norm_solve((a, b))[0].d)
