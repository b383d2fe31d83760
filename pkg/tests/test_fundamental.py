"""Fundamental field solvers: march, fixed point, dual march, a-priori bounds."""

import math

import numpy as np
import pytest

from fracfund import (
    CauchyProblem,
    Coefficient,
    DomainError,
    Forcing,
    GridMismatchError,
    NonConvergenceError,
    TriangleGrid,
    bounds,
    gamma,
    solve_F,
    solve_F_picard,
    solve_G_dual,
    z_value,
)
from fracfund.operators import op_constants
from fracfund.oracle import constant_coeff_F


def _ivp(A, n=2, alpha=0.5, theta=1.0, w0=None):
    if w0 is None:
        w0 = np.zeros(n)
        w0[0] = 1.0
    return CauchyProblem.from_initial_value(alpha, 0.0, theta, A, Forcing.zero(n), w0)


def test_triangle_grid():
    g = TriangleGrid(0.0, 2.0, 4)
    assert g.h == 0.5
    np.testing.assert_array_equal(g.t, [0.0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(DomainError):
        TriangleGrid(1.0, 1.0, 4)
    with pytest.raises(DomainError):
        TriangleGrid(0.0, 1.0, 0)


def test_zero_coefficient_all_routes_exact():
    # with A = 0 every route reduces to the diagonal value identically
    p = _ivp(Coefficient.zero(2), alpha=0.35)
    g = TriangleGrid(0.0, 1.0, 24)
    diag = np.eye(2) / gamma(0.35)
    for F in (solve_F(p, g), solve_G_dual(p, g), solve_F_picard(p, g)):
        ii, jj = np.tril_indices(25)
        assert np.array_equal(F.values[ii, jj], np.broadcast_to(diag, (ii.size, 2, 2)))


def test_diagonal_and_mask():
    p = _ivp(Coefficient.cosine(np.array([[0.0, 1.0], [-1.0, 0.0]]), 4.0))
    g = TriangleGrid(0.0, 1.0, 16)
    F = solve_F(p, g)
    diag = np.eye(2) / gamma(0.5)
    for i in range(17):
        np.testing.assert_array_equal(F.at(i, i), diag)
    assert np.all(np.isnan(F.values[np.triu_indices(17, 1)]))


def test_at_and_z_value_guards():
    p = _ivp(Coefficient.zero(1), n=1)
    F = solve_F(p, TriangleGrid(0.0, 1.0, 8))
    with pytest.raises(DomainError):
        F.at(2, 5)
    with pytest.raises(DomainError):
        z_value(F, 3, 3)
    # A = 0 makes the normalized value Id/(gamma(alpha) dt^(1-alpha))
    got = z_value(F, 6, 2)[0, 0]
    assert got == pytest.approx(1.0 / (gamma(0.5) * 0.5 ** 0.5), rel=1e-14)


def test_constant_scalar_matches_ml_oracle():
    lam, alpha, N = 0.8, 0.6, 256
    p = _ivp(Coefficient.constant([[lam]]), n=1, alpha=alpha)
    g = TriangleGrid(0.0, 1.0, N)
    F = solve_F(p, g)
    A0 = np.array([[lam]])
    dev = max(
        abs(F.at(i, 0)[0, 0] - constant_coeff_F(A0, alpha, i * g.h)[0, 0])
        for i in range(N + 1)
    )
    assert dev < 2e-3  # measured 6.0e-4


def test_march_vs_picard():
    p = _ivp(Coefficient.rotation())
    g = TriangleGrid(0.0, 1.0, 96)
    Fm = solve_F(p, g)
    Fp = solve_F_picard(p, g, tol=1e-12)
    assert np.nanmax(np.abs(Fm.values - Fp.values)) < 1e-7  # measured 6.7e-9
    assert Fp.meta["iterations"] > 1
    assert Fp.meta["weighted_residual"] <= 1e-12


def test_duality_cross_check():
    # left and right discretizations of the same field agree to scheme error
    A = Coefficient.cosine(np.array([[0.0, 1.0], [-1.0, 0.0]]), 4.0)
    p = _ivp(A)
    g = TriangleGrid(0.0, 1.0, 128)
    F = solve_F(p, g)
    G = solve_G_dual(p, g)
    assert np.nanmax(np.abs(F.values - G.values)) < 5e-3  # measured 1.2e-3


def test_thread_count_is_invisible(monkeypatch):
    A = Coefficient.cosine(np.array([[0.2, 1.0], [-1.0, 0.1]]), 3.0)
    p = _ivp(A)
    g = TriangleGrid(0.0, 1.0, 64)
    monkeypatch.setenv("FRACFUND_THREADS", "1")
    F1 = solve_F(p, g)
    G1 = solve_G_dual(p, g)
    monkeypatch.setenv("FRACFUND_THREADS", "4")
    F4 = solve_F(p, g)
    G4 = solve_G_dual(p, g)
    assert np.array_equal(F1.values, F4.values, equal_nan=True)
    assert np.array_equal(G1.values, G4.values, equal_nan=True)


def test_field_csv_layout(tmp_path):
    p = _ivp(Coefficient.rotation())
    N = 12
    F = solve_F(p, TriangleGrid(0.0, 1.0, N))
    path = tmp_path / "field.csv"
    F.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,s,F_11,F_12,F_21,F_22"
    assert len(lines) == (N + 1) * (N + 2) // 2 + 1


def test_grid_interval_must_match():
    p = _ivp(Coefficient.rotation())
    with pytest.raises(GridMismatchError):
        solve_F(p, TriangleGrid(0.0, 2.0, 16))


def test_picard_budget():
    p = _ivp(Coefficient.rotation())
    with pytest.raises(NonConvergenceError):
        solve_F_picard(p, TriangleGrid(0.0, 1.0, 32), max_iter=1)


def test_meta_contents():
    p = _ivp(Coefficient.rotation())
    g = TriangleGrid(0.0, 1.0, 16)
    m = solve_F(p, g).meta
    assert m["method"] == "march" and m["N"] == 16 and m["wall_time"] >= 0.0
    d = solve_G_dual(p, g).meta
    assert d["method"] == "dual_march"


# ------------------------------------------------------------------- bounds


def test_bounds_zero_coefficient():
    p = _ivp(Coefficient.zero(2), alpha=0.4)
    apb = bounds(p)
    assert apb.M_A == 0.0
    assert apb.kappa == 1.0
    assert apb.M_F == pytest.approx(math.exp(1.0) / gamma(0.4), rel=1e-14)
    assert apb.H_F == 0.0


def test_bounds_rotation_structure():
    alpha, scale = 0.5, 2.0
    p = _ivp(Coefficient.rotation(scale), alpha=alpha)
    apb = bounds(p)
    assert apb.M_A == scale  # max row sum of the skew block
    c = op_constants(alpha)
    assert apb.kappa == pytest.approx((2.0 * scale * c.M_J) ** (1.0 / alpha), rel=1e-14)
    assert apb.M_F > 1.0 / gamma(alpha)
    assert np.isfinite(apb.H_F) and apb.H_F > 0.0


def test_bounds_overflow_guard():
    # growth exponent past the double range degrades to inf, never raises
    p = _ivp(Coefficient.rotation(9.0))
    apb = bounds(p)
    assert math.isinf(apb.M_F)
    assert math.isinf(apb.H_F)
