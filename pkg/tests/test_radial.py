import math

import numpy as np
import pytest

from conefoliate.geometry import ConeParams
from conefoliate.radial import (
    H_operator,
    ModeField,
    RadialGrid,
    apply_L_cone,
    linear_dirichlet_solve,
    solve_mode_ode,
    weighted_norm_mode_field,
)
from conefoliate.spectrum import BoundaryData, make_mode

CONE = ConeParams(3, 3)
DELTA = 1.3


def make_field(grid, pairs, delta=DELTA, cone=CONE):
    entries = [(make_mode(j, k, cone), np.asarray(a, dtype=float)) for (j, k), a in pairs]
    return ModeField(cone, grid, entries, delta)


def test_grid_basics():
    grid = RadialGrid.default()
    assert grid.n == 513
    assert grid.t_max == 0.0
    assert grid.r[0] == pytest.approx(1e-4, rel=1e-12)
    assert grid.r[-1] == 1.0
    dt = np.diff(grid.t)
    np.testing.assert_allclose(dt, grid.h, rtol=1e-10)


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(t_min=1.0, t_max=0.0)
    with pytest.raises(ValueError):
        RadialGrid(t_min=-1.0, n=2)


@pytest.mark.parametrize("jk", [(1, 1), (2, 1), (2, 2), (3, 1), (4, 2)])
def test_apply_L_annihilates_indicial_solutions(jk):
    grid = RadialGrid.default(n=257)
    mode = make_mode(*jk, CONE)
    for gamma in (mode.gamma_plus, mode.gamma_minus):
        if gamma < -6:  # avoid overflow of r^{gamma} at r_min in the test
            continue
        u = make_field(grid, [(jk, np.exp(gamma * grid.t))])
        Lu = apply_L_cone(u)
        resid = Lu.entries[0][1][1:-1] * grid.r[1:-1] ** 2
        scale = np.max(np.abs(np.exp(gamma * grid.t)))
        assert np.max(np.abs(resid)) < 1e-10 * scale


def test_apply_L_exact_on_rotation_jacobi_field():
    # a(r) = r for the mu = n-1 mode is killed to round-off (relative to a/r^2)
    grid = RadialGrid.default(n=129)
    u = make_field(grid, [((2, 2), grid.r)])
    Lu = apply_L_cone(u).entries[0][1]
    rel = np.abs(Lu[1:-1]) * grid.r[1:-1]
    assert np.max(rel) < 1e-12


def test_apply_L_second_order_on_smooth():
    mode = make_mode(3, 1, CONE)
    errs = []
    for n in (65, 129, 257):
        grid = RadialGrid(t_min=-3.0, n=n)
        t = grid.t
        a = np.exp(DELTA * t) * (1.0 + 0.5 * np.sin(1.3 * t))
        u = make_field(grid, [((3, 1), a)])
        Lu = apply_L_cone(u).entries[0][1]
        # exact operator value
        a1 = np.exp(DELTA * t) * (DELTA * (1 + 0.5 * np.sin(1.3 * t)) + 0.65 * np.cos(1.3 * t))
        a2 = np.exp(DELTA * t) * (
            DELTA**2 * (1 + 0.5 * np.sin(1.3 * t))
            + 2 * DELTA * 0.65 * np.cos(1.3 * t)
            - 0.5 * 1.3**2 * np.sin(1.3 * t)
        )
        exact = (a2 + (CONE.n - 2) * a1 - mode.mu * a) / grid.r**2
        errs.append(np.max(np.abs((Lu - exact)[1:-1] * grid.r[1:-1] ** 2)))
    order1 = math.log2(errs[0] / errs[1])
    order2 = math.log2(errs[1] / errs[2])
    assert 1.7 < order1 < 2.3
    assert 1.7 < order2 < 2.3


def test_apply_L_scaling_identity():
    # L(u_r) = r^2 (L u)_r realized as a grid shift by k nodes
    grid = RadialGrid(t_min=-6.0, n=241)
    t = grid.t
    a = np.exp(DELTA * t) * (1.0 + 0.3 * np.cos(t))
    u = make_field(grid, [((3, 1), a)])
    Lu = apply_L_cone(u).entries[0][1]
    k = 17
    tau = k * grid.h  # u_r with r = e^tau: samples shift
    a_shift = np.empty_like(a)
    a_shift[: grid.n - k] = a[k:]
    u_shift = make_field(grid, [((3, 1), a_shift)])
    Lu_shift = apply_L_cone(u_shift).entries[0][1]
    lhs = Lu_shift[1 : grid.n - k - 1]
    rhs = math.exp(tau) ** 2 * Lu[k + 1 : -1]
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_solve_mode_homogeneous_graphical():
    grid = RadialGrid.default(n=257)
    mode = make_mode(3, 1, CONE)
    a = solve_mode_ode(mode, np.zeros(grid.n), 1.0, DELTA, grid, CONE)
    np.testing.assert_allclose(a, np.exp(mode.gamma_plus * grid.t), atol=1e-9)


def test_solve_mode_projected_low_mode_zero():
    grid = RadialGrid.default(n=257)
    mode = make_mode(1, 1, CONE)
    a = solve_mode_ode(mode, np.zeros(grid.n), 5.0, DELTA, grid, CONE)
    assert np.max(np.abs(a)) < 1e-12


@pytest.mark.parametrize("jk", [(1, 1), (2, 1), (3, 1)])
def test_solve_mode_power_law_oracle(jk):
    # indicial substitution: f = r^sigma gives a = r^{sigma+2}/rho(sigma+2),
    # reproduced to O(h^2) and improving under refinement
    mode = make_mode(*jk, CONE)
    sigma = DELTA - 2.0
    c = 1.0 / ((sigma + 2) ** 2 + (CONE.n - 2) * (sigma + 2) - mode.mu)
    errs = []
    for n in (257, 1025):
        grid = RadialGrid.default(n=n)
        f = grid.r**sigma
        a = solve_mode_ode(mode, f, c if mode.graphical else 0.0, DELTA, grid, CONE)
        expect = c * grid.r ** (sigma + 2.0)
        errs.append(np.max(np.abs(a - expect) / np.abs(expect)))
    assert errs[0] < 0.05
    assert errs[1] < errs[0] / 10.0  # two doublings: ~16x for O(h^2)


def test_solve_mode_discrete_exactness():
    # interior rows of the fitted stencil are solved exactly
    grid = RadialGrid.default(n=129)
    mode = make_mode(3, 1, CONE)
    rng = np.random.default_rng(0)
    f = grid.r ** (DELTA - 2.0) * (1.0 + 0.2 * np.sin(3 * grid.t))
    a = solve_mode_ode(mode, f, 0.7, DELTA, grid, CONE)
    u = make_field(grid, [((3, 1), a)])
    Lu = apply_L_cone(u).entries[0][1]
    resid = (Lu - f)[1:-1]
    assert np.max(np.abs(resid)) < 1e-10 * np.max(np.abs(f))
    assert a[-1] == pytest.approx(0.7, abs=1e-12)


def test_solve_mode_delta_validation():
    grid = RadialGrid.default(n=65)
    mode = make_mode(3, 1, CONE)
    with pytest.raises(ValueError):
        solve_mode_ode(mode, np.zeros(grid.n), 0.0, 1.0, grid, CONE)
    with pytest.raises(ValueError):
        solve_mode_ode(mode, np.zeros(grid.n), 0.0, 1.7, grid, CONE)


def test_H_operator_drops_and_decays():
    grid = RadialGrid.default(n=129)
    g = BoundaryData.from_pairs(CONE, [((1, 1), 3.0), ((2, 1), 1.0), ((3, 1), 2.0)])
    Hg = H_operator(g, grid, DELTA)
    assert len(Hg.entries) == 1
    m, a = Hg.entries[0]
    assert (m.j, m.k) == (3, 1)
    np.testing.assert_allclose(a, 2.0 * np.exp(m.gamma_plus * grid.t), atol=1e-14)


def test_H_operator_constant_gives_zero():
    grid = RadialGrid.default(n=65)
    g = BoundaryData.from_pairs(CONE, [((1, 1), 1.0)])
    Hg = H_operator(g, grid, DELTA)
    assert not Hg.entries


def test_H_norm_peaks_at_outermost_annulus():
    grid = RadialGrid.default(n=513)
    g = BoundaryData.from_pairs(CONE, [((3, 1), 1.0)])
    Hg = H_operator(g, grid, DELTA)
    rep = weighted_norm_mode_field(Hg, 0, 0.0, DELTA)
    peak = rep.peak_annulus()
    outermost = max(rep.annuli, key=lambda a: a[1])
    assert peak[:2] == outermost[:2]
    assert math.isfinite(rep.value)


def test_linear_solve_f_zero_matches_H():
    grid = RadialGrid.default(n=129)
    g = BoundaryData.from_pairs(CONE, [((3, 1), 0.8), ((1, 1), 2.0)])
    u, rep = linear_dirichlet_solve(None, g, DELTA, grid, CONE)
    Hg = H_operator(g, grid, DELTA)
    np.testing.assert_allclose(u.coefficient(3, 1), Hg.coefficient(3, 1), atol=1e-10)
    assert np.max(np.abs(u.coefficient(1, 1))) < 1e-12
    assert rep.discarded_boundary == {(1, 1): 2.0}


def test_linear_solve_pure_low_mode_with_pi_zero_is_zero():
    grid = RadialGrid.default(n=129)
    g = BoundaryData.from_pairs(CONE, [((1, 1), 1.0), ((2, 1), -0.5), ((2, 2), 0.3)])
    u, _ = linear_dirichlet_solve(None, g, DELTA, grid, CONE)
    for _, a in u.entries:
        assert np.max(np.abs(a)) == 0.0


def test_linear_solve_low_mode_source_decays_and_projects():
    grid = RadialGrid.default(n=257)
    f = make_field(grid, [((1, 1), grid.r ** (DELTA - 2.0)), ((2, 1), grid.r ** (DELTA - 2.0))])
    g = BoundaryData.from_pairs(CONE, [])
    u, _ = linear_dirichlet_solve(f, g, DELTA, grid, CONE)
    trace = u.trace()
    pi_trace = trace.project_pi()
    assert all(abs(c) < 1e-12 for _, c in pi_trace.entries)
    for _, a in u.entries:
        # decay at rate delta: compare innermost to outermost magnitudes
        ratio = abs(a[0]) / max(abs(a[-1]), 1e-300)
        assert ratio < 2.0 * grid.r[0] ** DELTA / grid.r[-1] ** DELTA


def test_linear_solve_linearity():
    grid = RadialGrid.default(n=129)
    rng = np.random.default_rng(1)
    f1 = make_field(grid, [((3, 1), grid.r**(DELTA - 2) * rng.standard_normal() )])
    f2 = make_field(grid, [((3, 1), grid.r**(DELTA - 2) * 0.3), ((2, 1), grid.r**(DELTA - 2))])
    g1 = BoundaryData.from_pairs(CONE, [((3, 1), 0.5)])
    g2 = BoundaryData.from_pairs(CONE, [((4, 1), -0.2)])
    u1, _ = linear_dirichlet_solve(f1, g1, DELTA, grid, CONE)
    u2, _ = linear_dirichlet_solve(f2, g2, DELTA, grid, CONE)
    u12, _ = linear_dirichlet_solve(f1 + f2, g1 + g2, DELTA, grid, CONE)
    for m, a in u12.entries:
        np.testing.assert_allclose(
            a, u1.coefficient(m.j, m.k) + u2.coefficient(m.j, m.k), atol=1e-11
        )


def test_linear_solve_manufactured_convergence_order():
    # manufactured smooth solution, measured against the continuum operator
    mode_jk = (3, 1)
    mode = make_mode(*mode_jk, CONE)
    errs = []
    for n in (129, 257, 513):
        grid = RadialGrid.default(n=n)
        t = grid.t
        a_exact = np.exp(DELTA * t) * (1.0 + 0.3 * np.sin(0.7 * t))
        a1 = np.exp(DELTA * t) * (
            DELTA * (1 + 0.3 * np.sin(0.7 * t)) + 0.21 * np.cos(0.7 * t)
        )
        a2 = np.exp(DELTA * t) * (
            DELTA**2 * (1 + 0.3 * np.sin(0.7 * t))
            + 2 * DELTA * 0.21 * np.cos(0.7 * t)
            - 0.3 * 0.49 * np.sin(0.7 * t)
        )
        f = (a2 + (CONE.n - 2) * a1 - mode.mu * a_exact) / grid.r**2
        a = solve_mode_ode(mode, f, a_exact[-1], DELTA, grid, CONE, check_decay=False)
        errs.append(np.max(np.abs(a - a_exact) / np.exp(DELTA * t)))
    o1 = math.log2(errs[0] / errs[1])
    o2 = math.log2(errs[1] / errs[2])
    assert 1.8 <= o1 <= 2.2
    assert 1.8 <= o2 <= 2.2


def test_weighted_norm_homogeneous_flat_profile():
    grid = RadialGrid.default(n=513)
    u = make_field(grid, [((3, 1), grid.r**DELTA)])
    rep = weighted_norm_mode_field(u, 0, 0.0, DELTA)
    vals = np.array([v for _, _, v in rep.annuli])
    # flat up to node quantization against the annulus edges (~ delta * h)
    assert np.max(vals) / np.min(vals) < 1.05


def test_weighted_norm_faster_decay_shrinks_inward():
    grid = RadialGrid.default(n=513)
    u = make_field(grid, [((3, 1), grid.r ** (DELTA + 0.5))])
    rep = weighted_norm_mode_field(u, 0, 0.0, DELTA)
    annuli = sorted(rep.annuli, key=lambda a: a[0])  # inner to outer
    vals = [v for _, _, v in annuli]
    assert all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))


def test_weighted_norm_gradient_inequality():
    grid = RadialGrid.default(n=513)
    rng = np.random.default_rng(4)
    for _ in range(5):
        c = rng.standard_normal(3)
        a = grid.r**DELTA * (c[0] + c[1] * np.sin(grid.t) + c[2] * np.cos(2 * grid.t))
        u = make_field(grid, [((3, 1), a)])
        da = np.gradient(a, grid.h) / grid.r  # radial derivative as a field
        du = make_field(grid, [((3, 1), da)], delta=DELTA - 1)
        lhs = weighted_norm_mode_field(du, 1, 0.5, DELTA - 1).value
        rhs = weighted_norm_mode_field(u, 2, 0.5, DELTA).value
        assert lhs <= 4.0 * rhs  # C = 4 comfortably covers the estimator


def test_weighted_norm_too_coarse():
    grid = RadialGrid(t_min=-8.0, n=9)
    u = make_field(grid, [((3, 1), grid.r**DELTA)])
    with pytest.raises(ValueError):
        weighted_norm_mode_field(u, 2, 0.5, DELTA)
