"""Numerical gauge-law checks on sampled matrix-group chart data."""

import numpy as np
import pytest

from xmodgerbe.gauge import (DEFAULT_TOLS, GaugeChartData, MatrixCrossedModule,
                             MatrixGroupDesc, QuadOverlap, Residual,
                             _central_diff, builtin_cases, case_trivial,
                             case_u1_circle_three, case_u1_torus_three,
                             check_bfield, check_connection,
                             check_gerbe_cocycle_smooth, compute_T,
                             conjugation_T_samples, curvature_and_nu,
                             matrix_exp, run_case, so3_conjugation_xmod,
                             so3_group, u1_group, u1_id_xmod, u1_null_xmod,
                             validate_chart_data, validate_matrix_xmod)
from xmodgerbe.util import StructureError


# ---------------------------------------------------------------------------
# matrix building blocks


def test_matrix_exp_basics():
    z = np.zeros((3, 3), dtype=np.complex128)
    assert np.allclose(matrix_exp(z), np.eye(3))
    rng = np.random.default_rng(0)
    a = so3_group().algebra(rng.normal(size=3))
    e = matrix_exp(a)
    assert np.allclose(e @ matrix_exp(-a), np.eye(3), atol=1e-12)
    # against a plain truncated series on a small-norm argument
    small = 0.05 * a
    series = np.eye(3, dtype=np.complex128)
    term = np.eye(3, dtype=np.complex128)
    for k in range(1, 25):
        term = term @ small / k
        series = series + term
    assert np.allclose(matrix_exp(small), series, atol=1e-14)
    # broadcasting over a stack
    stack = np.stack([a, -a, 0.5 * a])
    es = matrix_exp(stack)
    assert es.shape == (3, 3, 3)
    assert np.allclose(es[1], matrix_exp(-a))


def test_builtin_matrix_xmods_validate():
    for xm in (u1_id_xmod(), u1_null_xmod(), so3_conjugation_xmod()):
        rep = validate_matrix_xmod(xm)
        assert rep.ok, (xm.name, rep.summary())


def test_broken_matrix_xmod_fails_peiffer():
    so3 = so3_group()
    bad = MatrixCrossedModule("so3-broken", so3, so3,
                              alpha=lambda h: h,
                              action=lambda d, h: h)
    rep = validate_matrix_xmod(bad)
    assert not rep.ok
    assert any("peiffer" in name for name, ok in rep.checks if not ok)


def test_compute_T_closed_form():
    xm = so3_conjugation_xmod()
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = so3_group().algebra(rng.normal(size=3))
        h = so3_group().random(rng)
        t = compute_T(x, h, xm)
        closed = h @ x @ np.linalg.inv(h) - x
        assert np.max(np.abs(t - closed)) < 1e-6
    # at the identity the curve is constant
    t0 = compute_T(x, np.eye(3, dtype=np.complex128), xm)
    assert np.max(np.abs(t0)) < 1e-9


def test_compute_T_trivial_action_vanishes():
    xm = u1_id_xmod()
    x = np.array([[0.7j]])
    h = np.array([[np.exp(0.3j)]])
    assert np.max(np.abs(compute_T(x, h, xm))) < 1e-12


def test_conjugation_T_sample_run():
    res = conjugation_T_samples(samples=100, seed=11)
    assert res.max() < 1e-6


# ---------------------------------------------------------------------------
# derivative helper and residual container


def test_central_diff_periodic_and_interior():
    m = 64
    theta = np.arange(m) * (2 * np.pi / m)
    vals = np.exp(2j * theta).reshape(m, 1, 1)
    der, valid = _central_diff(vals, (m,), 0, 2 * np.pi / m, periodic=True)
    assert valid.all()
    want = 2j * np.exp(2j * theta).reshape(m, 1, 1)
    assert np.max(np.abs(der - want)) < 2e-2
    der2, valid2 = _central_diff(vals, (m,), 0, 2 * np.pi / m, periodic=False)
    assert not valid2[0] and not valid2[-1] and valid2[1:-1].all()
    assert np.max(np.abs((der2 - want)[1:-1])) < 2e-2


def test_residual_summaries():
    r = Residual("empty")
    r.add("eq", np.zeros(0))
    assert r.max() == 0.0 and r.rms() == 0.0
    r2 = Residual("two")
    r2.add("eq", np.array([[3.0 + 4.0j]]))
    r2.add("eq", np.array([[0.0]]))
    assert r2.max() == 5.0
    d = r2.dictionary()
    assert d["equations"]["eq"]["samples"] == 2


# ---------------------------------------------------------------------------
# bundled analytic cases


def test_all_builtin_cases_pass():
    for name in sorted(builtin_cases()) + ["so3-conjugation-T"]:
        out = run_case(name)
        assert out["passed"], (name, out["residuals"])


def test_trivial_case_is_exact():
    out = run_case("trivial")
    assert out["residuals"]["cocycle"]["max"] == 0.0
    assert out["residuals"]["connection"]["max"] == 0.0


def test_torus_case_exact_except_curvature():
    out = run_case("u1-torus-three")
    assert out["residuals"]["connection"]["max"] < 1e-12
    assert out["residuals"]["bfield"]["max"] < 1e-12
    assert out["nu_gluing_asserted"]
    assert 0 < out["residuals"]["nu-gluing"]["max"] <= DEFAULT_TOLS[2]


def test_circle_cases_meet_tight_tolerance():
    for name in ("u1-circle-pair", "u1-circle-three"):
        out = run_case(name)
        for res in out["residuals"].values():
            assert res["max"] < 1e-6, (name, out["residuals"])


def test_step_halving_quadratic_convergence():
    coarse = run_case("u1-circle-pair", step=1e-3)
    fine = run_case("u1-circle-pair", step=5e-4)
    c = coarse["residuals"]["connection"]["max"]
    f = fine["residuals"]["connection"]["max"]
    assert f > 0
    assert c / f >= 3.5


def test_unknown_case_rejected():
    with pytest.raises(StructureError):
        run_case("no-such-case")


# ---------------------------------------------------------------------------
# negative controls: perturbed fields must surface in the right residual


def _perturbed(case_builder, mutate):
    gcd = case_builder()
    mutate(gcd)
    return gcd


def test_position_dependent_h_perturbation_caught():
    def mutate(gcd):
        t = gcd.triples[0]
        theta = gcd.charts[t.a].grid[t.ia][:, 0]
        t.h = t.h * np.exp(1j * 1e-3 * np.sin(theta))[:, None, None]

    gcd = _perturbed(case_u1_circle_three, mutate)
    res = check_connection(gcd)
    assert res.max() > 2e-4


def test_position_dependent_d_perturbation_caught():
    def mutate(gcd):
        o = gcd.overlaps[0]
        theta = gcd.charts[o.a].grid[o.ia][:, 0]
        o.d = o.d * np.exp(1j * 2e-3 * np.sin(theta))[:, None, None]

    gcd = _perturbed(case_u1_circle_three, mutate)
    res = check_connection(gcd)
    assert res.max() > 5e-4


def test_constant_d_perturbation_caught_by_triangle():
    def mutate(gcd):
        o = gcd.overlaps[0]
        o.d = o.d * np.exp(1e-3j)

    gcd = _perturbed(case_u1_circle_three, mutate)
    res = check_gerbe_cocycle_smooth(gcd)
    assert res.max() > 5e-4


def test_connection_perturbation_caught():
    def mutate(gcd):
        ch = gcd.charts[0]
        theta = ch.grid[:, 0]
        ch.A = ch.A + 5e-4j * np.cos(theta)[:, None, None, None]

    gcd = _perturbed(case_u1_circle_three, mutate)
    res = check_connection(gcd)
    assert res.max() > 2e-4


def test_bfield_perturbation_caught():
    def mutate(gcd):
        ch = gcd.charts[0]
        x = ch.grid[:, 0]
        ch.B = ch.B + 5e-4j * np.cos(x)[:, None, None, None]

    gcd = _perturbed(case_u1_torus_three, mutate)
    res = check_bfield(gcd)
    assert res.max() > 2e-4


def test_chart_data_validation_catches_mismatched_points():
    gcd = case_u1_circle_three()
    o = gcd.overlaps[0]
    o.ib = o.ib.copy()
    o.ib[0] = (o.ib[0] + 1) % len(gcd.charts[o.b].grid)
    rep = validate_chart_data(gcd)
    assert not rep.ok


# ---------------------------------------------------------------------------
# synthetic fourfold overlap: the tetra law on explicit samples


def test_quad_tetra_law_on_coboundary():
    xm = u1_id_xmod()
    rng = np.random.default_rng(2)
    K = 40
    theta = np.linspace(0.0, 1.0, K)
    gs = {}
    for pair in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        coef = rng.normal()
        gs[pair] = coef * np.sin(theta + rng.normal())

    def u1(vals):
        return np.exp(1j * vals)[:, None, None]

    h_abc = u1(gs[(1, 2)] - gs[(0, 2)] + gs[(0, 1)])
    h_acd = u1(gs[(2, 3)] - gs[(0, 3)] + gs[(0, 2)])
    h_bcd = u1(gs[(2, 3)] - gs[(1, 3)] + gs[(1, 2)])
    h_abd = u1(gs[(1, 3)] - gs[(0, 3)] + gs[(0, 1)])
    d_ab = np.ones((K, 1, 1), dtype=np.complex128)
    quad = QuadOverlap(0, 1, 2, 3, h_abc, h_acd, h_bcd, h_abd, d_ab)
    gcd = GaugeChartData("quad-only", xm, 1, charts=[], overlaps=[],
                         quads=[quad])
    res = check_gerbe_cocycle_smooth(gcd)
    assert res.max() < 1e-13
    quad.h_abd = quad.h_abd * np.exp(1e-3j)
    res2 = check_gerbe_cocycle_smooth(gcd)
    assert res2.max() > 5e-4
