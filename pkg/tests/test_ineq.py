"""Inequality evaluators: the main curvature-sum bound, its space-form
specializations, block-minimality results and the scalar split."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from helpers import (box_points, chen_cr_immersion, perturbed_chen_immersion,
                     sasakian_cr_immersion, sphere_warped_immersion,
                     torus_immersion, trivial_product_immersion)

from warpcheck.errors import ConfigurationError
from warpcheck.ineq import (d2_umbilical_implies_geodesic, dt_minimality_check,
                            generalized_inequality, generalized_rhs,
                            main_inequality, nearly_kahler_rhs,
                            scalar_decomposition_residual, space_form_inequality,
                            space_form_rhs, space_form_rhs_printed)
from warpcheck.structures import complex_space_form
from warpcheck.subman import warped_geometry
from warpcheck.warped import leaf_scalars

# ---------------------------------------------------------------------------
# Scalar-curvature decomposition
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("builder", [chen_cr_immersion, trivial_product_immersion,
                                     sphere_warped_immersion],
                         ids=lambda b: b.__name__)
def test_scalar_decomposition_residual_small(builder):
    im = builder()
    for x in box_points(im.domain, 4, seed=21):
        assert scalar_decomposition_residual(im, x) < 1e-7, (im.name, x)


def test_scalar_decomposition_trivial_product_exact():
    im = trivial_product_immersion()
    assert scalar_decomposition_residual(im, np.array([0.3, -0.2])) < 1e-14


# ---------------------------------------------------------------------------
# Fiber lemma and leaf minimality
# ---------------------------------------------------------------------------


def test_fiber_lemma_on_chen_cr():
    im = chen_cr_immersion()
    rep = d2_umbilical_implies_geodesic(im, box_points(im.domain, 4, seed=23))
    assert rep["fiber-geodesic-conclusion"].passed
    assert "4/4" in rep["fiber-geodesic-conclusion"].note


def test_fiber_lemma_vacuous_on_geodesic_plane():
    im = trivial_product_immersion()
    rep = d2_umbilical_implies_geodesic(im, [np.array([0.1, 0.4])])
    assert rep["fiber-geodesic-conclusion"].passed
    assert rep["fiber-minimal-hypothesis"].worst < 1e-14


def test_fiber_lemma_hypothesis_fails_on_torus():
    im = torus_immersion()
    points = [np.array([0.5, 1.0]), np.array([2.5, 3.0]), np.array([0.9, 5.0])]
    rep = d2_umbilical_implies_geodesic(im, points)
    assert rep["fiber-minimal-hypothesis"].worst > 0.1
    assert "0/3" in rep["fiber-geodesic-conclusion"].note


def test_leaf_minimality_chen_cr():
    im = chen_cr_immersion()
    rep = dt_minimality_check(im, box_points(im.domain, 4, seed=25))
    assert rep["leaf-mean-curvature"].worst < 1e-8


def test_leaf_minimality_sasakian_cr():
    im = sasakian_cr_immersion()
    rep = dt_minimality_check(im, box_points(im.domain, 4, seed=27), tol=1e-7)
    assert rep["leaf-mean-curvature"].worst < 1e-7


def test_leaf_minimality_trivial_plane():
    im = trivial_product_immersion()
    rep = dt_minimality_check(im, [np.array([0.2, 0.2])])
    assert rep["leaf-mean-curvature"].worst < 1e-14


def test_leaf_minimality_needs_declaration():
    from helpers import sphere_immersion
    with pytest.raises(ConfigurationError):
        dt_minimality_check(sphere_immersion(), [np.array([1.0, 1.0])])


# ---------------------------------------------------------------------------
# Main inequality
# ---------------------------------------------------------------------------


def test_main_inequality_equality_on_chen_cr():
    im = chen_cr_immersion()
    for x in box_points(im.domain, 5, seed=29):
        r = main_inequality(im, x)
        rr = float(np.hypot(x[0], x[1]))
        npt.assert_allclose(r.lhs, 1.0 / rr**2, rtol=1e-10)
        assert abs(r.slack) < 1e-8
        assert r.equality
        assert r.diagnostics["leaf_form_norm"] < 1e-8
        assert r.diagnostics["fiber_form_norm"] < 1e-8
        assert r.diagnostics["mean_norm"] < 1e-8


def test_main_inequality_trivial_product_exact_zero():
    r = main_inequality(trivial_product_immersion(), np.array([0.4, 0.9]))
    assert r.lhs == 0.0 and r.rhs == 0.0 and r.slack == 0.0
    assert r.equality and r.passed


def test_main_inequality_strict_on_perturbed():
    im = perturbed_chen_immersion()
    for x in box_points(im.domain, 6, seed=31):
        r = main_inequality(im, x)
        assert r.slack > 1e-3, (x, r.slack)
        assert not r.equality


def test_main_inequality_requires_complex_ambient():
    im = sasakian_cr_immersion()
    with pytest.raises(ConfigurationError):
        main_inequality(im, np.array([1.0, 1.0, 0.0, 0.5]))


def test_main_inequality_model_path_matches_flat():
    im = chen_cr_immersion()
    x = np.array([0.7, -0.5, 0.9])
    direct = main_inequality(im, x)
    modeled = main_inequality(im, x, model=complex_space_form(0.0, 4))
    npt.assert_allclose(modeled.rhs, direct.rhs, atol=1e-12)


def test_model_curvature_sum_matches_reduction_count():
    # frame summation of the space-form model must shift the bound by c*n1*n2/4
    im = chen_cr_immersion()
    x = np.array([0.7, -0.5, 0.9])
    base = main_inequality(im, x).rhs
    for c in (1.0, -2.5, 4.0):
        shifted = main_inequality(im, x, model=complex_space_form(c, 4),
                                  tol=1e-6).rhs
        npt.assert_allclose(shifted - base, c * 2 * 1 / 4.0, atol=1e-10)


# ---------------------------------------------------------------------------
# Space-form specializations
# ---------------------------------------------------------------------------


def test_space_form_equality_on_chen_cr_at_flat_constant():
    im = chen_cr_immersion()
    for u, v in [(0.3, 0.4), (0.6, 0.8), (1.2, 1.6)]:
        x = np.array([u, v, 0.7])
        b = space_form_inequality(im, x, c=0.0)
        r2 = u * u + v * v
        npt.assert_allclose(b.reduction.lhs, 1.0 / r2, rtol=1e-11)
        npt.assert_allclose(b.reduction.rhs, 1.0 / r2, rtol=1e-11)
        assert abs(b.reduction.slack) < 1e-8
        assert b.reduction.equality
        # at c = 0 the printed coefficient difference disappears
        npt.assert_allclose(b.printed.rhs, b.reduction.rhs, atol=1e-14)


def test_space_form_mirrors_main_inequality_at_zero_constant():
    im = chen_cr_immersion()
    x = np.array([0.9, 0.2, 1.1])
    b = space_form_inequality(im, x, c=0.0)
    m = main_inequality(im, x)
    npt.assert_allclose(b.reduction.rhs, m.rhs, atol=1e-8)


def test_dp_variant_is_annotated_and_optional():
    im = chen_cr_immersion()
    x = np.array([0.5, 0.5, 0.3])
    b = space_form_inequality(im, x, c=0.0)
    assert b.dp_printed is None
    b = space_form_inequality(im, x, c=0.0, dp_s=1.0)
    assert b.dp_printed is not None
    assert "as-printed" in b.dp_printed.note
    geom = warped_geometry(im)
    sc = leaf_scalars(geom, x)
    want = 2.0 * 1 * (sc.grad_lnf_sq - sc.lap_lnf + 1.5 * 1.0 + 1.0)
    npt.assert_allclose(b.dp_printed.rhs, want, rtol=1e-12)


# ---------------------------------------------------------------------------
# Variant bounds and the reduction identity
# ---------------------------------------------------------------------------


def test_generalized_reduces_to_space_form_bound():
    rng = np.random.default_rng(37)
    for _ in range(1000):
        c = rng.uniform(-8, 8)
        n1, n2 = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        grad = rng.uniform(0, 50)
        lap = rng.uniform(-50, 50)
        a = generalized_rhs(c, 0.0, n1, n2, grad, lap)
        b = 2.0 * space_form_rhs(c, n1, n2, grad, lap)
        assert abs(a - b) < 1e-12


def test_printed_and_reduction_differ_for_nonzero_constant():
    assert space_form_rhs_printed(2.0, 3, 2, 0.0, 0.0) == \
        2.0 * space_form_rhs(2.0, 3, 2, 0.0, 0.0)
    assert space_form_rhs_printed(2.0, 3, 2, 1.0, 0.0) != \
        space_form_rhs(2.0, 3, 2, 1.0, 0.0)


def test_generalized_inequality_formula_values():
    # c_rk = 4, gamma = 1, n1 = 2, n2 = 1: rhs is 2(grad - lap + 7/2)
    im = chen_cr_immersion()
    x = np.array([0.8, 0.1, 0.6])
    geom = warped_geometry(im)
    sc = leaf_scalars(geom, x)
    r = generalized_inequality(im, x, c_rk=4.0, gamma=1.0)
    want = 2.0 * (sc.grad_lnf_sq - sc.lap_lnf + 3.5)
    npt.assert_allclose(r.rhs, want, rtol=1e-13)


def test_generalized_equality_at_zero_parameters_on_chen_cr():
    im = chen_cr_immersion()
    x = np.array([0.6, 0.8, 0.4])
    r = generalized_inequality(im, x, c_rk=0.0, gamma=0.0, tol=1e-8)
    assert abs(r.slack) < 1e-8


def test_nearly_kahler_rhs_formula():
    assert nearly_kahler_rhs(5.0, 2.0, 3, 0.25) == 2.0 * 3 * (1.0 * 2.0 - 0.25)


# ---------------------------------------------------------------------------
# Equality characterization, both directions at sampled points
# ---------------------------------------------------------------------------


def test_equality_characterization_directions():
    tol = 1e-8
    cases = [(chen_cr_immersion(), True), (trivial_product_immersion(), True),
             (perturbed_chen_immersion(), False)]
    for im, expect_equal in cases:
        for x in box_points(im.domain, 3, seed=41):
            r = main_inequality(im, x, tol=tol)
            diag_ok = (r.diagnostics["leaf_form_norm"] < tol
                       and r.diagnostics["fiber_form_norm"] < tol
                       and r.diagnostics["mean_norm"] < tol)
            if diag_ok:
                assert abs(r.slack) < 10 * tol
            if abs(r.slack) < tol:
                assert r.diagnostics["leaf_form_norm"] < 10 * tol
                assert r.diagnostics["fiber_form_norm"] < 10 * tol
            assert r.equality == expect_equal


def test_rhs_invariant_under_leaf_reparametrization():
    # swapping the two leaf coordinates re-orthonormalizes the adapted frame
    # within the leaf block; the bound must not move
    from warpcheck.expr import parse
    from warpcheck.subman import Immersion, WarpedDecl
    from helpers import flat_metric, standard_complex_structure, line_metric
    comps = ["x2*cos(x3)", "x1*cos(x3)", "x2*sin(x3)", "x1*sin(x3)"]
    swapped = Immersion(
        dim=3, components=[parse(c, 3) for c in comps],
        ambient=flat_metric(4), structure=standard_complex_structure(4),
        warped=WarpedDecl(n1=2, n2=1, f=parse("sqrt(x1^2 + x2^2)", 2),
                          g2=line_metric()),
        name="chen-cr-swapped")
    base = chen_cr_immersion()
    x = np.array([0.6, 0.8, 0.9])
    x_swapped = np.array([0.8, 0.6, 0.9])
    r1 = main_inequality(base, x)
    r2 = main_inequality(swapped, x_swapped)
    npt.assert_allclose(r1.rhs, r2.rhs, atol=1e-10)
    npt.assert_allclose(r1.lhs, r2.lhs, atol=1e-10)
