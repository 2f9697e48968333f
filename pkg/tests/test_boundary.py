"""Boundary expansion fields: closed forms, dual paths, Codazzi balance."""

import pytest

from smallsphere.boundary import (H_ddot, H_ddot_paths, H_dot, K_dot,
                                  K_dot_paths, V_dot, V_dot_paths,
                                  boundary_expansion, exterior_solve,
                                  gauss_curvature_variation,
                                  gradient_potential, h_dot, h_dot_solve,
                                  laplace_perturbation, ricci_quadratic,
                                  sigma_ddot, sigma_dot)
from smallsphere.curvature import flat_jet, random_jet, round_jet
from smallsphere.errors import VerificationError
from smallsphere.rational import Q
from smallsphere.sphere import (SpherePoly, TangentField2, integrate_mean,
                                laplacian_sphere)

JETS = [random_jet(seed) for seed in range(50)]


def test_flat_fields_vanish():
    be = boundary_expansion(flat_jet())
    assert be.sigma_dot.is_zero() and be.sigma_ddot.is_zero()
    assert be.H_dot.is_zero() and be.H_ddot.is_zero() and be.K_dot.is_zero()
    assert be.V_dot.is_zero() and be.dVdnu_dot.is_zero()
    assert be.h_dot.is_zero() and be.k_potential.is_zero()


def test_round_spot_values():
    be = boundary_expansion(round_jet(1))
    assert be.H_dot == SpherePoly.constant(Q(-2, 3))
    assert be.sigma_dot.trace2() == SpherePoly.constant(Q(-2, 3))
    assert be.K_dot == SpherePoly.constant(Q(1, 3))
    assert be.V_dot == SpherePoly.constant(Q(-1, 2))
    assert be.dVdnu_dot == SpherePoly.constant(Q(1, 2))
    assert be.k_potential.is_zero()
    assert be.h_dot == TangentField2.metric_term(SpherePoly.constant(Q(-2, 3)))
    assert integrate_mean(be.H_ddot) == Q(-2, 45)


def test_trace_sigma_dot_equals_H_dot():
    for jet in JETS:
        assert sigma_dot(jet).trace2() == H_dot(jet)


def test_H_ddot_dual_paths_agree():
    for jet in JETS:
        closed, series = H_ddot_paths(jet)
        assert closed == series


def test_H_ddot_mean_oracle():
    # mean of H_ddot equals -(1/45) of the paired Riemann contraction
    for jet in JETS[:10]:
        contraction = sum(
            jet.rm[i][k][j][l] * jet.rm[i][m][j][n]
            * integrate_mean(SpherePoly.coordinate(k)
                             * SpherePoly.coordinate(l)
                             * SpherePoly.coordinate(m)
                             * SpherePoly.coordinate(n))
            for i in range(3) for k in range(3) for j in range(3)
            for l in range(3) for m in range(3) for n in range(3))
        assert integrate_mean(H_ddot(jet)) == Q(-1, 45) * contraction


def test_K_dot_operator_matches_closed_form():
    for jet in JETS:
        operator, variant, closed = K_dot_paths(jet)
        assert operator == closed
        # the displayed sign variant only agrees when the trace part is
        # constant (its Laplacian term then vanishes)
        if not (variant == closed):
            assert not laplacian_sphere(
                sigma_dot(jet).trace2()).is_zero()


def test_K_dot_round():
    assert K_dot(round_jet(1)) == SpherePoly.constant(Q(1, 3))


def test_gauss_variation_conformal_case():
    # h = 2u sigma gives dK = -Lap u - 2u
    u = ricci_quadratic(random_jet(77))
    h = TangentField2.metric_term(2 * u)
    assert gauss_curvature_variation(h) == -laplacian_sphere(u) - 2 * u


def test_exterior_solve_examples():
    R = Q(6)
    rhs0 = SpherePoly.constant(R / 6)
    sol = exterior_solve(rhs0)
    assert sol.boundary_value() == SpherePoly.constant(-R / 12)
    jet = random_jet(11)
    p2 = ricci_quadratic(jet) - SpherePoly.constant(Q(jet.scalar, 3))
    sol2 = exterior_solve(-p2)
    assert sol2.boundary_value() == Q(1, 12) * p2
    assert sol2.normal_derivative() == Q(-3, 12) * p2
    empty = exterior_solve(SpherePoly.zero())
    assert empty.boundary_value().is_zero()


def test_V_dot_closed_forms():
    for jet in JETS:
        solved, closed = V_dot_paths(jet)
        assert solved[0] == closed[0]
        assert solved[1] == closed[1]


def test_V_dot_komar_mean():
    # the mean of the normal derivative is R/12; the degree-2 part
    # integrates to zero
    for jet in JETS[:10]:
        _, dvdnu = V_dot(jet)
        assert integrate_mean(dvdnu) == Q(jet.scalar, 12)


def test_h_dot_closed_form_and_residuals():
    for jet in JETS:
        hdot, k, codazzi, solving = h_dot_solve(jet)
        p = ricci_quadratic(jet)
        assert k == Q(1, 12) * (p - SpherePoly.constant(Q(jet.scalar, 3)))
        assert hdot.trace2() == Q(-2, 3) * p
        assert codazzi.is_zero()
        assert solving.is_zero()


def test_h_dot_traceless_part_is_k_hessian():
    from smallsphere.sphere import hessian_sphere
    jet = random_jet(8)
    hdot, k = h_dot(jet)
    trace_part = TangentField2.metric_term(Q(1, 2) * hdot.trace2())
    expected = hessian_sphere(k) + TangentField2.metric_term(
        Q(-1, 2) * laplacian_sphere(k))
    assert hdot - trace_part == expected


def test_gradient_potential_roundtrip():
    f = ricci_quadratic(random_jet(31))
    assert gradient_potential(f.gradient()) == f - SpherePoly.constant(
        integrate_mean(f))


def test_gradient_potential_rejects_non_gradient():
    x = [SpherePoly.coordinate(i) for i in range(3)]
    from smallsphere.sphere import TangentField1
    # rotational field around the z axis is tangent but not a gradient
    rot = TangentField1([-x[1], x[0], SpherePoly.zero()])
    with pytest.raises(VerificationError):
        gradient_potential(rot)


def test_laplace_perturbation_pins():
    jet = random_jet(13)
    f = ricci_quadratic(jet)
    assert laplace_perturbation(SpherePoly.constant(3), sigma_dot(jet)).is_zero()
    # pure-trace perturbation: brute substitution gives -Lap f
    assert laplace_perturbation(f, TangentField2.round_metric()) == \
        -laplacian_sphere(f)


def test_laplace_perturbation_bulk_value():
    for jet in JETS[:10]:
        vdot, _ = V_dot(jet)
        value = Q(-1, 2) * integrate_mean(
            laplace_perturbation(vdot, sigma_dot(jet)))
        assert value == Q(jet.norm_sq_ric, 180) - Q(jet.scalar ** 2, 540)


def test_sigma_ddot_trace_mean():
    # (1/4pi) integral of tr sigma_ddot equals (2/45) * A-pattern contraction
    jet = round_jet(1)
    assert integrate_mean(sigma_ddot(jet).trace2()) == Q(4, 45)
