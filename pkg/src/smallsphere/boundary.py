"""Boundary data of rescaled geodesic spheres and the linearized static
quantities on the unit-sphere boundary.

All fields live on the unit sphere in ambient form.  Dots denote expansion
orders in the squared radius, not time derivatives.  Every quantity that has
a closed form is computed twice: once from first principles (operator
route) and once from the closed form, and the two must agree exactly; these
dual routes are the backbone of the verification engine.

Conventions:

* sigma_dot_ab = -(1/3) Rm[i,k,j,l] X^k X^l dX^i dX^j;
* H_dot = -(1/3) Ric_ij X^i X^j, and trace(sigma_dot) = H_dot;
* the linearized Gauss curvature on the unit sphere is
  dK(h) = (1/2)(divdiv h - Lap tr h - tr h).  The variant with the opposite
  sign on the Laplacian term is also computed for reporting (an open
  question in the reference text), but only the standard operator
  reproduces the closed form and the numerical oracle;
* decaying exterior harmonics of surface degree l go as s^-(l+1), so the
  boundary operator Lap + 2 d/ds acts on them as -(l+1)(l+2) at s = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curvature import CurvatureJet
from .errors import InputError, VerificationError
from .rational import Q, ZERO
from .sphere import (SpherePoly, TangentField1, TangentField2, grad_pair,
                     hessian_sphere)

_RANGE = range(3)


# ---------------------------------------------------------------------------
# expansion fields of the geodesic-sphere Bartnik data
# ---------------------------------------------------------------------------

def ricci_quadratic(jet: CurvatureJet) -> SpherePoly:
    """Ric_ij X^i X^j."""
    return SpherePoly.from_quadratic(jet.ric)


def sigma_dot(jet: CurvatureJet) -> TangentField2:
    """First correction of the rescaled induced metric."""
    third = Q(1, 3)
    matrix = [[None] * 3 for _ in _RANGE]
    for i in _RANGE:
        for j in _RANGE:
            quad = [[-third * jet.rm[i][k][j][l] for l in _RANGE]
                    for k in _RANGE]
            matrix[i][j] = SpherePoly.from_quadratic(quad)
    return TangentField2(matrix)


def sigma_ddot(jet: CurvatureJet) -> TangentField2:
    """Second correction (2/45) Rm[i,k,p,l] Rm[j,m,p,n] X^k X^l X^m X^n,
    the curvature-squared quartic term of the normal-coordinate metric."""
    scale = Q(2, 45)
    matrix = [[None] * 3 for _ in _RANGE]
    for i in _RANGE:
        for j in _RANGE:
            raw = {}
            for k in _RANGE:
                for l in _RANGE:
                    for p in _RANGE:
                        a = jet.rm[i][k][p][l]
                        if a == 0:
                            continue
                        for m in _RANGE:
                            for n in _RANGE:
                                b = jet.rm[j][m][p][n]
                                if b == 0:
                                    continue
                                mono = [0, 0, 0]
                                mono[k] += 1
                                mono[l] += 1
                                mono[m] += 1
                                mono[n] += 1
                                key = tuple(mono)
                                v = raw.get(key, ZERO) + scale * a * b
                                if v == 0:
                                    raw.pop(key, None)
                                else:
                                    raw[key] = v
            matrix[i][j] = SpherePoly(raw)
    return TangentField2(matrix)


def H_dot(jet: CurvatureJet) -> SpherePoly:
    """First correction of the rescaled mean curvature: -(1/3) Ric_ij X^i X^j."""
    return -Q(1, 3) * ricci_quadratic(jet)


def H_ddot_paths(jet: CurvatureJet):
    """(closed form, matrix-series value) of the second mean-curvature
    correction.

    Closed form: -(1/45) Rm[i,k,j,l] Rm[i,m,j,n] X^k X^l X^m X^n.  Series:
    expanding trace(sigma^-1 * (1/2) d_r sigma) in the squared radius gives
    2 tr(sigma_ddot) - <sigma_dot, sigma_dot>.
    """
    raw = {}
    scale = -Q(1, 45)
    for i in _RANGE:
        for k in _RANGE:
            for j in _RANGE:
                for l in _RANGE:
                    a = jet.rm[i][k][j][l]
                    if a == 0:
                        continue
                    for m in _RANGE:
                        for n in _RANGE:
                            b = jet.rm[i][m][j][n]
                            if b == 0:
                                continue
                            mono = [0, 0, 0]
                            mono[k] += 1
                            mono[l] += 1
                            mono[m] += 1
                            mono[n] += 1
                            key = tuple(mono)
                            v = raw.get(key, ZERO) + scale * a * b
                            if v == 0:
                                raw.pop(key, None)
                            else:
                                raw[key] = v
    closed = SpherePoly(raw)
    sdot = sigma_dot(jet)
    series = 2 * sigma_ddot(jet).trace2() - sdot.contract22(sdot)
    return closed, series


def H_ddot(jet: CurvatureJet) -> SpherePoly:
    closed, series = H_ddot_paths(jet)
    if closed != series:
        raise VerificationError("H_ddot: closed form and matrix series disagree")
    return series


# ---------------------------------------------------------------------------
# linearized Gauss curvature
# ---------------------------------------------------------------------------

def gauss_curvature_variation(h: TangentField2,
                              display_variant: bool = False) -> SpherePoly:
    """Linearized Gauss curvature on the unit round sphere.

    Standard operator: dK(h) = (1/2)(divdiv h - Lap tr h - tr h), which
    reproduces the conformal case dK(2u sigma) = -Lap u - 2u.  With
    ``display_variant`` the sign of the Laplacian term is flipped; that
    variant exists only so reports can exhibit the discrepancy.
    """
    tr = h.trace2()
    dd = h.divergence().divergence()
    lap = tr.laplacian()
    if display_variant:
        return Q(1, 2) * (dd + lap - tr)
    return Q(1, 2) * (dd - lap - tr)


def K_dot_paths(jet: CurvatureJet):
    """(operator value, display-variant value, closed form) of the first
    Gauss-curvature correction; closed form is R/2 - (4/3) Ric_ij X^i X^j."""
    sdot = sigma_dot(jet)
    operator = gauss_curvature_variation(sdot)
    variant = gauss_curvature_variation(sdot, display_variant=True)
    closed = (SpherePoly.constant(Q(jet.scalar, 2))
              - Q(4, 3) * ricci_quadratic(jet))
    return operator, variant, closed


def K_dot(jet: CurvatureJet) -> SpherePoly:
    operator, _, closed = K_dot_paths(jet)
    if operator != closed:
        raise VerificationError("K_dot: operator path disagrees with closed form")
    return operator


# ---------------------------------------------------------------------------
# exterior harmonic solve for the linearized static potential
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicExterior:
    """Decaying harmonic u = sum_l phi_l s^-(l+1) on the exterior s >= 1."""

    components: tuple  # ((l, SpherePoly), ...)

    def boundary_value(self) -> SpherePoly:
        return sum((phi for _, phi in self.components), SpherePoly.zero())

    def normal_derivative(self) -> SpherePoly:
        """d/ds at s = 1: each degree-l component picks up -(l+1)."""
        return sum((Q(-(l + 1)) * phi for l, phi in self.components),
                   SpherePoly.zero())


def exterior_boundary_coefficient(l: int):
    """Coefficient of (Lap + 2 d/ds) on s^-(l+1) harmonics at s = 1,
    from first principles: -l(l+1) - 2(l+1) = -(l+1)(l+2)."""
    return Q(-(l + 1) * (l + 2))


def exterior_solve(rhs: SpherePoly) -> HarmonicExterior:
    """Solve (Lap + 2 d/ds) u = rhs at s = 1 for a decaying harmonic u."""
    comps = []
    for l, part in rhs.harmonic_components():
        c = exterior_boundary_coefficient(l)
        if c == 0:
            raise InputError(f"exterior operator not invertible at degree {l}")
        comps.append((l, part * (1 / c)))
    return HarmonicExterior(components=tuple(comps))


def V_dot_paths(jet: CurvatureJet):
    """((V, dV/dnu) solved, (V, dV/dnu) closed forms).

    Solved from (Lap + 2 d/ds) V_dot = K_dot - H_dot; closed forms are
    -R/9 + Ric_ij X^i X^j / 12 and R/6 - Ric_ij X^i X^j / 4.
    """
    rhs = K_dot(jet) - H_dot(jet)
    ext = exterior_solve(rhs)
    solved = (ext.boundary_value(), ext.normal_derivative())
    P = ricci_quadratic(jet)
    closed = (SpherePoly.constant(-Q(jet.scalar, 9)) + Q(1, 12) * P,
              SpherePoly.constant(Q(jet.scalar, 6)) - Q(1, 4) * P)
    return solved, closed


def V_dot(jet: CurvatureJet):
    solved, closed = V_dot_paths(jet)
    if solved[0] != closed[0]:
        raise VerificationError("V_dot: solve disagrees with closed form")
    if solved[1] != closed[1]:
        raise VerificationError("dV/dnu_dot: solve disagrees with closed form")
    return solved


# ---------------------------------------------------------------------------
# linearized second fundamental form via the Codazzi equation
# ---------------------------------------------------------------------------

def gradient_potential(field: TangentField1) -> SpherePoly:
    """Recover u with grad u = field (mean zero), or raise if not a gradient."""
    div = field.divergence()
    u = SpherePoly.zero()
    for l, part in div.harmonic_components():
        if l == 0:
            if not part.is_zero():
                raise VerificationError("divergence of a tangent field has nonzero mean")
            continue
        u = u + part * Q(-1, l * (l + 1))
    if u.gradient() != field:
        raise VerificationError("tangent field is not a gradient")
    return u


def h_dot_solve(jet: CurvatureJet):
    """Solve the linearized Codazzi equation for the second-fundamental-form
    correction.

    Steps, all exact:
      1. tr h_dot = H_dot + tr sigma_dot;
      2. the traceless part is Hess k - (1/2) Lap k sigma for a potential k
         (the co-closed part vanishes; asserted afterwards via the residual);
      3. the Codazzi balance div h_dot - div sigma_dot - grad H_dot
         = grad(dV/dnu_dot - V_dot) turns into
         (1/2)(Lap + 2) k = (dV - V) + H_dot + pot(div sigma_dot)
         - (1/2) tr h_dot   up to an irrelevant constant,
         solved per harmonic degree (degree-1 components would obstruct).

    Returns (h_dot, k, codazzi_residual, solving_residual); both residuals
    must be identically zero.
    """
    sdot = sigma_dot(jet)
    hd = H_dot(jet)
    vdot, dvdnu = V_dot(jet)
    tr_hdot = hd + sdot.trace2()
    div_sdot = sdot.divergence()
    rhs_k = ((dvdnu - vdot) + hd + gradient_potential(div_sdot)
             - Q(1, 2) * tr_hdot)
    k = SpherePoly.zero()
    for l, part in rhs_k.harmonic_components():
        if l == 0:
            continue  # gauge constant of the gradient equation
        coeff = Q(2 - l * (l + 1), 2)
        if coeff == 0:
            raise VerificationError(
                "Codazzi solve obstructed by a degree-1 component")
        k = k + part * (1 / coeff)
    traceless = hessian_sphere(k) + TangentField2.metric_term(
        -Q(1, 2) * k.laplacian())
    hdot = TangentField2.metric_term(Q(1, 2) * tr_hdot) + traceless

    codazzi = (hdot.divergence() - div_sdot - hd.gradient()
               - (dvdnu - vdot).gradient())
    half_op_k = Q(1, 2) * (k.laplacian() + 2 * k)
    P = ricci_quadratic(jet)
    target = -Q(1, 6) * (P - SpherePoly.constant(Q(jet.scalar, 3)))
    solving = half_op_k.gradient() - target.gradient()
    return hdot, k, codazzi, solving


def h_dot(jet: CurvatureJet):
    """(h_dot, k) with all residual checks enforced."""
    hdot, k, codazzi, solving = h_dot_solve(jet)
    if not solving.is_zero():
        raise VerificationError("h_dot: potential equation residual is nonzero")
    if not codazzi.is_zero():
        raise VerificationError("h_dot: Codazzi residual is nonzero")
    return hdot, k


# ---------------------------------------------------------------------------
# first-order perturbation of the Laplace-Beltrami operator
# ---------------------------------------------------------------------------

def laplace_perturbation(f: SpherePoly, sdot: TangentField2) -> SpherePoly:
    """First variation of the Laplacian under sigma -> sigma + sdot:

        dLap f = (1/2) <grad tr(sdot), grad f> - div(sdot . grad f).

    For the pure-trace perturbation sdot = sigma this reduces to -Lap f.
    """
    tr = sdot.trace2()
    first = Q(1, 2) * grad_pair(tr, f)
    second = sdot.apply_to_gradient(f).divergence()
    return first - second


# ---------------------------------------------------------------------------
# bundled expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryExpansion:
    """All first/second-order boundary fields of a jet, dual-path checked."""

    jet: CurvatureJet
    sigma_dot: TangentField2
    sigma_ddot: TangentField2
    H_dot: SpherePoly
    H_ddot: SpherePoly
    K_dot: SpherePoly
    V_dot: SpherePoly
    dVdnu_dot: SpherePoly
    h_dot: TangentField2
    k_potential: SpherePoly


def boundary_expansion(jet: CurvatureJet) -> BoundaryExpansion:
    """Compute every boundary field with its internal consistency checks.

    trace(sigma_dot) = H_dot is also enforced here; the two are independent
    code paths that the construction must reconcile.
    """
    sdot = sigma_dot(jet)
    hd = H_dot(jet)
    if sdot.trace2() != hd:
        raise VerificationError("trace of sigma_dot does not equal H_dot")
    vdot, dvdnu = V_dot(jet)
    hdot, k = h_dot(jet)
    return BoundaryExpansion(
        jet=jet,
        sigma_dot=sdot,
        sigma_ddot=sigma_ddot(jet),
        H_dot=hd,
        H_ddot=H_ddot(jet),
        K_dot=K_dot(jet),
        V_dot=vdot,
        dVdnu_dot=dvdnu,
        h_dot=hdot,
        k_potential=k,
    )
