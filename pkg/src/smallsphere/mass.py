"""Assembly of the mass expansion and the verification ledger.

The total mass of the static extension of the rescaled geodesic sphere
expands as m = m_dot r^2 + m_ddot r^4 (rescaled radii), equivalently
m_dot r^3 + m_ddot r^5 in unscaled radii; the two differ only by radius
bookkeeping, never by coefficient values.

Every closed-form value appearing in the expansion is recomputed from the
sphere-calculus primitives and compared exactly; the closed forms are
compare-targets, never computation shortcuts.  The results:

    m_dot  = R/12,
    m_ddot = |Rc|^2/72 - 5 R^2/432   (curvature-quadratic part),
    gradient part = +deltaR/120, linear in deltaR,

with comparison values of the Hawking expansion R/12 r^3 and
(-R^2/144 + deltaR/120) r^5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import boundary
from .curvature import (CurvatureJet, DerivativeJet, invariants_AB_paths)
from .rational import Q, ZERO, format_rational
from .sphere import SpherePoly, TangentField2

_RANGE = range(3)


@dataclass(frozen=True)
class LedgerEntry:
    name: str
    computed: object
    paper: object
    passed: bool

    def to_dict(self):
        return {
            "name": self.name,
            "computed": format_rational(self.computed),
            "paper": format_rational(self.paper),
            "pass": self.passed,
        }


def _entry(name, computed, target) -> LedgerEntry:
    return LedgerEntry(name=name, computed=computed, paper=target,
                       passed=(computed == target))


# ---------------------------------------------------------------------------
# first order
# ---------------------------------------------------------------------------

def mass_first_order_paths(jet: CurvatureJet):
    """(Gauss-route value, Komar-route value, closed form R/12).

    Gauss route: mean(K_dot - H_dot)/2.  Komar route: mean(dV/dnu_dot).
    """
    kd = boundary.K_dot(jet)
    hd = boundary.H_dot(jet)
    gauss = (kd - hd).integrate_mean() / 2
    _, dvdnu = boundary.V_dot(jet)
    komar = dvdnu.integrate_mean()
    return gauss, komar, Q(jet.scalar, 12)


def mass_first_order(jet: CurvatureJet):
    gauss, komar, closed = mass_first_order_paths(jet)
    if gauss != closed or komar != closed:
        raise boundary.VerificationError(
            "first-order mass: %s (Gauss), %s (Komar), expected %s"
            % (gauss, komar, closed))
    return closed


# ---------------------------------------------------------------------------
# gradient-of-scalar-curvature contribution
# ---------------------------------------------------------------------------

def gradR_contribution(djet: DerivativeJet):
    """Signed r^5 coefficient produced by the second derivatives of Ricci.

    Builds the quartic metric and mean-curvature perturbations carried by
    the derivative tensor, applies the linearized Gauss curvature, and
    integrates: result = mean(dK - H4)/2.  The magnitude is deltaR/120;
    linearity in deltaR and invariance under doubly-trace-free changes of
    the tensor follow from the integral identities and are enforced by
    tests.  The sign is reported exactly as computed.
    """
    djet.validate()
    raw = {}
    for k in _RANGE:
        for l in _RANGE:
            for m in _RANGE:
                for n in _RANGE:
                    c = djet.t[k][l][m][n]
                    if c == 0:
                        continue
                    mono = [0, 0, 0]
                    mono[k] += 1
                    mono[l] += 1
                    mono[m] += 1
                    mono[n] += 1
                    key = tuple(mono)
                    v = raw.get(key, ZERO) + c
                    if v == 0:
                        raw.pop(key, None)
                    else:
                        raw[key] = v
    quartic = SpherePoly(raw)
    # metric perturbation carrying trace -(1/20) * quartic (only the trace
    # part of the quartic metric correction survives the mass integral)
    sigma4 = TangentField2.metric_term(Q(-1, 40) * quartic)
    h4 = Q(-1, 10) * quartic
    k4 = boundary.gauss_curvature_variation(sigma4)
    return (k4 - h4).integrate_mean() / 2


# ---------------------------------------------------------------------------
# the six curvature-squared integrals
# ---------------------------------------------------------------------------

I_NAMES = ("I1", "I2", "I3", "I4", "I5", "I6")


def i_terms_detailed(be: boundary.BoundaryExpansion):
    """[(name, computed, closed form)] for the six integrals.

    First-principles routes:
      I1 = (1/2) mean(K_ddot) from the second variation of Gauss-Bonnet,
      I2 = mean(-H_dot^2/4),        I3 = mean(-H_ddot/2),
      I4 = mean(|sigma_dot|^2/4),   I5 = mean(|h_dot|^2/4),
      I6 = mean(-<sigma_dot, h_dot>/2).
    Closed forms are stated through R^2, |Rc|^2 and the invariants A, B.
    """
    jet = be.jet
    A, _, B = invariants_AB_paths(jet)
    r2 = jet.scalar ** 2
    rc2 = jet.norm_sq_ric

    tr_sdot = be.sigma_dot.trace2()
    sdot_sq = be.sigma_dot.contract22(be.sigma_dot)
    # Gauss-Bonnet second variation: mean(K_ddot) equals
    # mean(-K_dot tr sigma_dot / 2 - tr sigma_ddot / 2
    #      - (tr sigma_dot)^2 / 8 + |sigma_dot|^2 / 4)
    k_ddot_mean = (Q(-1, 2) * (be.K_dot * tr_sdot).integrate_mean()
                   + Q(-1, 2) * be.sigma_ddot.trace2().integrate_mean()
                   + Q(-1, 8) * (tr_sdot * tr_sdot).integrate_mean()
                   + Q(1, 4) * sdot_sq.integrate_mean())
    i1 = k_ddot_mean / 2
    i2 = Q(-1, 4) * (be.H_dot * be.H_dot).integrate_mean()
    i3 = Q(-1, 2) * be.H_ddot.integrate_mean()
    i4 = Q(1, 4) * sdot_sq.integrate_mean()
    i5 = Q(1, 4) * be.h_dot.contract22(be.h_dot).integrate_mean()
    i6 = Q(-1, 2) * be.sigma_dot.contract22(be.h_dot).integrate_mean()

    closed = (
        Q(r2, 72) + Q(1, 360) * A - Q(17, 144) * B,
        Q(-1, 36) * B,
        Q(1, 90) * A,
        Q(1, 36) * A,
        Q(11, 144) * B - Q(r2, 432),
        Q(-1, 24) * B + Q(rc2, 108) - Q(r2, 216),
    )
    return [(name, comp, targ) for name, comp, targ
            in zip(I_NAMES, (i1, i2, i3, i4, i5, i6), closed)]


def i_terms(be: boundary.BoundaryExpansion):
    """The six computed integrals; raises naming the first mismatch."""
    out = []
    for name, computed, target in i_terms_detailed(be):
        if computed != target:
            raise boundary.VerificationError(
                f"{name}: computed {computed} != closed form {target}")
        out.append(computed)
    return tuple(out)


# ---------------------------------------------------------------------------
# bulk terms and final assembly
# ---------------------------------------------------------------------------

BULK_NAMES = ("bulk_laplace_perturbation",
              "bulk_V_dot_times_K_dot_minus_H_dot",
              "bulk_H_dot_times_dVdnu_dot")


def bulk_terms_detailed(be: boundary.BoundaryExpansion):
    """The three second-order potential integrals with their closed forms."""
    jet = be.jet
    r2 = jet.scalar ** 2
    rc2 = jet.norm_sq_ric
    b1 = Q(-1, 2) * boundary.laplace_perturbation(
        be.V_dot, be.sigma_dot).integrate_mean()
    b2 = Q(1, 2) * (be.V_dot * (be.K_dot - be.H_dot)).integrate_mean()
    b3 = Q(-1, 2) * (be.H_dot * be.dVdnu_dot).integrate_mean()
    closed = (
        Q(rc2, 180) - Q(r2, 540),
        Q(-11, 2160) * r2 - Q(rc2, 180),
        Q(7, 1080) * r2 - Q(rc2, 180),
    )
    return [(name, comp, targ) for name, comp, targ
            in zip(BULK_NAMES, (b1, b2, b3), closed)]


def bulk_terms(be: boundary.BoundaryExpansion):
    out = []
    for name, computed, target in bulk_terms_detailed(be):
        if computed != target:
            raise boundary.VerificationError(
                f"{name}: computed {computed} != closed form {target}")
        out.append(computed)
    return tuple(out)


def second_term_paths(be: boundary.BoundaryExpansion):
    """mean(dV/dnu_dot * tr sigma_dot / 2) and its closed form."""
    jet = be.jet
    computed = Q(1, 2) * (be.dVdnu_dot
                          * be.sigma_dot.trace2()).integrate_mean()
    closed = Q(-7, 1080) * jet.scalar ** 2 + Q(jet.norm_sq_ric, 180)
    return computed, closed


def second_term(be: boundary.BoundaryExpansion):
    computed, closed = second_term_paths(be)
    if computed != closed:
        raise boundary.VerificationError(
            f"second term: computed {computed} != closed form {closed}")
    return computed


def mass_second_order_closed(jet: CurvatureJet):
    return Q(jet.norm_sq_ric, 72) - Q(5, 432) * jet.scalar ** 2


def mass_second_order_paths(be: boundary.BoundaryExpansion):
    """(assembled value, closed form |Rc|^2/72 - 5R^2/432).

    Assembly: second term + three bulk terms + the six integrals, i.e. the
    mean of the second normal-derivative combination of the potential.
    """
    st, _ = second_term_paths(be)
    bulks = [comp for _, comp, _ in bulk_terms_detailed(be)]
    isum = sum(comp for _, comp, _ in i_terms_detailed(be))
    return st + sum(bulks) + isum, mass_second_order_closed(be.jet)


def mass_second_order(jet: CurvatureJet):
    be = boundary.boundary_expansion(jet)
    assembled, closed = mass_second_order_paths(be)
    if assembled != closed:
        raise boundary.VerificationError(
            f"second-order mass: assembled {assembled} != closed {closed}")
    return assembled


# ---------------------------------------------------------------------------
# ledger and report
# ---------------------------------------------------------------------------

DELTA_R_SIGN_FLAG = {
    "name": "delta_r_sign_discrepancy",
    "detail": ("the gradient-term coefficient is computed from first "
               "principles as +deltaR/120; the reference derivation shows "
               "-deltaR/120 in an intermediate step but +deltaR/120 in the "
               "final expansion; the computed sign is reported without "
               "deciding the intended one"),
}

DOT_K_VARIANT_FLAG_NAME = "gauss_variation_laplacian_sign"
EXTERIOR_EIGENVALUE_FLAG = {
    "name": "exterior_boundary_coefficient_display",
    "detail": ("boundary coefficients of the exterior operator are taken "
               "from first principles as -(l+1)(l+2); the reference inline "
               "display suggests -l(l+2) for l>=2, which is inconsistent "
               "with its own closed forms; the first-principles value is "
               "used and reproduces them"),
}


def verification_ledger(jet: CurvatureJet):
    """Every exact check for one jet as a list of LedgerEntry, plus flags.

    The ledger contains only entries that must pass; open-question
    diagnostics (operator-variant comparisons) are reported as flags.
    """
    entries = []
    flags = []

    a_closed, a_contracted, b = invariants_AB_paths(jet)
    entries.append(_entry("A_identity_dual_formula", a_contracted, a_closed))
    entries.append(_entry("rm_norm_identity", jet.norm_sq_rm,
                          4 * jet.norm_sq_ric - jet.scalar ** 2))

    sdot = boundary.sigma_dot(jet)
    hd = boundary.H_dot(jet)
    entries.append(_entry_poly("trace_sigma_dot_equals_H_dot",
                               sdot.trace2(), hd))

    operator, variant, closed_k = boundary.K_dot_paths(jet)
    entries.append(_entry_poly("K_dot_operator_vs_closed_form",
                               operator, closed_k))
    flags.append({
        "name": DOT_K_VARIANT_FLAG_NAME,
        "detail": ("standard linearized Gauss curvature (minus sign on the "
                   "Laplacian-of-trace term) matches the closed form: %s; "
                   "the displayed variant with the plus sign matches: %s"
                   % (operator == closed_k, variant == closed_k)),
    })
    flags.append(EXTERIOR_EIGENVALUE_FLAG)

    solved, closed_v = boundary.V_dot_paths(jet)
    entries.append(_entry_poly("V_dot_closed_form", solved[0], closed_v[0]))
    entries.append(_entry_poly("dVdnu_dot_closed_form",
                               solved[1], closed_v[1]))

    hdot, k, codazzi, solving = boundary.h_dot_solve(jet)
    P = boundary.ricci_quadratic(jet)
    k_closed = Q(1, 12) * (P - SpherePoly.constant(Q(jet.scalar, 3)))
    entries.append(_entry_poly("k_potential_closed_form", k, k_closed))
    entries.append(LedgerEntry("k_solving_equation_residual",
                               "0" if solving.is_zero() else "nonzero",
                               "0", solving.is_zero()))
    entries.append(LedgerEntry("codazzi_residual",
                               "0" if codazzi.is_zero() else "nonzero",
                               "0", codazzi.is_zero()))
    entries.append(_entry_poly("trace_h_dot", hdot.trace2(), Q(-2, 3) * P))

    h_closed, h_series = boundary.H_ddot_paths(jet)
    entries.append(_entry_poly("H_ddot_dual_path", h_series, h_closed))

    gauss, komar, closed_m1 = mass_first_order_paths(jet)
    entries.append(_entry("m_dot_gauss_route", gauss, closed_m1))
    entries.append(_entry("m_dot_komar_route", komar, closed_m1))

    be = boundary.BoundaryExpansion(
        jet=jet, sigma_dot=sdot, sigma_ddot=boundary.sigma_ddot(jet),
        H_dot=hd, H_ddot=h_series, K_dot=operator,
        V_dot=solved[0], dVdnu_dot=solved[1], h_dot=hdot, k_potential=k)

    st, st_closed = second_term_paths(be)
    entries.append(_entry("second_term_tr_sigma_dot", st, st_closed))
    bdet = bulk_terms_detailed(be)
    for name, computed, target in bdet:
        entries.append(_entry(name, computed, target))

    idet = i_terms_detailed(be)
    for name, computed, target in idet:
        entries.append(_entry(name, computed, target))
    isum = sum(c for _, c, _ in idet)
    ric_nu_nu_closed = Q(jet.norm_sq_ric, 72) - Q(jet.scalar ** 2, 216)
    entries.append(_entry("I_sum_ric_nu_nu", isum, ric_nu_nu_closed))
    recombined = (Q(11, 2160) * jet.scalar ** 2 + Q(1, 24) * a_closed
                  - Q(1, 12) * b + Q(jet.norm_sq_ric, 180))
    entries.append(_entry("summary_table_recombination", isum, recombined))

    assembled = st + sum(c for _, c, _ in bdet) + isum
    m2_closed = mass_second_order_closed(jet)
    entries.append(_entry("m_ddot_assembled", assembled, m2_closed))
    entries.append(_entry("m_ddot_temp_identity", assembled,
                          -Q(jet.scalar ** 2, 144) + ric_nu_nu_closed))
    entries.append(_entry("final_coefficient_reduction",
                          Q(25, 2160), Q(5, 432)))

    return be, entries, flags


def _entry_poly(name, computed: SpherePoly, target: SpherePoly) -> LedgerEntry:
    """Ledger entry comparing two scalar fields; rationals when constant."""
    passed = computed == target
    diff = computed - target

    def fmt(p):
        if p.is_zero():
            return "0"
        if p.degree == 0:
            return format_rational(p.coeffs[(0, 0, 0)])
        return "field(deg %d)" % p.degree

    return LedgerEntry(name=name,
                       computed=fmt(computed) if passed
                       else fmt(computed) + f" [diff {fmt(diff)}]",
                       paper=fmt(target), passed=passed)


@dataclass
class MassReport:
    """Everything the expansion run produces for one jet."""

    jet: CurvatureJet
    m_dot: object
    m_ddot: object
    delta_r: object
    delta_r_coeff: object
    i_terms: tuple
    bulk_terms: tuple
    second_term: object
    ric_nu_nu: object
    invariant_a: object
    invariant_b: object
    hawking_dot: object
    hawking_ddot: object
    ledger: list
    flags: list = field(default_factory=list)
    radii: list = field(default_factory=list)

    def all_pass(self) -> bool:
        return all(e.passed for e in self.ledger)

    def static_minus_hawking_gap(self):
        """r^5 gap of the static and Hawking expansions; the gradient terms
        cancel, leaving |Rc|^2/72 - 5R^2/432 + R^2/144."""
        return self.m_ddot - (-Q(self.jet.scalar ** 2, 144))

    def evaluate(self, radius: float):
        """(static mass, Hawking mass) at an unscaled radius, in floats."""
        r = float(radius)
        m = (float(self.m_dot) * r ** 3
             + (float(self.m_ddot) + float(self.delta_r_coeff)) * r ** 5)
        mh = (float(self.hawking_dot) * r ** 3
              + float(self.hawking_ddot) * r ** 5)
        return m, mh

    def to_dict(self):
        data = {
            "jet": {
                "ricci": self.jet.ricci_tokens(),
                "scalar": format_rational(self.jet.scalar),
                "normSqRic": format_rational(self.jet.norm_sq_ric),
                "normSqRm": format_rational(self.jet.norm_sq_rm),
                "A": format_rational(self.invariant_a),
                "B": format_rational(self.invariant_b),
                "deltaR": format_rational(self.delta_r),
            },
            "coefficients": {
                "mDot": format_rational(self.m_dot),
                "mDdot": format_rational(self.m_ddot),
                "deltaRCoeff": format_rational(self.delta_r_coeff),
                "r3": format_rational(self.m_dot),
                "r5": format_rational(self.m_ddot + self.delta_r_coeff),
                "rescaledR2": format_rational(self.m_dot),
                "rescaledR4": format_rational(self.m_ddot + self.delta_r_coeff),
                "hawkingDot": format_rational(self.hawking_dot),
                "hawkingDdot": format_rational(self.hawking_ddot),
                "staticMinusHawkingR5": format_rational(
                    self.static_minus_hawking_gap()),
            },
            "iTerms": {name: format_rational(value)
                       for name, value in zip(I_NAMES, self.i_terms)},
            "bulkTerms": {name: format_rational(value)
                          for name, value in zip(BULK_NAMES, self.bulk_terms)},
            "secondTerm": format_rational(self.second_term),
            "ricNuNu": format_rational(self.ric_nu_nu),
            "ledger": [e.to_dict() for e in self.ledger],
            "flags": self.flags,
            "allPass": self.all_pass(),
        }
        if self.radii:
            data["radii"] = [
                {"r": r, "static": m, "hawking": mh}
                for r, m, mh in self.radii
            ]
        return data


def full_expansion(jet: CurvatureJet, djet: DerivativeJet | None = None,
                   radii=()) -> MassReport:
    """Run the whole exact pipeline for one jet and assemble the report.

    The curvature-quadratic and gradient paths are additive and
    independent; the rescaled (r^2, r^4) and unscaled (r^3, r^5)
    coefficients coincide, only the radius bookkeeping differs.
    """
    _, entries, flags = verification_ledger(jet)
    values = {e.name: e.computed for e in entries}
    a, _, b = invariants_AB_paths(jet)
    i_values = tuple(values[name] for name in I_NAMES)
    bulk_values = tuple(values[name] for name in BULK_NAMES)

    delta_r = ZERO
    delta_r_coeff = ZERO
    if djet is not None:
        delta_r = djet.delta_r
        delta_r_coeff = gradR_contribution(djet)
        entries.append(_entry("gradR_magnitude", abs(delta_r_coeff),
                              abs(Q(delta_r, 120))))
        if delta_r != 0:
            flags = flags + [DELTA_R_SIGN_FLAG]

    report = MassReport(
        jet=jet,
        m_dot=values["m_dot_gauss_route"],
        m_ddot=values["m_ddot_assembled"],
        delta_r=delta_r,
        delta_r_coeff=delta_r_coeff,
        i_terms=i_values,
        bulk_terms=bulk_values,
        second_term=values["second_term_tr_sigma_dot"],
        ric_nu_nu=values["I_sum_ric_nu_nu"],
        invariant_a=a,
        invariant_b=b,
        hawking_dot=Q(jet.scalar, 12),
        hawking_ddot=-Q(jet.scalar ** 2, 144) + Q(delta_r, 120),
        ledger=entries,
        flags=flags,
    )
    report.radii = [(float(r),) + report.evaluate(r) for r in radii]
    return report
