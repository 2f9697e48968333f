"""Curvature data at the center point.

Everything is 3-dimensional and exact.  The Riemann tensor is never free
input: it is always constructed from a symmetric Ricci matrix through the
Weyl-free decomposition valid in three dimensions,

    Rm[i,k,j,l] = d_ij S_kl + d_kl S_ij - d_il S_kj - d_kj S_il,
    S = Ric - (R/4) d,

with the convention Ric_kl = Rm[i,k,i,l] (first and third slots traced).
Polynomial identities in the curvature entries are certified by exact
evaluation at many random rational jets (Schwartz-Zippel style), not by a
symbolic tensor system.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InputError, VerificationError
from .rational import Q, ZERO, format_rational, parse_rational

_RANGE = range(3)


def _delta(i, j):
    return 1 if i == j else 0


@dataclass(frozen=True)
class CurvatureJet:
    """Ricci/Riemann data at the center plus derived invariants."""

    ric: tuple                # 3x3 nested tuple of rationals
    rm: tuple                 # 3x3x3x3 nested tuple, derived from ric
    scalar: object            # R = trace of ric
    norm_sq_ric: object       # |Rc|^2
    norm_sq_rm: object        # |Rm|^2

    def validate(self):
        """Check every structural invariant exactly; raises on failure."""
        rm = self.rm
        for i in _RANGE:
            for k in _RANGE:
                for j in _RANGE:
                    for l in _RANGE:
                        if rm[i][k][j][l] != -rm[k][i][j][l]:
                            raise VerificationError("Rm not antisymmetric in slots 1,2")
                        if rm[i][k][j][l] != -rm[i][k][l][j]:
                            raise VerificationError("Rm not antisymmetric in slots 3,4")
                        if rm[i][k][j][l] != rm[j][l][i][k]:
                            raise VerificationError("Rm not pair-exchange symmetric")
                        if rm[i][k][j][l] + rm[i][j][l][k] + rm[i][l][k][j] != 0:
                            raise VerificationError("first Bianchi identity fails")
        for k in _RANGE:
            for l in _RANGE:
                contracted = sum(rm[i][k][i][l] for i in _RANGE)
                if contracted != self.ric[k][l]:
                    raise VerificationError("Rm contraction does not return Ric")
        if self.norm_sq_rm != 4 * self.norm_sq_ric - self.scalar ** 2:
            raise VerificationError("|Rm|^2 = 4|Rc|^2 - R^2 fails")
        return True

    def is_flat(self):
        return all(self.ric[i][j] == 0 for i in _RANGE for j in _RANGE)

    def scaled(self, factor):
        """Jet of the Ricci matrix scaled by a rational factor."""
        factor = Q(factor)
        return riemann_from_ricci(
            [[self.ric[i][j] * factor for j in _RANGE] for i in _RANGE])

    def ricci_tokens(self):
        """Upper-triangle entries 11 12 13 22 23 33 as p/q tokens."""
        return [format_rational(self.ric[i][j])
                for i in _RANGE for j in _RANGE if j >= i]


def riemann_from_ricci(ric) -> CurvatureJet:
    """Build the full jet from a symmetric 3x3 rational Ricci matrix."""
    ric = tuple(tuple(Q(ric[i][j]) for j in _RANGE) for i in _RANGE)
    for i in _RANGE:
        for j in _RANGE:
            if ric[i][j] != ric[j][i]:
                raise InputError("Ricci matrix must be symmetric")
    scalar = sum(ric[i][i] for i in _RANGE)
    s = [[ric[i][j] - (Q(scalar, 4) if i == j else ZERO) for j in _RANGE]
         for i in _RANGE]
    rm = tuple(tuple(tuple(tuple(
        _delta(i, j) * s[k][l] + _delta(k, l) * s[i][j]
        - _delta(i, l) * s[k][j] - _delta(k, j) * s[i][l]
        for l in _RANGE) for j in _RANGE) for k in _RANGE) for i in _RANGE)
    norm_sq_ric = sum(ric[i][j] ** 2 for i in _RANGE for j in _RANGE)
    norm_sq_rm = sum(rm[i][k][j][l] ** 2
                     for i in _RANGE for k in _RANGE
                     for j in _RANGE for l in _RANGE)
    return CurvatureJet(ric=ric, rm=rm, scalar=scalar,
                        norm_sq_ric=norm_sq_ric, norm_sq_rm=norm_sq_rm)


def invariants_AB(jet: CurvatureJet):
    """The two quadratic invariants organizing the r^5 ledger.

    A = (1/15)(7|Rc|^2 - (3/2)R^2),  B = (1/15)(R^2 + 2|Rc|^2).

    A is additionally recomputed as (1/15)(|Rc|^2 + |Rm|^2 + Rm_minj Rm_mjni);
    disagreement of the two A values signals a broken Riemann construction.
    """
    a_closed = Q(1, 15) * (7 * jet.norm_sq_ric - Q(3, 2) * jet.scalar ** 2)
    cross = sum(jet.rm[m][i][n][j] * jet.rm[m][j][n][i]
                for m in _RANGE for i in _RANGE
                for n in _RANGE for j in _RANGE)
    a_contracted = Q(1, 15) * (jet.norm_sq_ric + jet.norm_sq_rm + cross)
    if a_closed != a_contracted:
        raise VerificationError(
            "invariant A: closed form %s != contracted form %s"
            % (format_rational(a_closed), format_rational(a_contracted)))
    b = Q(1, 15) * (jet.scalar ** 2 + 2 * jet.norm_sq_ric)
    return a_closed, b


def invariants_AB_paths(jet: CurvatureJet):
    """Both A computations plus B, without raising; for ledger assembly."""
    a_closed = Q(1, 15) * (7 * jet.norm_sq_ric - Q(3, 2) * jet.scalar ** 2)
    cross = sum(jet.rm[m][i][n][j] * jet.rm[m][j][n][i]
                for m in _RANGE for i in _RANGE
                for n in _RANGE for j in _RANGE)
    a_contracted = Q(1, 15) * (jet.norm_sq_ric + jet.norm_sq_rm + cross)
    b = Q(1, 15) * (jet.scalar ** 2 + 2 * jet.norm_sq_ric)
    return a_closed, a_contracted, b


# ---------------------------------------------------------------------------
# second-derivative data for the gradient-of-scalar-curvature path
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeJet:
    """Symmetrized second derivatives of the Ricci tensor at the center.

    ``t[k][l][m][n]`` is symmetric in (k,l) and in (m,n) and satisfies the
    two trace constraints t_kkmm = deltaR and t_kmkm = deltaR/2 (the latter
    is the contracted second Bianchi identity).
    """

    delta_r: object
    t: tuple

    def validate(self):
        t = self.t
        for k in _RANGE:
            for l in _RANGE:
                for m in _RANGE:
                    for n in _RANGE:
                        if t[k][l][m][n] != t[l][k][m][n] or t[k][l][m][n] != t[k][l][n][m]:
                            raise InputError("derivative tensor not pair-symmetric")
        full = sum(t[k][k][m][m] for k in _RANGE for m in _RANGE)
        cross = sum(t[k][m][k][m] for k in _RANGE for m in _RANGE)
        if full != self.delta_r:
            raise InputError("derivative tensor full trace != deltaR")
        if 2 * cross != self.delta_r:
            raise InputError("derivative tensor cross trace != deltaR/2")
        return True


def derivative_jet_from_tensor(t, delta_r) -> DerivativeJet:
    jet = DerivativeJet(delta_r=Q(delta_r),
                        t=tuple(tuple(tuple(tuple(Q(t[k][l][m][n])
                                                  for n in _RANGE)
                                            for m in _RANGE)
                                      for l in _RANGE)
                                for k in _RANGE))
    jet.validate()
    return jet


# ---------------------------------------------------------------------------
# random generation (explicit seeds, no hidden generator state)
# ---------------------------------------------------------------------------

def _random_rational(rng):
    return Q(rng.randint(-12, 12), rng.randint(1, 8))


def random_ricci(seed):
    """Deterministic small random symmetric Ricci matrix."""
    rng = random.Random(seed)
    entries = [[None] * 3 for _ in _RANGE]
    for i in _RANGE:
        for j in _RANGE:
            if j >= i:
                entries[i][j] = _random_rational(rng)
            else:
                entries[i][j] = entries[j][i]
    return entries


def random_jet(seed) -> CurvatureJet:
    return riemann_from_ricci(random_ricci(seed))


def flat_jet() -> CurvatureJet:
    return riemann_from_ricci([[0, 0, 0], [0, 0, 0], [0, 0, 0]])


def round_jet(radius=1) -> CurvatureJet:
    """Unit-scalar-curvature-normalized round jet: Ric = (2/a^2) delta."""
    radius = Q(radius)
    if radius == 0:
        raise InputError("round preset needs a nonzero radius")
    c = 2 / radius ** 2
    return riemann_from_ricci([[c, 0, 0], [0, c, 0], [0, 0, c]])


def random_derivative_jet(seed, delta_r=None) -> DerivativeJet:
    """Random pair-symmetric rank-4 tensor corrected to satisfy both traces.

    The correction adds multiples of the two canonical trace tensors
    d_kl d_mn and d_km d_ln + d_kn d_lm; their trace pairings form an
    invertible 2x2 system, so any target deltaR is hit exactly.
    """
    rng = random.Random(seed)
    if delta_r is None:
        delta_r = _random_rational(rng)
    delta_r = Q(delta_r)
    t = [[[[ZERO] * 3 for _ in _RANGE] for _ in _RANGE] for _ in _RANGE]
    for k in _RANGE:
        for l in range(k, 3):
            for m in _RANGE:
                for n in range(m, 3):
                    v = _random_rational(rng)
                    t[k][l][m][n] = t[l][k][m][n] = v
                    t[k][l][n][m] = t[l][k][n][m] = v
    full = sum(t[k][k][m][m] for k in _RANGE for m in _RANGE)
    cross = sum(t[k][m][k][m] for k in _RANGE for m in _RANGE)
    # 9a + 6b = delta_r - full ; 3a + 12b = delta_r/2 - cross  (det = 90)
    rhs1 = delta_r - full
    rhs2 = Q(delta_r, 2) - cross
    a = (12 * rhs1 - 6 * rhs2) / 90
    b = (9 * rhs2 - 3 * rhs1) / 90
    for k in _RANGE:
        for l in _RANGE:
            for m in _RANGE:
                for n in _RANGE:
                    t[k][l][m][n] = (t[k][l][m][n]
                                     + a * _delta(k, l) * _delta(m, n)
                                     + b * (_delta(k, m) * _delta(l, n)
                                            + _delta(k, n) * _delta(l, m)))
    return derivative_jet_from_tensor(t, delta_r)


# ---------------------------------------------------------------------------
# external interface: presets and Ricci files
# ---------------------------------------------------------------------------

def parse_ricci_file(text: str):
    """Six whitespace-separated p/q tokens in the order 11 12 13 22 23 33."""
    tokens = text.split()
    if len(tokens) != 6:
        raise InputError(
            f"Ricci file needs 6 tokens (11 12 13 22 23 33), got {len(tokens)}")
    v = [parse_rational(tok) for tok in tokens]
    return [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]]


def jet_from_source(source: str) -> CurvatureJet:
    """Resolve 'flat', 'round:a', 'random:<seed>' or 'file:<path>'."""
    if source == "flat":
        return flat_jet()
    if source == "round" or source.startswith("round:"):
        radius = Q(1)
        if ":" in source:
            radius = parse_rational(source.split(":", 1)[1])
        return round_jet(radius)
    if source.startswith("random:"):
        try:
            seed = int(source.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad random seed in {source!r}") from None
        return random_jet(seed)
    if source.startswith("file:"):
        path = source.split(":", 1)[1]
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise InputError(f"cannot read Ricci file {path!r}: {exc}") from None
        return riemann_from_ricci(parse_ricci_file(text))
    raise InputError(f"unknown Ricci source {source!r}")
