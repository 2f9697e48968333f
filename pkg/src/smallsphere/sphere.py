"""Exact calculus of polynomial scalar and tensor fields on the unit sphere.

Scalar fields (`SpherePoly`) are polynomials in the direction components
X1, X2, X3 restricted to the unit sphere S2; the restriction makes the
monomial representation non-unique (X.X = 1), so every stored polynomial is
kept in canonical form: each homogeneous block is harmonic, i.e. the stored
representative is the sum of the spherical-harmonic components of the field.
Equality of fields is equality of canonical forms.

Tangent tensor fields are stored in ambient form, never in theta/phi charts:

* `TangentField1`: V_b = P_i(X) dX^i/du^b for chart coordinates u^b;
* `TangentField2`: T_ab = M_ij(X) dX^i/du^a dX^j/du^b with M symmetric.

A pure metric term Q(X) sigma_ab enters a `TangentField2` as Q delta_ij,
because the round metric pulls back to delta_ij dX^i dX^j.  The ambient
coefficients are unique only up to radial terms (proportional to X_i), so
tensor equality projects them tangentially before comparing.

The calculus uses three exact identities of the unit sphere:

* grad X^i . grad X^j = delta_ij - X^i X^j,
* Hess(X^i) = -X^i sigma_ab   (shape operator of the unit sphere),
* for homogeneous P of degree n, Laplacian_S2(P) = (Laplacian_R3 P) - n(n+1) P.

Integration is always the mean (1/4pi) * integral over S2.  Ambient degree
is capped at 8; exceeding the cap raises `DegreeOverflowError` rather than
truncating.
"""

from __future__ import annotations

import numpy as np

from .errors import DegreeOverflowError
from .rational import ONE, Q, ZERO, format_rational

DEGREE_CAP = 8

Monomial = tuple  # (e1, e2, e3) exponents of X1, X2, X3


# ---------------------------------------------------------------------------
# raw monomial-dict helpers (no canonicalization, no cap checks)
# ---------------------------------------------------------------------------

def _dict_degree(coeffs):
    return max((sum(m) for m in coeffs), default=0)


def _dict_add_into(acc, other, scale=ONE):
    if scale == 0:
        return
    for m, c in other.items():
        v = acc.get(m, ZERO) + c * scale
        if v == 0:
            acc.pop(m, None)
        else:
            acc[m] = v


def _dict_mul(f, g):
    out = {}
    for (a1, a2, a3), ca in f.items():
        for (b1, b2, b3), cb in g.items():
            m = (a1 + b1, a2 + b2, a3 + b3)
            v = out.get(m, ZERO) + ca * cb
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
    return out


def _dict_diff(f, axis):
    out = {}
    for m, c in f.items():
        e = m[axis]
        if e:
            m2 = list(m)
            m2[axis] = e - 1
            out[tuple(m2)] = c * e
    return out


def _dict_ambient_laplacian(f):
    out = {}
    for m, c in f.items():
        for axis in range(3):
            e = m[axis]
            if e >= 2:
                m2 = list(m)
                m2[axis] = e - 2
                m2 = tuple(m2)
                v = out.get(m2, ZERO) + c * e * (e - 1)
                if v == 0:
                    out.pop(m2, None)
                else:
                    out[m2] = v
    return out


_R2 = {(2, 0, 0): ONE, (0, 2, 0): ONE, (0, 0, 2): ONE}


def _dict_mul_r2_power(f, j):
    for _ in range(j):
        f = _dict_mul(f, _R2)
    return f


def _harmonic_parts(block, d):
    """Decompose a homogeneous degree-d polynomial as sum_j r^2j h_(d-2j).

    Returns {m: h_m} with every h_m harmonic homogeneous of degree m.  Uses
    Laplacian(r^2j h_m) = 2j(2m + 2j + 1) r^(2j-2) h_m recursively.
    """
    if d <= 1:
        return {d: block} if block else {}
    lap = _dict_ambient_laplacian(block)
    parts = {}
    for m, g in _harmonic_parts(lap, d - 2).items():
        j = (d - m) // 2
        parts[m] = {k: c / (2 * j * (2 * d - 2 * j + 1)) for k, c in g.items()}
    top = dict(block)
    for m, h in parts.items():
        _dict_add_into(top, _dict_mul_r2_power(h, (d - m) // 2), -ONE)
    if top:
        parts[d] = top
    return parts


def _canonicalize(coeffs):
    """Reduce a raw monomial dict modulo X.X = 1 to harmonic blocks."""
    blocks = {}
    for m, c in coeffs.items():
        if c == 0:
            continue
        blocks.setdefault(sum(m), {})[m] = c
    out = {}
    for d, block in blocks.items():
        for parts in _harmonic_parts(block, d).values():
            _dict_add_into(out, parts)
    return out


def _check_cap(degree, context):
    if degree > DEGREE_CAP:
        raise DegreeOverflowError(
            f"{context}: ambient degree {degree} exceeds cap {DEGREE_CAP}")


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------

class SpherePoly:
    """Exact polynomial field on S2, stored canonically (harmonic blocks)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None, *, canonical=False):
        if coeffs is None:
            coeffs = {}
        if not canonical:
            _check_cap(_dict_degree(coeffs), "SpherePoly")
            coeffs = _canonicalize(coeffs)
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero():
        return SpherePoly({}, canonical=True)

    @staticmethod
    def constant(value):
        value = Q(value)
        if value == 0:
            return SpherePoly.zero()
        return SpherePoly({(0, 0, 0): value}, canonical=True)

    @staticmethod
    def coordinate(axis):
        m = [0, 0, 0]
        m[axis] = 1
        return SpherePoly({tuple(m): ONE}, canonical=True)

    @staticmethod
    def from_quadratic(matrix):
        """Build sum_ij matrix[i][j] X^i X^j from a symmetric 3x3 array."""
        raw = {}
        for i in range(3):
            for j in range(3):
                c = Q(matrix[i][j])
                if c == 0:
                    continue
                m = [0, 0, 0]
                m[i] += 1
                m[j] += 1
                _dict_add_into(raw, {tuple(m): c})
        return SpherePoly(raw)

    # -- ring structure -----------------------------------------------------

    @property
    def degree(self):
        """Degree of the canonical representative (0 for the zero field)."""
        return _dict_degree(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, SpherePoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, SpherePoly):
            other = SpherePoly.constant(other)
        out = dict(self.coeffs)
        _dict_add_into(out, other.coeffs)
        return SpherePoly(out, canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return SpherePoly({m: -c for m, c in self.coeffs.items()}, canonical=True)

    def __sub__(self, other):
        if not isinstance(other, SpherePoly):
            other = SpherePoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SpherePoly):
            if self.is_zero() or other.is_zero():
                return SpherePoly.zero()
            _check_cap(self.degree + other.degree, "poly_mul")
            return SpherePoly(_dict_mul(self.coeffs, other.coeffs))
        scale = Q(other)
        return SpherePoly({m: c * scale for m, c in self.coeffs.items()}
                          if scale != 0 else {}, canonical=True)

    __rmul__ = __mul__

    # -- calculus -----------------------------------------------------------

    def integrate_mean(self):
        """Exact mean (1/4pi) * integral over S2 by the pairing formula.

        The mean of a monomial X1^a X2^b X3^c vanishes for odd exponents and
        is otherwise the number of perfect matchings of equal indices divided
        by (a+b+c+1)!!, i.e. (a-1)!!(b-1)!!(c-1)!! / (a+b+c+1)!!.
        """
        total = ZERO
        for (a, b, c), coeff in self.coeffs.items():
            if a % 2 or b % 2 or c % 2:
                continue
            num = (_double_factorial(a - 1) * _double_factorial(b - 1)
                   * _double_factorial(c - 1))
            total += coeff * Q(num, _double_factorial(a + b + c + 1))
        return total

    def laplacian(self):
        """Laplace-Beltrami on S2 via the ambient identity per block."""
        out = {}
        blocks = {}
        for m, c in self.coeffs.items():
            blocks.setdefault(sum(m), {})[m] = c
        for d, block in blocks.items():
            _dict_add_into(out, _dict_ambient_laplacian(block))
            _dict_add_into(out, block, Q(-d * (d + 1)))
        return SpherePoly(out)

    def harmonic_components(self):
        """List of (degree l, component) with the component an exact
        eigenfunction of the sphere Laplacian with eigenvalue -l(l+1)."""
        blocks = {}
        for m, c in self.coeffs.items():
            blocks.setdefault(sum(m), {})[m] = c
        return [(d, SpherePoly(blocks[d], canonical=True))
                for d in sorted(blocks)]

    def gradient(self):
        """Tangential gradient as a TangentField1 (coefficients dX^i f)."""
        return TangentField1([SpherePoly(_dict_diff(self.coeffs, i))
                              for i in range(3)])

    # -- numeric bridge ------------------------------------------------------

    def eval(self, points):
        """Evaluate at unit vectors ``points`` of shape (..., 3) in floats."""
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[:-1])
        for (a, b, c), coeff in self.coeffs.items():
            out += float(coeff) * (points[..., 0] ** a
                                   * points[..., 1] ** b
                                   * points[..., 2] ** c)
        return out

    def quadrature_mean(self, n=8):
        """Floating mean by Gauss-Legendre (polar cosine) x uniform azimuth.

        Exact (to roundoff) for polynomial degree <= min(2n-1, n_phi-1);
        the default n=8 covers the full degree cap.
        """
        t, w = np.polynomial.legendre.leggauss(n)
        n_phi = max(2 * n + 1, 9)
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        st = np.sqrt(1.0 - t ** 2)
        x = st[:, None] * np.cos(phi)[None, :]
        y = st[:, None] * np.sin(phi)[None, :]
        z = np.broadcast_to(t[:, None], x.shape)
        vals = self.eval(np.stack([x, y, z], axis=-1))
        return float(np.sum(w[:, None] * vals) / (2.0 * n_phi))

    # -- misc ----------------------------------------------------------------

    def dump(self):
        """Debug dump: one '(e1,e2,e3) p/q' line per canonical monomial."""
        return [f"({m[0]},{m[1]},{m[2]}) {format_rational(c)}"
                for m, c in sorted(self.coeffs.items())]

    def __repr__(self):
        if self.is_zero():
            return "SpherePoly(0)"
        return "SpherePoly(" + " + ".join(
            f"{format_rational(c)}*X^{m}" for m, c in sorted(self.coeffs.items())
        ) + ")"


def poly_add(f, g):
    return f + g


def poly_mul(f, g):
    return f * g


def integrate_mean(f):
    return f.integrate_mean()


def quadrature_mean(f, n=8):
    return f.quadrature_mean(n)


def laplacian_sphere(f):
    return f.laplacian()


def harmonic_decompose(f):
    return f.harmonic_components()


def grad_pair(f, g):
    """Exact tangential gradient pairing <grad f, grad g> on S2.

    Computed ambient-wise: sum_ij d_i f d_j g (delta_ij - X_i X_j), which is
    the unit-sphere identity grad X^i . grad X^j = delta_ij - X^i X^j applied
    to the chain rule.
    """
    _check_cap(max(f.degree + g.degree, 0), "grad_pair")
    df = [_dict_diff(f.coeffs, i) for i in range(3)]
    dg = [_dict_diff(g.coeffs, i) for i in range(3)]
    out = {}
    for i in range(3):
        _dict_add_into(out, _dict_mul(df[i], dg[i]))
    xdf = _radial_contraction(df)
    xdg = _radial_contraction(dg)
    _dict_add_into(out, _dict_mul(xdf, xdg), -ONE)
    return SpherePoly(out)


def _radial_contraction(components):
    """sum_i X_i components[i] as a raw dict."""
    out = {}
    for i in range(3):
        m = [0, 0, 0]
        m[i] = 1
        _dict_add_into(out, _dict_mul({tuple(m): ONE}, components[i]))
    return out


def hessian_sphere(f):
    """Tangential covariant Hessian of f on S2 as a TangentField2.

    Ambient form: (d_i d_j f) dX^i dX^j - (X . grad f) sigma_ab, from the
    second fundamental form of the unit sphere.
    """
    matrix = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            entry = SpherePoly(_dict_diff(_dict_diff(f.coeffs, i), j))
            matrix[i][j] = entry
            matrix[j][i] = entry
    radial = SpherePoly(_radial_contraction(
        [_dict_diff(f.coeffs, i) for i in range(3)]))
    T = TangentField2(matrix)
    return T + TangentField2.metric_term(-radial)


# ---------------------------------------------------------------------------
# tangent fields
# ---------------------------------------------------------------------------

_X = [SpherePoly.coordinate(i) for i in range(3)]


class TangentField1:
    """Tangent covector field V_b = sum_i P_i(X) dX^i/du^b."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        self.comps = list(comps)

    @staticmethod
    def zero():
        return TangentField1([SpherePoly.zero()] * 3)

    def __add__(self, other):
        return TangentField1([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return TangentField1([a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, scale):
        return TangentField1([c * scale for c in self.comps])

    __rmul__ = __mul__

    def _projected(self):
        # remove the radial ambiguity P_i -> P_i - X_i (X . P)
        radial = sum((_X[i] * self.comps[i] for i in range(3)),
                     SpherePoly.zero())
        return [self.comps[i] - _X[i] * radial for i in range(3)]

    def is_zero(self):
        return all(c.is_zero() for c in self._projected())

    def __eq__(self, other):
        if isinstance(other, TangentField1):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def divergence(self):
        """Covariant divergence on S2: sum d_i P_i - X^k X^i d_k P_i - 2 X.P."""
        out = SpherePoly.zero()
        for i in range(3):
            out = out + SpherePoly(_dict_diff(self.comps[i].coeffs, i))
        grads = [[SpherePoly(_dict_diff(self.comps[i].coeffs, k))
                  for k in range(3)] for i in range(3)]
        for i in range(3):
            for k in range(3):
                out = out - _X[k] * _X[i] * grads[i][k]
        for i in range(3):
            out = out - 2 * _X[i] * self.comps[i]
        return out


class TangentField2:
    """Symmetric tangent 2-tensor T_ab = sum_ij M_ij(X) dX^i dX^j.

    Metric terms Q sigma_ab are folded in as Q delta_ij.  The stored M is
    symmetric but not tangentially projected; projection happens only when
    comparing fields, where the radial ambiguity must be quotiented out.
    """

    __slots__ = ("M",)

    def __init__(self, matrix):
        self.M = matrix

    @staticmethod
    def zero():
        z = SpherePoly.zero()
        return TangentField2([[z] * 3 for _ in range(3)])

    @staticmethod
    def metric_term(q):
        """Q(X) times the round metric."""
        z = SpherePoly.zero()
        return TangentField2([[q if i == j else z for j in range(3)]
                              for i in range(3)])

    @staticmethod
    def round_metric():
        return TangentField2.metric_term(SpherePoly.constant(1))

    def __add__(self, other):
        return TangentField2([[self.M[i][j] + other.M[i][j] for j in range(3)]
                              for i in range(3)])

    def __sub__(self, other):
        return TangentField2([[self.M[i][j] - other.M[i][j] for j in range(3)]
                              for i in range(3)])

    def __mul__(self, scale):
        return TangentField2([[self.M[i][j] * scale for j in range(3)]
                              for i in range(3)])

    __rmul__ = __mul__

    def _projected(self):
        # (delta - XX) M (delta - XX), entrywise canonical
        C = [sum((_X[k] * self.M[k][j] for k in range(3)), SpherePoly.zero())
             for j in range(3)]
        s = sum((_X[j] * C[j] for j in range(3)), SpherePoly.zero())
        out = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                out[i][j] = (self.M[i][j] - _X[i] * C[j] - C[i] * _X[j]
                             + _X[i] * _X[j] * s)
        return out

    def is_zero(self):
        return all(e.is_zero() for row in self._projected() for e in row)

    def __eq__(self, other):
        if isinstance(other, TangentField2):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def trace2(self):
        """Trace with the round metric: sum M_ij (delta_ij - X_i X_j)."""
        out = SpherePoly.zero()
        for i in range(3):
            out = out + self.M[i][i]
        quad = SpherePoly.zero()
        for i in range(3):
            for j in range(3):
                quad = quad + _X[i] * _X[j] * self.M[i][j]
        return out - quad

    def contract22(self, other):
        """Full contraction sigma^ac sigma^bd T_ab S_cd.

        Using the projector delta - XX per ambient slot and symmetry of both
        fields this reduces to sum M_ij N_ij - 2 sum_j (M X)_j (N X)_j
        + (X M X)(X N X).
        """
        direct = SpherePoly.zero()
        for i in range(3):
            for j in range(3):
                direct = direct + self.M[i][j] * other.M[i][j]
        mx = [sum((_X[i] * self.M[i][j] for i in range(3)), SpherePoly.zero())
              for j in range(3)]
        nx = [sum((_X[i] * other.M[i][j] for i in range(3)), SpherePoly.zero())
              for j in range(3)]
        cross = sum((mx[j] * nx[j] for j in range(3)), SpherePoly.zero())
        mxx = sum((_X[j] * mx[j] for j in range(3)), SpherePoly.zero())
        nxx = sum((_X[j] * nx[j] for j in range(3)), SpherePoly.zero())
        return direct - 2 * cross + mxx * nxx

    def divergence(self):
        """Covariant divergence as a TangentField1.

        For symmetric M: D_m = sum_i d_i M_im - X^k X^i d_k M_im
        - 3 X^i M_im, from Hess(X^i) = -X^i sigma.
        """
        comps = []
        for m in range(3):
            out = SpherePoly.zero()
            for i in range(3):
                out = out + SpherePoly(_dict_diff(self.M[i][m].coeffs, i))
            for i in range(3):
                for k in range(3):
                    out = out - _X[k] * _X[i] * SpherePoly(
                        _dict_diff(self.M[i][m].coeffs, k))
            for i in range(3):
                out = out - 3 * _X[i] * self.M[i][m]
            comps.append(out)
        return TangentField1(comps)

    def apply_to_gradient(self, f):
        """The covector T_a^b d_b f, i.e. U_i = sum_j M_ij (grad f)_j
        with the second slot contracted through delta - XX."""
        df = [SpherePoly(_dict_diff(f.coeffs, j)) for j in range(3)]
        xdf = sum((_X[j] * df[j] for j in range(3)), SpherePoly.zero())
        comps = []
        for i in range(3):
            direct = sum((self.M[i][j] * df[j] for j in range(3)),
                         SpherePoly.zero())
            mx = sum((self.M[i][j] * _X[j] for j in range(3)),
                     SpherePoly.zero())
            comps.append(direct - mx * xdf)
        return TangentField1(comps)

    def eval_ambient(self, points):
        """Evaluate the ambient coefficient matrix at unit vectors.

        Returns shape (..., 3, 3); chart components follow by contracting
        with the chart jacobian dX^i/du^a on both slots.
        """
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[:-1] + (3, 3))
        for i in range(3):
            for j in range(3):
                out[..., i, j] = self.M[i][j].eval(points)
        return out


def trace2(T):
    return T.trace2()


def contract22(T, S):
    return T.contract22(S)


def divergence2(T):
    return T.divergence()


def divdiv(T):
    return T.divergence().divergence()
