"""Exact rational scalars for the whole exact pipeline.

Every exact quantity in the package is a rational number held in lowest
terms with positive denominator.  The backend is ``gmpy2.mpq`` when
available (much faster on long contraction chains) and ``fractions.Fraction``
otherwise; both store reduced fractions with arbitrary-precision integers
and print as ``p/q`` (``p`` alone when the denominator is 1).

Floating point never enters this module; the only float conversions in the
package live in the numerical oracle.
"""

from __future__ import annotations

import re

from .errors import InputError

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Q

_TOKEN = re.compile(r"[+-]?\d+(/\d+)?\Z")

ZERO = Q(0)
ONE = Q(1)


def rat(num, den=1):
    """Build a rational from integers (reduced, positive denominator)."""
    return Q(num, den)


def rat_add(a, b):
    return a + b


def rat_mul(a, b):
    return a * b


def rat_neg(a):
    return -a


def rat_inv(a):
    """Multiplicative inverse; zero input raises ``ZeroDivisionError``."""
    if a == 0:
        raise ZeroDivisionError("rational inverse of zero")
    return 1 / a


def format_rational(a) -> str:
    """Render as ``p/q``, or ``p`` when the denominator is 1."""
    return str(a)


def parse_rational(text: str):
    """Parse a ``p/q`` token (or bare integer ``p``).

    Rejects zero denominators and anything that is not an integer fraction.
    """
    token = text.strip()
    if not _TOKEN.match(token):
        raise InputError(f"malformed rational token {token!r}")
    try:
        return Q(token)
    except ZeroDivisionError:
        raise InputError(f"zero denominator in rational token {token!r}") from None
