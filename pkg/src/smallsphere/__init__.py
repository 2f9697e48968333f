"""Exact verification engine for the small-sphere mass expansion of static
extensions, plus a floating-point geodesic-sphere oracle."""

from .boundary import boundary_expansion
from .curvature import (flat_jet, jet_from_source, random_jet,
                        riemann_from_ricci, round_jet)
from .errors import (DegreeOverflowError, InputError, SmallSphereError,
                     VerificationError)
from .mass import (full_expansion, mass_first_order, mass_second_order,
                   verification_ledger)
from .oracle import fit_expansion
from .rational import Q, format_rational, parse_rational

__all__ = [
    "DegreeOverflowError",
    "InputError",
    "SmallSphereError",
    "VerificationError",
    "Q",
    "boundary_expansion",
    "fit_expansion",
    "flat_jet",
    "format_rational",
    "full_expansion",
    "jet_from_source",
    "mass_first_order",
    "mass_second_order",
    "parse_rational",
    "random_jet",
    "riemann_from_ricci",
    "round_jet",
    "verification_ledger",
]

__version__ = "0.1.0"
