"""Shared numeric tolerances.

Predicates (geodesic, contact, unimodular, ...) use ``default_tol()``,
overridable through the ``CONTACT3_TOL`` environment variable.  Exact
algebraic identities are held to ``IDENTITY_RTOL`` relative to the size
of the data entering them.
"""

import os

# residual allowed on identities that hold exactly in real arithmetic
IDENTITY_RTOL = 1e-12


def default_tol() -> float:
    """Predicate tolerance; CONTACT3_TOL overrides the built-in 1e-9."""
    return float(os.environ.get("CONTACT3_TOL", "1e-9"))
