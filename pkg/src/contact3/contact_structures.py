"""Almost contact metric structures on a 3D metric Lie algebra.

A structure is a triple (phi, xi, eta) with

    eta(xi) = 1,   phi(xi) = 0,   eta o phi = 0,
    phi^2 = -Id + xi (x) eta,
    g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y),

so phi is a quarter-turn of the plane ker(eta) = xi-perp.  The exterior
derivative of eta on constant-coefficient fields is d_eta(X, Y) =
-eta([X, Y]) (no 1/2 factor), which makes

    xi in ker d_eta  <=>  L_xi eta = 0

an exact identity.  Both contact predicates are exposed: eta a contact
form (eta ^ d_eta != 0) and the stricter contact metric condition
d_eta = Phi with Phi(X, Y) = g(X, phi Y).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lie_core import LieAlgebra3, _as_vector, bracket
from .metric_geometry import Metric3
from .tolerances import IDENTITY_RTOL, default_tol

Vector = np.ndarray


class KerConditionViolation(ValueError):
    """Raised when an operation requires xi in the kernel of d_eta."""


@dataclass(frozen=True)
class AlmostContactStructure:
    """The tensor triple (phi, xi, eta) in the fixed basis.

    eta is stored as a covector; metric compatibility is the caller's
    responsibility (checked by the constructors that know the metric).
    """

    phi: np.ndarray
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        xi = _as_vector(self.xi)
        eta = _as_vector(self.eta)
        if phi.shape != (3, 3):
            raise ValueError("phi must be a 3x3 matrix")
        scale = max(1.0, np.abs(phi).max())
        if abs(eta @ xi - 1.0) > IDENTITY_RTOL:
            raise ValueError("eta(xi) must equal 1")
        if np.abs(phi @ xi).max() > IDENTITY_RTOL * scale:
            raise ValueError("phi(xi) must vanish")
        if np.abs(eta @ phi).max() > IDENTITY_RTOL * scale:
            raise ValueError("eta o phi must vanish")
        if np.abs(phi @ phi + np.eye(3) - np.outer(xi, eta)).max() > IDENTITY_RTOL * scale**2:
            raise ValueError("phi^2 must equal -Id + xi (x) eta")
        for a in (phi, xi, eta):
            a.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)


@dataclass(frozen=True)
class PhiBasis:
    """Orthonormal adapted basis {xi, e, phi_e} with phi_e = phi(e)."""

    xi: np.ndarray
    e: np.ndarray
    phi_e: np.ndarray

    def __post_init__(self):
        for name in ("xi", "e", "phi_e"):
            v = _as_vector(getattr(self, name))
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        B = self.matrix
        if np.abs(B.T @ B - np.eye(3)).max() > 1e-9:
            raise ValueError("phi-basis must be orthonormal")

    @property
    def matrix(self) -> np.ndarray:
        """Columns are (xi, e, phi_e)."""
        return np.column_stack([self.xi, self.e, self.phi_e])


def _complement_basis(g: Metric3, xi: Vector) -> tuple[Vector, Vector]:
    # g-orthonormal (u, v) spanning ker eta, ordered so det[xi, u, v] > 0
    order = np.argsort(np.abs(xi), kind="stable")
    u = np.eye(3)[order[0]]
    u = u - g.inner(xi, u) * xi
    u = u / g.norm(u)
    v = np.eye(3)[order[1]]
    v = v - g.inner(xi, v) * xi - g.inner(u, v) * u
    v = v / g.norm(v)
    if np.linalg.det(np.column_stack([xi, u, v])) < 0.0:
        v = -v
    return u, v


def build_structure(g: Metric3, xi, orientation: int = +1) -> AlmostContactStructure:
    """Structure with the given unit Reeb vector; phi is the quarter turn of ker eta.

    The turning sense follows the basis orientation (det[xi, u, v] > 0);
    ``orientation=-1`` yields the conjugate structure with phi negated on
    the plane.
    """
    xi = _as_vector(xi)
    if abs(g.norm(xi) - 1.0) > 1e-9:
        raise ValueError("xi must be a unit vector in the metric")
    if orientation not in (+1, -1):
        raise ValueError("orientation must be +1 or -1")
    u, v = _complement_basis(g, xi)
    phi = orientation * (np.outer(v, g.g @ u) - np.outer(u, g.g @ v))
    return AlmostContactStructure(phi, xi, g.g @ xi)


def structure_from_basis(g: Metric3, xi, e, phi_e) -> AlmostContactStructure:
    """Structure determined by an explicit adapted basis (either handedness)."""
    xi, e, phi_e = (_as_vector(w) for w in (xi, e, phi_e))
    B = np.column_stack([xi, e, phi_e])
    if np.abs(B.T @ g.g @ B - np.eye(3)).max() > 1e-9:
        raise ValueError("basis must be g-orthonormal")
    phi = np.outer(phi_e, g.g @ e) - np.outer(e, g.g @ phi_e)
    return AlmostContactStructure(phi, xi, g.g @ xi)


def compatibility_residual(s: AlmostContactStructure, g: Metric3) -> float:
    """max |g(phi X, phi Y) - g(X, Y) + eta(X) eta(Y)| over basis pairs."""
    gm = g.g
    res = s.phi.T @ gm @ s.phi - gm + np.outer(s.eta, s.eta)
    return float(np.abs(res).max())


def fundamental_two_form(s: AlmostContactStructure, g: Metric3, X, Y) -> float:
    """Phi(X, Y) = g(X, phi Y); antisymmetric, with Phi(xi, .) = 0."""
    return float(_as_vector(X) @ g.g @ s.phi @ _as_vector(Y))


def d_eta(L: LieAlgebra3, s: AlmostContactStructure, X, Y) -> float:
    """d_eta(X, Y) = -eta([X, Y]) on constant-coefficient fields."""
    return float(-s.eta @ bracket(L, X, Y))


def lie_derivative_eta(L: LieAlgebra3, s: AlmostContactStructure, X) -> float:
    """(L_xi eta)(X) = -eta([xi, X]) on constant-coefficient fields."""
    return float(-s.eta @ bracket(L, s.xi, X))


def xi_in_ker_deta(L: LieAlgebra3, s: AlmostContactStructure, tol: float | None = None) -> bool:
    """True iff d_eta(xi, e_i) vanishes for all i.

    Computed both through d_eta and through the Lie derivative of eta;
    the two routes must agree bit-for-bit on the boolean.
    """
    if tol is None:
        tol = default_tol()
    eye = np.eye(3)
    via_deta = all(abs(d_eta(L, s, s.xi, eye[i])) <= tol for i in range(3))
    via_lie = all(abs(lie_derivative_eta(L, s, eye[i])) <= tol for i in range(3))
    if via_deta != via_lie:
        raise AssertionError("d_eta and Lie-derivative predicates disagree")
    return via_deta


def _ker_eta_basis(s: AlmostContactStructure) -> tuple[Vector, Vector]:
    # any vector of ker eta is a combination of e and phi(e) for e in it;
    # project along xi using eta itself so no metric is needed here
    order = np.argsort(np.abs(s.xi), kind="stable")
    e = np.eye(3)[order[0]] - float(s.eta @ np.eye(3)[order[0]]) * s.xi
    e = e / np.linalg.norm(e)
    return e, s.phi @ e


def check_ker_condition(L: LieAlgebra3, s: AlmostContactStructure, tol: float | None = None) -> bool:
    """Verify [xi, X] stays in ker eta for X in a ker-eta basis.

    Requires xi in ker d_eta; under that hypothesis the check can only
    fail through an implementation bug, never through the input data.
    """
    if tol is None:
        tol = default_tol()
    if not xi_in_ker_deta(L, s, tol):
        raise KerConditionViolation("precondition failed: xi is not in ker d_eta")
    e, fe = _ker_eta_basis(s)
    return all(abs(float(s.eta @ bracket(L, s.xi, X))) <= tol for X in (e, fe))


def is_contact_metric(
    L: LieAlgebra3, s: AlmostContactStructure, g: Metric3, tol: float | None = None
) -> bool:
    """True iff d_eta(X, Y) = Phi(X, Y) on all basis pairs."""
    if tol is None:
        tol = default_tol()
    eye = np.eye(3)
    return all(
        abs(d_eta(L, s, eye[i], eye[j]) - fundamental_two_form(s, g, eye[i], eye[j])) <= tol
        for i, j in itertools.combinations(range(3), 2)
    )


def eta_wedge_deta(L: LieAlgebra3, s: AlmostContactStructure) -> float:
    """(eta ^ d_eta)(e1, e2, e3) via the alternating sum."""
    eye = np.eye(3)
    total = 0.0
    for i, j, k, sign in ((0, 1, 2, 1.0), (1, 0, 2, -1.0), (2, 0, 1, 1.0)):
        total += sign * float(s.eta @ eye[i]) * d_eta(L, s, eye[j], eye[k])
    return total


def is_contact_form(L: LieAlgebra3, s: AlmostContactStructure, tol: float | None = None) -> bool:
    """True iff the 3-form eta ^ d_eta is nonzero."""
    if tol is None:
        tol = default_tol()
    return abs(eta_wedge_deta(L, s)) > tol


def nijenhuis_normality_residual(L: LieAlgebra3, s: AlmostContactStructure) -> float:
    """Max norm over basis pairs of N = [phi, phi] + 2 d_eta (x) xi.

    N(X, Y) = phi^2 [X,Y] + [phi X, phi Y] - phi [phi X, Y] - phi [X, phi Y]
              + 2 d_eta(X, Y) xi;
    the structure is normal when the residual vanishes.  Antisymmetry of N
    is asserted as an internal consistency check.
    """
    phi, xi = s.phi, s.xi
    eye = np.eye(3)

    def N(X, Y):
        t = phi @ phi @ bracket(L, X, Y)
        t = t + bracket(L, phi @ X, phi @ Y)
        t = t - phi @ bracket(L, phi @ X, Y)
        t = t - phi @ bracket(L, X, phi @ Y)
        return t + 2.0 * d_eta(L, s, X, Y) * xi

    worst = 0.0
    sym_scale = max(1.0, L.scale) * max(1.0, np.abs(phi).max()) ** 2
    for i in range(3):
        for j in range(i + 1, 3):
            nij = N(eye[i], eye[j])
            if np.abs(nij + N(eye[j], eye[i])).max() > IDENTITY_RTOL * sym_scale:
                raise AssertionError("normality tensor is not antisymmetric")
            worst = max(worst, float(np.abs(nij).max()))
    return worst
