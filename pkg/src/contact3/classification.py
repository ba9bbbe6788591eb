"""Normal forms for structures whose Reeb vector is geodesic.

In an adapted orthonormal basis {xi, e, phi_e} the brackets of any such
structure reduce, away from degenerate circles, to one of three families:

    family A:  [xi,e] = alpha e + beta phi_e,
               [xi,phi_e] = gamma e + delta phi_e,  [e,phi_e] = 0
    family B:  [xi,e] = C phi_e,  [xi,phi_e] = 0,
               [e,phi_e] = A phi_e + B xi            (A != 0)
    family C:  [xi,e] = Abar e,   [xi,phi_e] = 0,
               [e,phi_e] = Bbar e                    (Abar^2 + Bbar^2 != 0)

Construction branches (this module's case analysis):

    1  xi = +-e1 on an adapted-form algebra          -> A, parameters pass through
    2  xi in the e2-e3 plane at an admissible angle  -> B, quadratic-form (A, B, C);
       the identity A = alpha + delta holds at every admissible angle
    3  p = +-r, q != 0, xi along the distinguished
       in-plane direction                            -> B, (alpha, 0, -beta) resp. (delta, 0, -gamma)
    4  p = +-r, q = 0, xi on the geodesic circle     -> C, (Abar, Bbar) linear in (cos t, sin t)
    5  p = 0 (only +-e1 is geodesic)                 -> A, diagonal-plus-shear
    6  rank-one functional algebra, xi dual to l     -> A, alpha = delta = l(xi)

Geodesic vectors in the interior of the p = +-r, q != 0 circles carry
structures matching none of the three families; ``classify`` reports those
with ``family=None`` and the reduced bracket data.

The +-xi ambiguity folds to a canonical representative (angles to [0, pi)).
The two signs are metrically conjugate, but no bracket-preserving isometry
links them when trace ad(xi)|ker eta != 0, so folding is what makes
classify(xi) and classify(-xi) agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contact_structures import (
    AlmostContactStructure,
    PhiBasis,
    eta_wedge_deta,
    is_contact_form,
    is_contact_metric,
    nijenhuis_normality_residual,
    structure_from_basis,
    xi_in_ker_deta,
)
from .lie_core import (
    E1,
    E2,
    E3,
    LieAlgebra3,
    LinearFunctional,
    MilnorParameters,
    _as_vector,
    bracket,
    from_functional,
    from_milnor,
    invariant_D,
    milnor_invariant_D,
)
from .metric_geometry import (
    Metric3,
    enumerate_unit_geodesics,
    geodesic_defect,
    inplane_geodesic_angles,
    is_geodesic_vector,
)
from .tolerances import IDENTITY_RTOL, default_tol

Vector = np.ndarray

_I3 = Metric3.identity()

FAMILY_PARAM_NAMES = {
    "A": ("alpha", "beta", "gamma", "delta"),
    "B": ("A", "B", "C"),
    "C": ("A_bar", "B_bar"),
    None: ("xi_e_e", "xi_e_phie", "e_phie_e", "e_phie_phie", "e_phie_xi"),
}


class AdmissibilityError(ValueError):
    """Input violates the algebra admissibility constraints."""


class NotGeodesicError(ValueError):
    """The requested Reeb vector is not a geodesic vector."""


def _normal_form_constants(family: str | None, params: tuple[float, ...]) -> np.ndarray:
    """Structure constants of the normal form in (xi, e, phi_e) coordinates."""
    c = np.zeros((3, 3, 3))

    def setb(i, j, coeffs):
        c[i, j] = coeffs
        c[j, i] = [-v for v in coeffs]

    if family == "A":
        a, b, g, d = params
        setb(0, 1, (0.0, a, b))
        setb(0, 2, (0.0, g, d))
    elif family == "B":
        A, B, C = params
        setb(0, 1, (0.0, 0.0, C))
        setb(1, 2, (B, 0.0, A))
    elif family == "C":
        Ab, Bb = params
        setb(0, 1, (0.0, Ab, 0.0))
        setb(1, 2, (0.0, Bb, 0.0))
    else:
        a, b, u, v, w = params
        setb(0, 1, (0.0, a, b))
        setb(1, 2, (w, u, v))
    return c


@dataclass(frozen=True)
class PhiBasisStructure:
    """A structure presented in an adapted basis with its normal form.

    ``basis`` holds the adapted frame in ambient coordinates on the stored
    algebra; ``params`` are the normal-form coefficients of ``family``.
    """

    family: str | None
    params: tuple[float, ...]
    basis: PhiBasis
    source_construction: int | None
    algebra: LieAlgebra3
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        n_expected = len(FAMILY_PARAM_NAMES[self.family])
        if len(self.params) != n_expected:
            raise ValueError(f"family {self.family!r} takes {n_expected} parameters")
        p = tuple(float(v) for v in self.params)
        scale = max(1.0, max(abs(v) for v in p) if p else 1.0)
        if self.family == "A":
            a, b, g, d = p
            if abs(a + d) <= IDENTITY_RTOL * scale:
                raise ValueError("family A requires alpha + delta != 0")
            if abs(a * g + b * d) > 1e-9 * scale * scale:
                raise ValueError("family A requires alpha*gamma + beta*delta = 0")
        elif self.family == "B":
            if abs(p[0]) <= IDENTITY_RTOL * scale:
                raise ValueError("family B requires A != 0")
        elif self.family == "C":
            if p[0] ** 2 + p[1] ** 2 <= (IDENTITY_RTOL * scale) ** 2:
                raise ValueError("family C requires Abar^2 + Bbar^2 != 0")
        object.__setattr__(self, "params", p)
        object.__setattr__(self, "notes", tuple(self.notes))
        res = self.normal_form_residual()
        if res > 1e-10 * max(1.0, self.algebra.scale):
            raise AssertionError(f"normal form does not match raw brackets (residual {res!r})")

    @property
    def params_dict(self) -> dict[str, float]:
        return dict(zip(FAMILY_PARAM_NAMES[self.family], self.params))

    def structure(self, g: Metric3 = _I3) -> AlmostContactStructure:
        return structure_from_basis(g, self.basis.xi, self.basis.e, self.basis.phi_e)

    def normal_form_constants(self) -> np.ndarray:
        return _normal_form_constants(self.family, self.params)

    def raw_basis_constants(self) -> np.ndarray:
        """Ambient structure constants re-expressed in the adapted basis."""
        B = self.basis.matrix
        cols = [B[:, 0], B[:, 1], B[:, 2]]
        c = np.zeros((3, 3, 3))
        for a in range(3):
            for b in range(3):
                c[a, b] = B.T @ bracket(self.algebra, cols[a], cols[b])
        return c

    def normal_form_residual(self) -> float:
        return float(np.abs(self.raw_basis_constants() - self.normal_form_constants()).max())

    def invariant_D(self) -> float:
        return invariant_D(self.algebra)


def _as_params(params) -> MilnorParameters:
    if isinstance(params, MilnorParameters):
        return params
    try:
        return MilnorParameters(*params)
    except (TypeError, ValueError) as exc:
        raise AdmissibilityError(str(exc)) from exc


def construct_case1(params) -> PhiBasisStructure:
    """Branch 1: xi = +-e1 (folded to +e1); family A with the raw parameters."""
    params = _as_params(params)
    return PhiBasisStructure(
        "A",
        (params.alpha, params.beta, params.gamma, params.delta),
        PhiBasis(E1, E2, E3),
        1,
        from_milnor(params),
    )


def construct_case2(params, theta: float) -> PhiBasisStructure:
    """Branch 2: xi = cos(t) e2 + sin(t) e3 at an admissible angle t.

    The admissibility equation alpha cos^2 t + (beta+gamma) sin t cos t +
    delta sin^2 t = 0 must hold; the right-handed frame is {xi, e1,
    sin(t) e2 - cos(t) e3}, in which the brackets take the family B form
    with the three quadratic-form coefficients below and A = alpha + delta.
    """
    params = _as_params(params)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    ct, st = math.cos(theta), math.sin(theta)
    eq = a * ct * ct + (b + g) * st * ct + d * st * st
    if abs(eq) > 1e-9 * max(1.0, params.scale):
        raise NotGeodesicError(
            f"angle {theta!r} violates the in-plane geodesic equation (residual {eq!r})"
        )
    A = d * ct * ct - (b + g) * st * ct + a * st * st
    B = -(g * ct * ct + (d - a) * st * ct - b * st * st)
    C = b * ct * ct + (d - a) * st * ct - g * st * st
    xi = np.array([0.0, ct, st])
    phi_e = np.array([0.0, st, -ct])
    notes = []
    if abs(C) <= 1e-12 * max(1.0, params.scale) and abs(B) <= 1e-12 * max(1.0, params.scale):
        notes.append("degenerate point: also admits a family C presentation (Abar=0)")
    return PhiBasisStructure(
        "B", (A, B, C), PhiBasis(xi, E1, phi_e), 2, from_milnor(params), tuple(notes)
    )


def construct_case3(params) -> PhiBasisStructure:
    """Branch 3: the distinguished in-plane direction for p = +-r, q != 0.

    For p = r the frame is {(q e2 - e3)/s, e1, (e2 + q e3)/s} (left-handed
    by convention) and the normal form is (A, B, C) = (alpha, 0, -beta);
    the mirror p = -r uses {(e2 + q e3)/s, e1, (q e2 - e3)/s} and gives
    (delta, 0, -gamma).  B = 0, so these are never contact.
    """
    params = _as_params(params)
    p, q, r = params.p, params.q, params.r
    tol = default_tol() * max(1.0, abs(p), abs(q), abs(r))
    if abs(q) <= tol:
        raise AdmissibilityError("branch 3 needs q != 0")
    s = math.sqrt(1.0 + q * q)
    u = np.array([0.0, q, -1.0]) / s
    w = np.array([0.0, 1.0, q]) / s
    if abs(p - r) <= tol:
        basis = PhiBasis(u, E1, w)
        abc = (params.alpha, 0.0, -params.beta)
        notes = ("left-handed adapted frame (conjugate orientation)",)
    elif abs(p + r) <= tol:
        basis = PhiBasis(w, E1, u)
        abc = (params.delta, 0.0, -params.gamma)
        notes = ("mirror of the p = r branch",)
    else:
        raise AdmissibilityError("branch 3 needs p = r or p = -r")
    return PhiBasisStructure("B", abc, basis, 3, from_milnor(params), notes)


def construct_case4(params, theta: float) -> PhiBasisStructure:
    """Branch 4: xi on the geodesic circle of a p = +-r, q = 0 algebra.

    For p = r the circle lies in the e1-e3 plane, the frame is
    {cos t e1 + sin t e3, e2, -sin t e1 + cos t e3}, and (Abar, Bbar) =
    alpha (cos t, sin t); mirror for p = -r in the e1-e2 plane with
    (Abar, Bbar) = delta (cos t, -sin t).  Angles fold to [0, pi); eta is
    never a contact form here.
    """
    params = _as_params(params)
    p, q, r = params.p, params.q, params.r
    tol = default_tol() * max(1.0, abs(p), abs(q), abs(r))
    if abs(q) > tol:
        raise AdmissibilityError("branch 4 needs q = 0")
    theta = theta % math.pi
    ct, st = math.cos(theta), math.sin(theta)
    if abs(p - r) <= tol:
        xi = np.array([ct, 0.0, st])
        basis = PhiBasis(xi, E2, np.array([-st, 0.0, ct]))
        ab = (params.alpha * ct, params.alpha * st)
    elif abs(p + r) <= tol:
        xi = np.array([ct, st, 0.0])
        basis = PhiBasis(xi, E3, np.array([st, -ct, 0.0]))
        ab = (params.delta * ct, -params.delta * st)
    else:
        raise AdmissibilityError("branch 4 needs p = r or p = -r")
    notes = []
    if abs(st) <= 1e-12:
        notes.append("t = 0 point: coincides with the diagonal family A normal form")
    return PhiBasisStructure("C", ab, basis, 4, from_milnor(params), tuple(notes))


def construct_case5(params, xi) -> PhiBasisStructure:
    """Branch 5: p = 0.  Only +-e1 is geodesic; anything else is rejected.

    For a candidate xi off the axis the bracket [xi, X] picks up a
    component along xi for X in ker eta, so xi cannot lie in ker d_eta;
    the rejection message reports that obstruction.
    """
    params = _as_params(params)
    tol = default_tol() * max(1.0, params.scale)
    if abs(params.p) > tol:
        raise AdmissibilityError("branch 5 needs p = 0")
    x = _as_vector(xi)
    x = x / np.linalg.norm(x)
    if abs(abs(x[0]) - 1.0) > 1e-9:
        # obstruction: eta([xi, E]) for the in-plane companion E of xi
        L = from_milnor(params)
        ct = x[0]
        plane = np.linalg.norm(x[1:])
        E = np.array([-plane, *(ct * x[1:] / plane)])
        resid = float(x @ bracket(L, x, E))
        raise NotGeodesicError(
            "xi is admissible only along +-e1 when p = 0: "
            f"[xi, X] leaves ker(eta) for X in ker(eta) (eta([xi, X]) = {resid!r})"
        )
    out = construct_case1(params)
    notes = ("only +-e1 is geodesic when p = 0",)
    if x[0] < 0:
        notes = notes + ("xi folded to the +e1 representative",)
    return PhiBasisStructure("A", out.params, out.basis, 5, out.algebra, notes)


def construct_case6(l, xi) -> PhiBasisStructure:
    """Branch 6: rank-one algebra [x, y] = l(x) y - l(y) x.

    The kernel condition forces l to vanish on ker eta, i.e. xi parallel
    to the dual of l; then alpha := l(xi) and the structure is family A
    with alpha = delta, beta = gamma = 0.
    """
    if not isinstance(l, LinearFunctional):
        l = LinearFunctional(np.asarray(l, dtype=float))
    x = _as_vector(xi)
    x = x / np.linalg.norm(x)
    dual = l.dual
    if min(np.linalg.norm(x - dual), np.linalg.norm(x + dual)) > 1e-9:
        raise NotGeodesicError(
            "xi must be parallel to the dual of l: l does not vanish on the "
            f"would-be ker(eta) (l projected onto xi-perp has norm "
            f"{float(np.linalg.norm(l.l - (l.l @ x) * x))!r})"
        )
    notes: tuple[str, ...] = ()
    if np.linalg.norm(x + dual) <= 1e-9:
        notes = ("xi folded to the +dual representative",)
    alpha = l(dual)
    order = np.argsort(np.abs(dual), kind="stable")
    e = np.eye(3)[order[0]] - float(dual @ np.eye(3)[order[0]]) * dual
    e = e / np.linalg.norm(e)
    phi_e = np.cross(dual, e)
    return PhiBasisStructure(
        "A", (alpha, 0.0, 0.0, alpha), PhiBasis(dual, e, phi_e), 6, from_functional(l), notes
    )


def _reduce_outside(L: LieAlgebra3, xi: Vector) -> PhiBasisStructure:
    """Adapted frame for a geodesic xi whose brackets fit no family.

    The frame rotation is fixed by putting the kernel of ad(xi)|ker eta
    along phi_e (the image of ad is one-dimensional on these algebras), so
    [xi, phi_e] = 0 and the remaining five coefficients are reported.
    """
    order = np.argsort(np.abs(xi), kind="stable")
    u = np.eye(3)[order[0]] - (xi @ np.eye(3)[order[0]]) * xi
    u = u / np.linalg.norm(u)
    v = np.cross(xi, u)
    M = np.array(
        [[w @ bracket(L, xi, z) for z in (u, v)] for w in (u, v)]
    )
    if np.abs(M).max() <= 1e-12 * max(1.0, L.scale):
        rho = 0.0
    else:
        # kernel direction of M (det M = 0 here): null right-singular vector
        _, _, Vt = np.linalg.svd(M)
        k1, k2 = Vt[-1]
        rho = math.atan2(-k1, k2) % math.pi
    e = math.cos(rho) * u + math.sin(rho) * v
    fe = -math.sin(rho) * u + math.cos(rho) * v
    a = float(e @ bracket(L, xi, e))
    b = float(fe @ bracket(L, xi, e))
    ue = float(e @ bracket(L, e, fe))
    ve = float(fe @ bracket(L, e, fe))
    we = float(xi @ bracket(L, e, fe))
    return PhiBasisStructure(
        None,
        (a, b, ue, ve, we),
        PhiBasis(xi, e, fe),
        None,
        L,
        ("brackets match none of the A/B/C normal forms; frame fixed by [xi, phi_e] = 0",),
    )


@dataclass(frozen=True)
class ClassificationReport:
    """Classification of one (algebra, xi) pair."""

    family: str | None
    params: dict[str, float]
    D: float
    geodesic_case: str
    contact_form: bool
    contact_metric: bool
    normality_residual: float
    errata_notes: tuple[str, ...]
    structure: PhiBasisStructure = field(repr=False)


def _canonical_sign(x: Vector) -> Vector:
    for comp in x:
        if abs(comp) > 1e-9:
            return x if comp > 0 else -x
    raise ValueError("zero vector")


def _report(source_tag: str, ps: PhiBasisStructure, extra_notes: tuple[str, ...] = ()) -> ClassificationReport:
    L = ps.algebra
    s = ps.structure()
    if not xi_in_ker_deta(L, s):
        raise AssertionError("constructed structure lost the ker d_eta condition")
    return ClassificationReport(
        family=ps.family,
        params=ps.params_dict,
        D=invariant_D(L),
        geodesic_case=source_tag,
        contact_form=is_contact_form(L, s),
        contact_metric=is_contact_metric(L, s, _I3),
        normality_residual=nijenhuis_normality_residual(L, s),
        errata_notes=ps.notes + extra_notes,
        structure=ps,
    )


def classify(source, xi, *, tol: float | None = None) -> ClassificationReport:
    """Classify the structure with Reeb vector xi on the given algebra.

    ``source`` is either adapted-form parameters or a linear functional.
    xi must be a unit geodesic vector (rejected otherwise, since xi in
    ker d_eta is equivalent to xi geodesic); it is matched against the
    closed-form geodesic enumeration and routed to the branch that covers
    it, folding xi to the canonical sign representative.
    """
    if tol is None:
        tol = default_tol()
    x = _as_vector(xi)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise NotGeodesicError("xi must be nonzero")
    x = x / nx

    if isinstance(source, LinearFunctional) or (
        not isinstance(source, MilnorParameters) and np.ndim(source) == 1 and len(np.asarray(source)) == 3
    ):
        l = source if isinstance(source, LinearFunctional) else LinearFunctional(np.asarray(source, float))
        L = from_functional(l)
        enum = enumerate_unit_geodesics(functional=l)
        if not is_geodesic_vector(L, _I3, x, tol):
            raise NotGeodesicError(
                f"xi is not a geodesic vector (defect {float(geodesic_defect(L, _I3, x))!r}); "
                "only the dual direction of l is geodesic"
            )
        return _report(enum.case_tag, construct_case6(l, x))

    params = _as_params(source)
    L = from_milnor(params)
    enum = enumerate_unit_geodesics(params)
    if not is_geodesic_vector(L, _I3, x, tol):
        raise NotGeodesicError(
            f"xi is not a geodesic vector (defect {float(geodesic_defect(L, _I3, x))!r}): "
            "g([xi, y], xi) must vanish for every y; equivalently xi fails the "
            "ker d_eta condition (eta([xi, X]) != 0 for some X in ker eta)"
        )
    p, q, r = params.p, params.q, params.r
    ctol = default_tol() * max(1.0, abs(p), abs(q), abs(r))
    on_line = abs(p - r) <= ctol or abs(p + r) <= ctol

    # candidates in priority order: axis, distinguished in-plane direction,
    # in-plane roots, geodesic circle; xi snaps to the nearest feature
    def pair_dist(v):
        return min(np.linalg.norm(x - v), np.linalg.norm(x + v))

    candidates: list[tuple[float, str, object]] = [(pair_dist(E1), "axis", None)]
    if on_line and abs(q) > ctol:
        s = math.sqrt(1.0 + q * q)
        special = np.array([0.0, q, -1.0]) / s if abs(p - r) <= ctol else np.array([0.0, 1.0, q]) / s
        candidates.append((pair_dist(special), "special", special))
    for root in inplane_geodesic_angles(params):
        rep = np.array([0.0, math.cos(root), math.sin(root)])
        candidates.append((pair_dist(rep), "root", root))
    if on_line:
        fam = enum.families[0]
        candidates.append((fam.distance(x), "circle", fam))

    best = None
    for dist, kind, payload in candidates:
        if best is None or dist < best[0] - 1e-12:
            best = (dist, kind, payload)
    dist, kind, payload = best
    if dist > 0.2:
        raise NotGeodesicError(
            "xi passed the geodesic tolerance but lies far from every "
            f"enumerated geodesic (distance {float(dist)!r})"
        )
    snapped = dist > 1e-9
    extra = (f"xi snapped to the nearest geodesic (moved {float(dist)!r})",) if snapped else ()

    if kind == "axis":
        if abs(p) <= ctol:
            xi_exact = x if not snapped else (E1 if x[0] > 0 else -E1)
            return _report(enum.case_tag, construct_case5(params, xi_exact), extra)
        if x[0] < 0:
            extra = extra + ("xi folded to the +e1 representative",)
        return _report(enum.case_tag, construct_case1(params), extra)
    if kind == "special":
        if np.linalg.norm(x - payload) > np.linalg.norm(x + payload):
            extra = extra + ("xi folded to the canonical sign representative",)
        return _report(enum.case_tag, construct_case3(params), extra)
    if kind == "root":
        rep = np.array([0.0, math.cos(payload), math.sin(payload)])
        if np.linalg.norm(x - rep) > 1e-3:
            extra = extra + ("xi folded to the angle representative in [0, pi)",)
        return _report(enum.case_tag, construct_case2(params, payload), extra)

    # on the geodesic circle: project, then fold the angle to [0, pi)
    fam = payload
    n = fam.normal
    proj = x - (x @ n) * n
    proj = proj / np.linalg.norm(proj)
    if abs(q) <= ctol:
        axis = 2 if abs(p - r) <= ctol else 1  # circle through e1 and e3 resp. e2
        theta = math.atan2(proj[axis], proj[0])
        if theta < 0:
            extra = extra + ("xi folded to the angle representative in [0, pi)",)
        return _report(enum.case_tag, construct_case4(params, theta % math.pi), extra)
    return _report(enum.case_tag, _reduce_outside(L, _canonical_sign(proj)), extra)


def classify_representatives(source, *, tol: float | None = None) -> list[ClassificationReport]:
    """Reports for one representative of each geodesic orbit.

    One representative per antipodal pair of isolated geodesics and per
    admissible in-plane angle; full circles additionally contribute the
    distinguished direction (branch 3) and one interior sample at a
    deterministic angle.
    """
    reports = []
    if isinstance(source, LinearFunctional) or (
        not isinstance(source, MilnorParameters) and np.ndim(source) == 1 and len(np.asarray(source)) == 3
    ):
        l = source if isinstance(source, LinearFunctional) else LinearFunctional(np.asarray(source, float))
        return [classify(l, l.dual, tol=tol)]
    params = _as_params(source)
    reports.append(classify(params, E1, tol=tol))
    for root in inplane_geodesic_angles(params):
        # when q != 0 the distinguished branch-3 direction is one of the roots
        reports.append(classify(params, np.array([0.0, math.cos(root), math.sin(root)]), tol=tol))
    p, q, r = params.p, params.q, params.r
    ctol = default_tol() * max(1.0, abs(p), abs(q), abs(r))
    if abs(p - r) <= ctol or abs(p + r) <= ctol:
        if abs(q) > ctol:
            s = math.sqrt(1.0 + q * q)
            special = np.array([0.0, q, -1.0]) / s if abs(p - r) <= ctol else np.array([0.0, 1.0, q]) / s
            interior = (E1 + special) / math.sqrt(2.0)
        else:
            axis = E3 if abs(p - r) <= ctol else E2
            interior = (E1 + axis) / math.sqrt(2.0)
        reports.append(classify(params, interior, tol=tol))
    return reports


# -- isomorphism ----------------------------------------------------------


def _map_residual(c1: np.ndarray, c2: np.ndarray, rho: float, conj: bool) -> float:
    F = np.eye(3)
    cr, sr = math.cos(rho), math.sin(rho)
    sig = -1.0 if conj else 1.0
    F[1:, 1] = (cr, sr)
    F[1:, 2] = (-sr * sig, cr * sig)
    lhs = np.einsum("abk,mk->abm", c1, F)  # f([x, y]_1)
    rhs = np.einsum("ia,jb,ijm->abm", F, F, c2)  # [f x, f y]_2
    return float(np.abs(lhs - rhs).max())


def is_isomorphic(s1: PhiBasisStructure, s2: PhiBasisStructure, tol: float | None = None):
    """Search for a structure-preserving isometry intertwining the brackets.

    Candidate maps send xi to xi and rotate the ker-eta plane, optionally
    composed with the conjugation (xi, phi) -> (xi, -phi); the rotation
    angle is seeded on a 720-point grid and locally refined.  Equality of
    the algebra invariant D is necessary and checked first.  Returns the
    map in ambient coordinates, or None.
    """
    if tol is None:
        tol = default_tol()
    D1, D2 = s1.invariant_D(), s2.invariant_D()
    if abs(D1 - D2) > 1e-6 * max(1.0, abs(D1), abs(D2)):
        return None
    c1 = s1.raw_basis_constants()
    c2 = s2.raw_basis_constants()
    scale = max(1.0, float(np.abs(c1).max()), float(np.abs(c2).max()))
    best = (math.inf, 0.0, False)
    seeds = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    for conj in (False, True):
        for rho in seeds:
            res = _map_residual(c1, c2, rho, conj)
            if res < best[0]:
                best = (res, rho, conj)
    res, rho, conj = best
    # local refinement: shrinking three-point search around the best seed
    h = 2.0 * math.pi / 720
    while h > 1e-12:
        moved = False
        for cand in (rho - h, rho + h):
            r2 = _map_residual(c1, c2, cand, conj)
            if r2 < res:
                res, rho, moved = r2, cand, True
        if not moved:
            h *= 0.5
    if res > tol * scale:
        return None
    F = np.eye(3)
    cr, sr = math.cos(rho), math.sin(rho)
    sig = -1.0 if conj else 1.0
    F[1:, 1] = (cr, sr)
    F[1:, 2] = (-sr * sig, cr * sig)
    return s2.basis.matrix @ F @ s1.basis.matrix.T


# -- normality scan -------------------------------------------------------


@dataclass(frozen=True)
class NormalScanResult:
    """Empirical zero set of the normality residual over a parameter grid."""

    family: str
    names: tuple[str, ...]
    points: np.ndarray
    residuals: np.ndarray
    normal_mask: np.ndarray
    matched_relation: str | None
    skipped: int

    def summary(self) -> str:
        n = int(self.normal_mask.sum())
        rel = self.matched_relation or "no candidate relation matches"
        return (
            f"family {self.family}: {n}/{len(self.points)} grid points normal "
            f"(residual < 1e-9); zero set matches: {rel}; skipped {self.skipped}"
        )


_DEFAULT_GRIDS = {
    "A": {"p": np.linspace(-2.0, 2.0, 9), "q": np.linspace(-2.0, 2.0, 7), "r": np.linspace(0.5, 2.0, 4)},
    "B": {"A": np.linspace(-2.0, 2.0, 9), "B": np.linspace(-2.0, 2.0, 9), "C": np.linspace(-2.0, 2.0, 9)},
    "C": {"A_bar": np.linspace(-2.0, 2.0, 11), "B_bar": np.linspace(-2.0, 2.0, 11)},
}

_CANDIDATE_RELATIONS = {
    "A": ("alpha = delta and beta = -gamma (p = 0)", lambda t: max(abs(t[0] - t[3]), abs(t[1] + t[2]))),
    "B": ("B = 0 and C = 0", lambda t: max(abs(t[1]), abs(t[2]))),
    "C": ("Abar = 0", lambda t: abs(t[0])),
}


def _family_structure(family: str, values: tuple[float, ...]):
    if family == "A":
        p_, q_, r_ = values
        params = MilnorParameters.from_pqr(p_, q_, r_)
        ps = construct_case1(params)
        return ps.algebra, ps.structure(), (params.alpha, params.beta, params.gamma, params.delta)
    if family == "B" and abs(values[0]) <= 1e-12:
        raise ValueError("family B invariant A != 0 violated")
    if family == "C" and values[0] ** 2 + values[1] ** 2 <= 1e-24:
        raise ValueError("family C invariant Abar^2 + Bbar^2 != 0 violated")
    c = _normal_form_constants(family, values)
    L = LieAlgebra3(c)
    return L, structure_from_basis(_I3, E1, E2, E3), values


def normal_scan(
    family: str,
    grid: dict[str, np.ndarray] | None = None,
    *,
    tol: float = 1e-9,
) -> NormalScanResult:
    """Evaluate the normality residual over a grid of family parameters.

    Grid points violating the family invariant (A = 0, Abar = Bbar = 0, or
    r = 0 for family A's (p, q, r) chart) are skipped.  The observed zero
    set is compared against a candidate closed-form relation; agreement is
    reported only as an empirical statement about the evaluated grid.
    """
    if family not in _DEFAULT_GRIDS:
        raise ValueError("family must be one of 'A', 'B', 'C'")
    axes = grid or _DEFAULT_GRIDS[family]
    names = tuple(axes.keys())
    mesh = np.meshgrid(*axes.values(), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    residuals = []
    kept = []
    skipped = 0
    for row in pts:
        values = tuple(float(v) for v in row)
        try:
            L, s, nf = _family_structure(family, values)
        except ValueError:
            skipped += 1
            continue
        residuals.append(nijenhuis_normality_residual(L, s))
        kept.append(values)
    points = np.array(kept)
    residuals = np.array(residuals)
    mask = residuals <= tol
    rel_name, rel_fn = _CANDIDATE_RELATIONS[family]
    if family == "A":
        # the relation reads off the bracket coefficients, not the chart
        rel_vals = np.array(
            [rel_fn(_family_structure("A", tuple(v))[2]) for v in points]
        )
    else:
        rel_vals = np.array([rel_fn(v) for v in points])
    matched = rel_name if bool(np.all((rel_vals <= 1e-9) == mask)) else None
    return NormalScanResult(family, names, points, residuals, mask, matched, skipped)
