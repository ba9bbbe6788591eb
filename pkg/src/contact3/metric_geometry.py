"""Left-invariant Riemannian geometry of a 3D metric Lie algebra.

With the metric fixed on the algebra, the connection is the Koszul
formula restricted to constant-coefficient fields,

    2 g(nabla_x y, z) = g([x,y], z) - g([y,z], x) + g([z,x], y),

and a unit vector x is geodesic (nabla_x x = 0) exactly when
g([x, e_i], x) = 0 for all basis vectors.  For the adapted-form algebras
the unit geodesic set is computed in closed form case by case, and a
brute-force sphere scan is provided as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
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
)
from .tolerances import IDENTITY_RTOL, default_tol

Vector = np.ndarray


@dataclass(frozen=True)
class Metric3:
    """Symmetric positive definite inner product matrix on the fixed basis."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.shape != (3, 3):
            raise ValueError("metric must be a 3x3 matrix")
        if not np.all(np.isfinite(g)):
            raise ValueError("metric entries must be finite")
        if np.abs(g - g.T).max() > IDENTITY_RTOL * max(np.abs(g).max(), 1.0):
            raise ValueError("metric must be symmetric")
        if np.linalg.eigvalsh(g).min() <= 0.0:
            raise ValueError("metric must be positive definite")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def identity(cls) -> "Metric3":
        return cls(np.eye(3))

    def inner(self, x, y) -> float:
        return float(_as_vector(x) @ self.g @ _as_vector(y))

    def norm(self, x) -> float:
        return math.sqrt(max(self.inner(x, x), 0.0))


def levi_civita(L: LieAlgebra3, g: Metric3, x, y) -> Vector:
    """nabla_x y for constant-coefficient fields (Koszul formula)."""
    x = _as_vector(x)
    y = _as_vector(y)
    gm = g.g
    bxy = bracket(L, x, y)
    rhs = np.empty(3)
    for k in range(3):
        ek = np.eye(3)[k]
        rhs[k] = bxy @ gm @ ek - bracket(L, y, ek) @ gm @ x + bracket(L, ek, x) @ gm @ y
    return 0.5 * np.linalg.solve(gm, rhs)


def geodesic_defect(L: LieAlgebra3, g: Metric3, x) -> float:
    """max_i |g([x, e_i], x)|; zero exactly on geodesic vectors."""
    x = _as_vector(x)
    return max(abs(bracket(L, x, np.eye(3)[i]) @ g.g @ x) for i in range(3))


def is_geodesic_vector(L: LieAlgebra3, g: Metric3, x, tol: float | None = None) -> bool:
    """True iff g([x, e_i], x) <= tol * |x|^2 for every basis vector.

    Equivalent to nabla_x x = 0; the connection-based restatement is kept
    as a separate code path (``levi_civita``) so the two can be checked
    against each other.
    """
    x = _as_vector(x)
    nx2 = g.inner(x, x)
    if nx2 == 0.0:
        raise ValueError("the zero vector cannot be a geodesic vector")
    if tol is None:
        tol = default_tol()
    return geodesic_defect(L, g, x) <= tol * nx2


def inplane_geodesic_angles(params: MilnorParameters | tuple, *, residual_tol: float | None = None) -> list[float]:
    """Angles t in [0, pi) with alpha cos^2 t + (beta+gamma) sin t cos t + delta sin^2 t = 0.

    Solved through the tan t quadratic ``delta u^2 + (beta+gamma) u + alpha``;
    when delta = 0 the cos t = 0 root is handled explicitly since the tan
    substitution loses it.  Empty when the discriminant is negative.
    """
    if not isinstance(params, MilnorParameters):
        params = MilnorParameters(*params)
    a, bg, d = params.alpha, params.beta + params.gamma, params.delta
    scale = params.scale
    if residual_tol is None:
        residual_tol = IDENTITY_RTOL * scale
    def fold(angle: float) -> float:
        # atan output折 into [0, pi); tiny negative angles round to pi under
        # the modulo, which is the same direction as 0
        t = angle % math.pi
        return 0.0 if t >= math.pi else t

    raw: list[float] = []
    if abs(d) > IDENTITY_RTOL * scale:
        disc = bg * bg - 4.0 * a * d
        if disc >= 0.0:
            sq = math.sqrt(disc)
            raw = [fold(math.atan((-bg + sq) / (2.0 * d))), fold(math.atan((-bg - sq) / (2.0 * d)))]
    else:
        raw = [math.pi / 2.0]
        if abs(bg) > IDENTITY_RTOL * scale:
            raw.append(fold(math.atan(-a / bg)))
    roots: list[float] = []
    for t in sorted(raw):
        gap = min((abs(t - u) % math.pi, math.pi - abs(t - u) % math.pi) for u in roots) if roots else None
        if gap is None or min(gap) > 1e-12:
            roots.append(t)
    for t in roots:
        res = abs(a * math.cos(t) ** 2 + bg * math.sin(t) * math.cos(t) + d * math.sin(t) ** 2)
        if res > max(residual_tol, 64.0 * np.finfo(float).eps * scale):
            raise ArithmeticError(f"root t={t!r} has residual {res!r}")
    return roots


@dataclass(frozen=True)
class CircleFamily:
    """Unit-circle family t -> cos(t) u + sin(t) v in the plane span{u, v}.

    ``angles`` restricts the admissible parameters; ``None`` means the full
    circle.  Angles live in [0, pi): each one stands for an antipodal pair.
    """

    u: np.ndarray
    v: np.ndarray
    angles: tuple[float, ...] | None = None

    def __post_init__(self):
        u = _as_vector(self.u)
        v = _as_vector(self.v)
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def point(self, t: float) -> Vector:
        return math.cos(t) * self.u + math.sin(t) * self.v

    @property
    def normal(self) -> Vector:
        return np.cross(self.u, self.v)

    def distance(self, x) -> float:
        """Euclidean distance from unit x to the circle (full-circle case)."""
        x = _as_vector(x)
        n = self.normal
        y = x - (x @ n) * n
        ny = np.linalg.norm(y)
        if ny < 1e-15:
            return math.sqrt(2.0)
        return float(np.linalg.norm(x - y / ny))


@dataclass(frozen=True)
class GeodesicEnumeration:
    """Closed-form description of the unit geodesic set.

    ``discrete`` holds isolated solutions; ``families`` holds circle
    families (full circles, or a circle with a finite admissible angle
    set).  The case tag records the parameter regime that produced it.
    """

    case_tag: str
    discrete: tuple[np.ndarray, ...]
    families: tuple[CircleFamily, ...]

    def isolated_points(self) -> list[Vector]:
        """All isolated unit geodesic vectors, antipodes listed separately."""
        pts = [np.array(p) for p in self.discrete]
        full = [f for f in self.families if f.angles is None]
        for fam in self.families:
            if fam.angles is None:
                continue
            for t in fam.angles:
                for sgn in (1.0, -1.0):
                    x = sgn * fam.point(t)
                    if all(f.distance(x) > 1e-9 for f in full):
                        pts.append(x)
        return pts

    def distance_to_set(self, x) -> float:
        """Euclidean distance from unit x to the enumerated geodesic set."""
        x = _as_vector(x)
        best = math.inf
        for p in self.discrete:
            best = min(best, float(np.linalg.norm(x - p)))
        for fam in self.families:
            if fam.angles is None:
                best = min(best, fam.distance(x))
            else:
                for t in fam.angles:
                    best = min(
                        best,
                        float(np.linalg.norm(x - fam.point(t))),
                        float(np.linalg.norm(x + fam.point(t))),
                    )
        return best


def _check_enumeration(L: LieAlgebra3, enum: GeodesicEnumeration) -> None:
    g = Metric3.identity()
    probes = list(enum.discrete)
    for fam in enum.families:
        ts = fam.angles if fam.angles is not None else np.linspace(0.0, 2.0 * math.pi, 13)
        probes.extend(fam.point(t) for t in ts)
    for x in probes:
        if abs(np.linalg.norm(x) - 1.0) > IDENTITY_RTOL:
            raise AssertionError("enumerated vector is not unit")
        if not is_geodesic_vector(L, g, x, tol=1e-9):
            raise AssertionError("enumerated vector fails the geodesic predicate")


def enumerate_unit_geodesics(
    params: MilnorParameters | tuple | None = None,
    functional: LinearFunctional | np.ndarray | None = None,
    *,
    case_tol: float | None = None,
) -> GeodesicEnumeration:
    """All unit geodesic vectors of the algebra, in closed form.

    Dispatch on (p, q, r): generic p gives the isolated +-e1 plus the
    in-plane solutions of the quadratic angle equation (tags A1/A2 by its
    discriminant); p = +-r gives a full great circle through e1, plus an
    isolated antipodal pair transverse to it when q != 0 (B1/C1) and
    nothing else when q = 0 (B2/C2); p = 0 leaves only +-e1 (tag D); the
    rank-one functional algebra leaves only the dual direction (tag E).

    Every returned vector satisfies the geodesic predicate; the published
    case lists for B1/C1/D/E disagree with that predicate and are not
    reproduced (see the brute-force oracle for the cross-check).
    """
    if (params is None) == (functional is None):
        raise ValueError("provide exactly one of params or functional")

    if functional is not None:
        if not isinstance(functional, LinearFunctional):
            functional = LinearFunctional(np.asarray(functional, dtype=float))
        L = from_functional(functional)
        enum = GeodesicEnumeration("E", (functional.dual, -functional.dual), ())
        _check_enumeration(L, enum)
        return enum

    if not isinstance(params, MilnorParameters):
        params = MilnorParameters(*params)
    p, q, r = params.p, params.q, params.r
    if case_tol is None:
        case_tol = default_tol() * max(1.0, abs(p), abs(q), abs(r))
    L = from_milnor(params)

    if abs(p) <= case_tol:
        enum = GeodesicEnumeration("D", (E1, -E1), ())
    elif abs(p - r) <= case_tol or abs(p + r) <= case_tol:
        mirror = abs(p + r) <= case_tol  # p = -r
        if abs(q) <= case_tol:
            tag = "C2" if mirror else "B2"
            circle = CircleFamily(E1, E2 if mirror else E3)
            enum = GeodesicEnumeration(tag, (), (circle,))
        else:
            s = math.sqrt(1.0 + q * q)
            if mirror:
                tag, iso, v = "C1", E2, np.array([0.0, 1.0, q]) / s
            else:
                tag, iso, v = "B1", E3, np.array([0.0, q, -1.0]) / s
            enum = GeodesicEnumeration(tag, (iso, -iso), (CircleFamily(E1, v),))
    else:
        roots = inplane_geodesic_angles(params)
        if not roots:
            enum = GeodesicEnumeration("A1", (E1, -E1), ())
        else:
            fam = CircleFamily(E2, E3, tuple(roots))
            enum = GeodesicEnumeration("A2", (E1, -E1), (fam,))
    _check_enumeration(L, enum)
    return enum


# -- brute-force oracle ---------------------------------------------------


def _defect_matrices(L: LieAlgebra3, g: Metric3) -> np.ndarray:
    # M_i symmetric with x^T M_i x = g([x, e_i], x)
    Q = np.einsum("jik,km->ijm", L.c, g.g)
    return 0.5 * (Q + np.transpose(Q, (0, 2, 1)))


def _sphere_grid(grid: int) -> np.ndarray:
    th = math.pi * (np.arange(grid) + 0.5) / grid
    ph = 2.0 * math.pi * np.arange(grid) / grid
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    st = np.sin(TH)
    return np.stack([st * np.cos(PH), st * np.sin(PH), np.cos(TH)], axis=-1).reshape(-1, 3)


def _merge_clusters(points: np.ndarray, defects: np.ndarray, radius: float) -> np.ndarray:
    # cell dedup first (keep the best defect per cell), then greedy merge
    keys = np.floor(points / radius).astype(np.int64)
    order = np.lexsort((defects, keys[:, 2], keys[:, 1], keys[:, 0]))
    keys_sorted = keys[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = np.any(keys_sorted[1:] != keys_sorted[:-1], axis=1)
    cand = points[order[first]]
    cd = defects[order[first]]
    ang = np.lexsort((np.arctan2(cand[:, 1], cand[:, 0]), np.arccos(np.clip(cand[:, 2], -1, 1))))
    cand, cd = cand[ang], cd[ang]
    reps = np.empty_like(cand)
    reps_d = np.empty(len(cand))
    r2 = radius * radius
    n = 0
    for x, d in zip(cand, cd):
        if n:
            d2 = ((reps[:n] - x) ** 2).sum(axis=1)
            j = int(np.argmin(d2))
            if d2[j] <= r2:
                if d < reps_d[j]:
                    reps[j], reps_d[j] = x, d
                continue
        reps[n] = x
        reps_d[n] = d
        n += 1
    out = reps[:n]
    srt = np.lexsort((np.arctan2(out[:, 1], out[:, 0]), np.arccos(np.clip(out[:, 2], -1, 1))))
    return out[srt]


def geodesic_brute_force(
    L: LieAlgebra3,
    g: Metric3 | None = None,
    grid: int = 400,
    *,
    merge_radius: float = 1e-3,
    keep_rtol: float = 1e-10,
) -> list[Vector]:
    """Sphere-scan oracle for the unit geodesic set, independent of the closed forms.

    Lattice points whose defect clears a coarse, grid-spacing-aware
    threshold are refined by local pattern search until the defect falls
    below ~1e-13 relative to the structure-constant scale (isolated zeros
    of the adapted form can be quadratically flat, so the refinement target
    sits well under the 1e-10 acceptance cut); survivors are merged into
    clusters and one representative per cluster is returned, sorted by
    spherical angle.  If the whole sphere passes the coarse cut (abelian
    input), a decimated subset of the lattice is returned unrefined.
    """
    if grid < 100:
        raise ValueError("grid must be at least 100")
    if g is None:
        g = Metric3.identity()
    M = _defect_matrices(L, g)
    scale = float(np.abs(M).max())
    X = _sphere_grid(grid)
    if scale == 0.0:
        return list(X[:: max(1, len(X) // 512)])
    F = _kernels.defect_max_batch(M, X)
    h = 2.0 * math.pi / grid
    tau = 3.0 * scale * h
    mask = F <= tau
    if mask.mean() > 0.5 and F.max() <= keep_rtol * scale:
        return list(X[:: max(1, len(X) // 512)])
    seeds = X[mask]
    if len(seeds) == 0:
        return []
    target = 1e-13 * scale
    refined, fr = _kernels.refine_batch(M, np.ascontiguousarray(seeds), 3.0 * h, target, 80)
    ok = fr <= keep_rtol * scale
    if not ok.any():
        return []
    return list(_merge_clusters(refined[ok], fr[ok], merge_radius))


@dataclass(frozen=True)
class OracleAgreement:
    """Comparison between a closed-form enumeration and oracle output."""

    max_oracle_to_set: float  # worst oracle point, distance to enumerated set
    max_isolated_to_oracle: float  # worst enumerated isolated point, distance to oracle
    family_coverage_gap: float  # worst gap along full-circle families (grid-limited)
    n_isolated_oracle: int
    n_isolated_enum: int

    @property
    def agreement(self) -> float:
        return max(self.max_oracle_to_set, self.max_isolated_to_oracle)

    @property
    def counts_match(self) -> bool:
        return self.n_isolated_oracle == self.n_isolated_enum


def oracle_match(enum: GeodesicEnumeration, points: list[Vector], grid: int) -> OracleAgreement:
    """Score oracle output against the enumeration.

    Isolated oracle representatives are those with no neighbour within a
    few lattice spacings; along full circles the representatives chain at
    lattice density, so the two populations separate cleanly.
    """
    pts = np.array([np.asarray(p, float) for p in points])
    if len(pts) == 0:
        raise ValueError("oracle returned no points")
    d_o2s = max(enum.distance_to_set(x) for x in pts)
    iso = enum.isolated_points()
    d_i2o = 0.0
    for p in iso:
        d_i2o = max(d_i2o, float(np.linalg.norm(pts - p, axis=1).min()))
    h = 2.0 * math.pi / grid
    if len(pts) == 1:
        n_iso = 1
    else:
        dm = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        np.fill_diagonal(dm, np.inf)
        n_iso = int((dm.min(axis=1) > 3.5 * h).sum())
    gap = 0.0
    for fam in enum.families:
        if fam.angles is not None:
            continue
        ts = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
        samples = np.cos(ts)[:, None] * fam.u + np.sin(ts)[:, None] * fam.v
        dists = np.linalg.norm(samples[:, None, :] - pts[None, :, :], axis=-1).min(axis=1)
        gap = max(gap, float(dists.max()))
    return OracleAgreement(float(d_o2s), float(d_i2o), gap, n_iso, len(iso))


def sectional_curvature(L: LieAlgebra3, g: Metric3, x, y) -> float:
    """K(x, y) from the curvature tensor of the left-invariant connection."""
    x = _as_vector(x)
    y = _as_vector(y)
    den = g.inner(x, x) * g.inner(y, y) - g.inner(x, y) ** 2
    if den <= 1e-12 * max(g.inner(x, x) * g.inner(y, y), 1e-300):
        raise ValueError("x and y are linearly dependent")
    nab = lambda u, v: levi_civita(L, g, u, v)
    R = nab(x, nab(y, y)) - nab(y, nab(x, y)) - nab(bracket(L, x, y), y)
    return float(R @ g.g @ x) / den
