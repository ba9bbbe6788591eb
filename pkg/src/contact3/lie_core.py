"""Three-dimensional real Lie algebras by structure constants.

The algebra lives on a fixed vector space with basis ``{e1, e2, e3}``;
``c[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.  Two
canonical constructions are provided: the adapted non-unimodular form

    [e1, e2] = alpha e2 + beta e3,
    [e1, e3] = gamma e2 + delta e3,
    [e2, e3] = 0,

with ``alpha*gamma + beta*delta = 0`` and ``alpha + delta != 0``, and the
rank-one form ``[x, y] = l(x) y - l(y) x`` for a nonzero covector ``l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tolerances import IDENTITY_RTOL

Vector = np.ndarray

E1, E2, E3 = np.eye(3)


def _as_vector(x) -> Vector:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True)
class LieAlgebra3:
    """Bracket on R^3 given by antisymmetric structure constants."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (3, 3, 3):
            raise ValueError("structure constants must have shape (3, 3, 3)")
        if not np.all(np.isfinite(c)):
            raise ValueError("structure constants must be finite")
        scale = max(np.abs(c).max(), 1.0)
        if np.abs(c + np.swapaxes(c, 0, 1)).max() > IDENTITY_RTOL * scale:
            raise ValueError("structure constants are not antisymmetric in (i, j)")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def scale(self) -> float:
        return float(np.abs(self.c).max())


@dataclass(frozen=True)
class MilnorParameters:
    """Coefficients (alpha, beta, gamma, delta) of the adapted bracket form.

    Derived coordinates: r = (alpha+delta)/2, p = (alpha-delta)/2 and the
    shear ratio q with beta = (r+p) q, gamma = -(r-p) q.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    p: float = field(init=False)
    q: float = field(init=False)
    r: float = field(init=False)

    def __post_init__(self):
        a, b, g, d = (float(v) for v in (self.alpha, self.beta, self.gamma, self.delta))
        for name, v in (("alpha", a), ("beta", b), ("gamma", g), ("delta", d)):
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
        scale = max(abs(a), abs(b), abs(g), abs(d))
        if scale == 0.0:
            raise ValueError("all coefficients are zero (abelian, hence unimodular)")
        if abs(a * g + b * d) > IDENTITY_RTOL * scale * scale:
            raise ValueError(
                f"column-orthogonality violated: alpha*gamma + beta*delta = {a * g + b * d!r}"
            )
        if abs(a + d) <= IDENTITY_RTOL * scale:
            raise ValueError("alpha + delta = 0: the algebra would be unimodular")
        p, q, r = pqr_from_milnor(a, b, g, d)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_pqr(cls, p: float, q: float, r: float) -> "MilnorParameters":
        if r == 0.0:
            raise ValueError("r = 0 gives alpha + delta = 0 (unimodular)")
        return cls(r + p, (r + p) * q, -(r - p) * q, r - p)

    @property
    def scale(self) -> float:
        return max(abs(self.alpha), abs(self.beta), abs(self.gamma), abs(self.delta))


@dataclass(frozen=True)
class LinearFunctional:
    """Covector l with l(x) = sum_i l_i x_i; must be nonzero."""

    l: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.l)
        if np.linalg.norm(v) == 0.0:
            raise ValueError("l = 0 gives the abelian (unimodular) algebra")
        v.setflags(write=False)
        object.__setattr__(self, "l", v)

    def __call__(self, x) -> float:
        return float(self.l @ _as_vector(x))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.l))

    @property
    def dual(self) -> Vector:
        """Unit vector metrically dual to l (identity metric)."""
        return self.l / self.norm


def bracket(L: LieAlgebra3, x, y) -> Vector:
    """[x, y], bilinear and antisymmetric: result_k = sum x_i y_j c[i,j,k]."""
    return np.einsum("i,j,ijk->k", _as_vector(x), _as_vector(y), L.c)


def jacobi_residual(L: LieAlgebra3) -> float:
    """Max-norm of the cyclic sum [[ei,ej],ek] + [[ej,ek],ei] + [[ek,ei],ej].

    Zero (to rounding) exactly when the constants define a Lie algebra.
    """
    c = L.c
    # J[i,j,k,m] = ([[ei,ej],ek])_m cycled over (i,j,k)
    t = np.einsum("ijl,lkm->ijkm", c, c)
    J = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.abs(J).max())


def ad_matrix(L: LieAlgebra3, x) -> np.ndarray:
    """Matrix of y -> [x, y] in the fixed basis (columns are [x, e_j])."""
    return np.einsum("i,ijk->kj", _as_vector(x), L.c)


def _trace_form(L: LieAlgebra3) -> Vector:
    """Covector x -> trace ad(x), i.e. T_i = trace ad(e_i)."""
    return np.einsum("ijj->i", L.c)


def is_unimodular(L: LieAlgebra3, tol: float | None = None) -> bool:
    """True iff trace ad(e_i) vanishes for every basis vector."""
    if tol is None:
        tol = 1e-9 * max(L.scale, 1.0)
    return bool(np.abs(_trace_form(L)).max() <= tol)


def unimodular_kernel(L: LieAlgebra3) -> list[Vector]:
    """Orthonormal basis of {x : trace ad(x) = 0} for a non-unimodular algebra.

    The kernel of the trace form is a plane; the basis is built from the two
    coordinate axes most transverse to its normal, so adapted-form algebras
    get exactly [e2, e3].
    """
    T = _trace_form(L)
    if is_unimodular(L):
        raise ValueError("algebra is unimodular: the kernel is everything")
    n = T / np.linalg.norm(T)
    k = int(np.argmax(np.abs(n)))
    basis = []
    for i in range(3):
        if i == k:
            continue
        v = np.eye(3)[i] - (n[i]) * n
        for b in basis:
            v = v - (v @ b) * b
        basis.append(v / np.linalg.norm(v))
    return basis


def from_milnor(params: MilnorParameters | tuple) -> LieAlgebra3:
    """Algebra in the adapted form; always non-unimodular with Jacobi = 0."""
    if not isinstance(params, MilnorParameters):
        params = MilnorParameters(*params)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    c = np.zeros((3, 3, 3))
    c[0, 1] = (0.0, a, b)
    c[1, 0] = (0.0, -a, -b)
    c[0, 2] = (0.0, g, d)
    c[2, 0] = (0.0, -g, -d)
    return LieAlgebra3(c)


def from_functional(l: LinearFunctional | np.ndarray) -> LieAlgebra3:
    """Algebra with [x, y] = l(x) y - l(y) x; trace ad(x) = 2 l(x)."""
    if not isinstance(l, LinearFunctional):
        l = LinearFunctional(np.asarray(l, dtype=float))
    lv = l.l
    eye = np.eye(3)
    c = np.einsum("i,jk->ijk", lv, eye) - np.einsum("j,ik->ijk", lv, eye)
    return LieAlgebra3(c)


def pqr_from_milnor(alpha: float, beta: float, gamma: float, delta: float):
    """Solve alpha = r+p, delta = r-p, beta = (r+p)q, gamma = -(r-p)q.

    q comes from whichever of alpha, delta is away from zero; under the
    column-orthogonality constraint both branches agree where both apply.
    """
    scale = max(abs(alpha), abs(beta), abs(gamma), abs(delta), 1e-300)
    r = 0.5 * (alpha + delta)
    p = 0.5 * (alpha - delta)
    if abs(alpha) > IDENTITY_RTOL * scale:
        q = beta / alpha
    else:
        q = -gamma / delta
    return p, q, r


def milnor_invariant_D(params: MilnorParameters | tuple) -> float:
    """Complete isomorphism invariant D = 4(alpha*delta - beta*gamma)/(alpha+delta)^2."""
    if not isinstance(params, MilnorParameters):
        params = MilnorParameters(*params)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    return 4.0 * (a * d - b * g) / (a + d) ** 2


def canonical_L_action(params: MilnorParameters | tuple) -> np.ndarray:
    """ad(e1') restricted to span{e2, e3}, with e1' scaled so the trace is 2.

    The returned 2x2 matrix has trace 2 and determinant equal to D.
    """
    if not isinstance(params, MilnorParameters):
        params = MilnorParameters(*params)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    M = np.array([[a, g], [b, d]])
    return (2.0 / (a + d)) * M


def invariant_D(L: LieAlgebra3) -> float:
    """Basis-free D: 4 det / trace^2 of ad(x0) on the unimodular kernel.

    Independent of the choice of x0 with trace ad(x0) != 0; agrees with
    ``milnor_invariant_D`` on adapted-form algebras.
    """
    T = _trace_form(L)
    tn = np.linalg.norm(T)
    if tn <= 1e-9 * max(L.scale, 1.0):
        raise ValueError("algebra is unimodular: D is undefined")
    u1, u2 = unimodular_kernel(L)
    x0 = T / tn  # trace ad(x0) = tn > 0
    ad = ad_matrix(L, x0)
    M = np.array([[u1 @ ad @ u1, u1 @ ad @ u2], [u2 @ ad @ u1, u2 @ ad @ u2]])
    M *= 2.0 / np.trace(M)
    return float(np.linalg.det(M))
