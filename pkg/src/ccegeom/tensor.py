"""Pointwise curvature of explicit Riemannian metrics.

A metric is a set of component closures over a coordinate chart. All
operations are batched: points have shape (N, dim) and every tensor gains
a leading batch axis. Single points (dim,) are accepted and the batch
axis is squeezed from the results.

Index conventions, fixed once and validated against round-sphere golden
values in the test suite:

* dg[k, i, j]      = d g_ij / dx^k
* d2g[k, l, i, j]  = d^2 g_ij / dx^k dx^l
* christoffel[m, i, j] = Gamma^m_ij
* riemann[i, j, k, l] is fully lowered, antisymmetric in (i, j) and in
  (k, l), symmetric under pair swap, and R_ijij > 0 on round spheres
  (positive sectional curvature).
* ricci[i, j] = riemann^k_ikj contraction; scalar = trace.

The self-dual / anti-self-dual split of the Weyl tensor is computed by
assembling the Weyl operator on the six-dimensional space of 2-forms and
projecting onto the +-1 eigenspaces of the Hodge star.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DerivativeTolerance, DomainError, SingularMetric

def _einsum(subscripts, *ops):
    # contraction-path optimization matters here: the three-operand
    # raises in the Weyl split are ~100x slower without it
    return np.einsum(subscripts, *ops, optimize=True)


__all__ = [
    "Chart",
    "CentralDifference",
    "ScalarField",
    "MetricField",
    "CurvaturePacket",
    "christoffel",
    "curvature",
    "riemann_symmetry_residuals",
    "einstein_residual",
    "conformal_rescale",
    "tensor_norm_sq",
]

_PAIRS4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


# ---------------------------------------------------------------------------
# charts and schemes

@dataclass(frozen=True)
class Chart:
    """Open coordinate box with names, used for domain checks and sampling."""

    names: tuple
    lo: tuple
    hi: tuple

    @property
    def dim(self) -> int:
        return len(self.names)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts > lo) & (pts < hi), axis=1)

    def require(self, points) -> None:
        ok = self.contains(points)
        if not np.all(ok):
            bad = np.atleast_2d(points)[~ok][0]
            raise DomainError(f"point {bad} outside chart box {self.lo}..{self.hi}")

    def sample(self, n: int, seed: int = 0, margin: float = 0.15) -> np.ndarray:
        """Deterministic interior sample, shrunk away from the box walls."""
        rng = np.random.default_rng(seed)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        span = hi - lo
        return lo + span * (margin + (1 - 2 * margin) * rng.random((n, self.dim)))


@dataclass(frozen=True)
class CentralDifference:
    """Finite-difference derivative scheme with Richardson extrapolation.

    step is the base stencil width; levels > 1 halves it repeatedly and
    extrapolates assuming an even-power error expansion. tolerance bounds
    the relative change of the last extrapolation step.
    """

    step: float = 1e-4
    levels: int = 2
    tolerance: float = 1e-3


def _as_batch(points, dim):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        if pts.shape[0] != dim:
            raise DomainError(f"point has {pts.shape[0]} coordinates, chart has {dim}")
        return pts[None, :], True
    if pts.shape[1] != dim:
        raise DomainError(f"points have {pts.shape[1]} coordinates, chart has {dim}")
    return pts, False


def _maybe_squeeze(arr, squeeze):
    return arr[0] if squeeze else arr


# ---------------------------------------------------------------------------
# scalar fields (conformal factors)

@dataclass(frozen=True)
class ScalarField:
    """Scalar function with gradient and hessian closures, batched."""

    value: Callable
    grad: Callable
    hess: Callable

    @staticmethod
    def from_sympy(coords, expr) -> "ScalarField":
        from .symbolic import scalar_closures

        v, g, h = scalar_closures(coords, expr)
        return ScalarField(v, g, h)


# ---------------------------------------------------------------------------
# metric fields

class MetricField:
    """Riemannian metric given by component closures on a chart.

    func(points) -> (N, d, d). Analytic derivative closures dfunc /
    d2func may be supplied (preferred); otherwise derivatives fall back
    to Richardson-extrapolated central differences controlled by
    ``scheme``.
    """

    def __init__(self, chart: Chart, func, dfunc=None, d2func=None,
                 scheme: Optional[CentralDifference] = None, name: str = ""):
        self.chart = chart
        self.dim = chart.dim
        self._func = func
        self._dfunc = dfunc
        self._d2func = d2func
        self.scheme = scheme or CentralDifference()
        self.name = name

    @property
    def analytic(self) -> bool:
        return self._dfunc is not None and self._d2func is not None

    # -- evaluation ---------------------------------------------------------

    def g(self, points, check: bool = True):
        pts, squeeze = _as_batch(points, self.dim)
        if check:
            self.chart.require(pts)
        mat = np.asarray(self._func(pts), dtype=float)
        if check:
            self._check_positive(mat, pts)
        return _maybe_squeeze(mat, squeeze)

    def dg(self, points):
        pts, squeeze = _as_batch(points, self.dim)
        self.chart.require(pts)
        if self._dfunc is not None:
            out = np.asarray(self._dfunc(pts), dtype=float)
        else:
            out = _fd_first(self._func, pts, self.scheme)
        return _maybe_squeeze(out, squeeze)

    def d2g(self, points):
        pts, squeeze = _as_batch(points, self.dim)
        self.chart.require(pts)
        if self._d2func is not None:
            out = np.asarray(self._d2func(pts), dtype=float)
        else:
            out = _fd_second(self._func, pts, self.scheme)
        return _maybe_squeeze(out, squeeze)

    def sqrt_det(self, points):
        pts, squeeze = _as_batch(points, self.dim)
        det = np.linalg.det(self.g(pts))
        return _maybe_squeeze(np.sqrt(det), squeeze)

    def with_scheme(self, scheme: CentralDifference) -> "MetricField":
        """Same component closure, forced finite-difference derivatives."""
        return MetricField(self.chart, self._func, None, None, scheme,
                           name=self.name + "/fd")

    # -- helpers ------------------------------------------------------------

    def _check_positive(self, mat, pts):
        sym_err = np.max(np.abs(mat - np.swapaxes(mat, -1, -2)))
        if sym_err > 1e-10 * max(1.0, np.max(np.abs(mat))):
            raise SingularMetric(f"metric not symmetric (max asymmetry {sym_err:.2e})")
        for k in range(1, self.dim + 1):
            minors = np.linalg.det(mat[:, :k, :k])
            if np.any(minors <= 0):
                i = int(np.argmax(minors <= 0))
                raise SingularMetric(
                    f"leading {k}x{k} minor nonpositive ({minors[i]:.3e}) at point "
                    f"{pts[i]}"
                )

    @staticmethod
    def from_sympy(coords, gmat, chart: Chart, name: str = "",
                   simplifier=None) -> "MetricField":
        from .symbolic import derivative_arrays, lambdify_array
        import sympy as sp

        g = sp.Matrix(gmat)
        if simplifier is None:
            dg, d2g = derivative_arrays(coords, g)
        else:
            dg, d2g = derivative_arrays(coords, g, simplifier=simplifier)
        fg = lambdify_array(coords, g.tolist())
        fdg = lambdify_array(coords, dg)
        fd2g = lambdify_array(coords, d2g)
        return MetricField(chart, fg, fdg, fd2g, name=name)


# ---------------------------------------------------------------------------
# finite differences

def _richardson(table_values):
    """Extrapolate a list of stencil evaluations D(h), D(h/2), ... assuming
    an even-power error expansion. Returns (best, change_of_last_step)."""
    rows = [np.asarray(v, dtype=float) for v in table_values]
    prev = rows
    fac = 4.0
    while len(prev) > 1:
        prev = [(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)]
        fac *= 4.0
    best = prev[0]
    if len(rows) == 1:
        return best, np.inf
    # redo dropping the coarsest level to estimate the final change
    alt = rows[1:]
    fac = 4.0
    while len(alt) > 1:
        alt = [(fac * alt[i + 1] - alt[i]) / (fac - 1.0) for i in range(len(alt) - 1)]
        fac *= 4.0
    change = np.max(np.abs(best - alt[0]))
    return best, change


def _fd_first(func, pts, scheme: CentralDifference):
    n, d = pts.shape
    levels = []
    h = scheme.step
    for _ in range(scheme.levels):
        out = np.empty((n, d, d, d))
        for k in range(d):
            e = np.zeros(d)
            e[k] = h
            out[:, k] = (func(pts + e) - func(pts - e)) / (2 * h)
        levels.append(out)
        h /= 2.0
    best, change = _richardson(levels)
    _require_converged(best, change, scheme, "first")
    return best

def _fd_second(func, pts, scheme: CentralDifference):
    n, d = pts.shape
    levels = []
    h = scheme.step
    for _ in range(scheme.levels):
        out = np.empty((n, d, d, d, d))
        g0 = func(pts)
        for k in range(d):
            ek = np.zeros(d)
            ek[k] = h
            out[:, k, k] = (func(pts + ek) - 2 * g0 + func(pts - ek)) / (h * h)
            for l in range(k + 1, d):
                el = np.zeros(d)
                el[l] = h
                mixed = (
                    func(pts + ek + el) - func(pts + ek - el)
                    - func(pts - ek + el) + func(pts - ek - el)
                ) / (4 * h * h)
                out[:, k, l] = mixed
                out[:, l, k] = mixed
        levels.append(out)
        h /= 2.0
    best, change = _richardson(levels)
    _require_converged(best, change, scheme, "second")
    return best


def _require_converged(best, change, scheme, label):
    if not np.all(np.isfinite(best)):
        raise DerivativeTolerance(f"{label} derivatives not finite")
    scale = max(1.0, float(np.max(np.abs(best))))
    if change > scheme.tolerance * scale:
        raise DerivativeTolerance(
            f"Richardson extrapolation of {label} derivatives stalled: "
            f"last change {change:.3e} vs tolerance {scheme.tolerance:.1e} * {scale:.1e}"
        )


# ---------------------------------------------------------------------------
# curvature

@dataclass
class CurvaturePacket:
    """All pointwise curvature data of a metric at a batch of points."""

    points: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    traceless_ricci: np.ndarray
    schouten: Optional[np.ndarray] = None
    sigma2: Optional[np.ndarray] = None
    weyl: Optional[np.ndarray] = None
    weyl_plus: Optional[np.ndarray] = None
    weyl_minus: Optional[np.ndarray] = None
    norms: dict = field(default_factory=dict)
    orientation: int = 1


def christoffel(m: MetricField, points):
    pts, squeeze = _as_batch(points, m.dim)
    g = m.g(pts)
    dg = m.dg(pts)
    ginv = np.linalg.inv(g)
    gamma = _christoffel_from(ginv, dg)
    return _maybe_squeeze(gamma, squeeze)


def _christoffel_from(ginv, dg):
    # T_kij = d_i g_kj + d_j g_ki - d_k g_ij
    t = (_einsum("nikj->nkij", dg) + _einsum("njki->nkij", dg)
         - _einsum("nkij->nkij", dg))
    n, d = t.shape[0], t.shape[1]
    return 0.5 * (ginv @ t.reshape(n, d, d * d)).reshape(t.shape)


def _kulkarni_nomizu(h, k):
    return (_einsum("nik,njl->nijkl", h, k) + _einsum("njl,nik->nijkl", h, k)
            - _einsum("nil,njk->nijkl", h, k) - _einsum("njk,nil->nijkl", h, k))


def _kron_inverse(ginv):
    """Batched g^{pc} g^{qd} as a (pq) x (cd) matrix; raises index pairs."""
    n, d = ginv.shape[0], ginv.shape[1]
    k = ginv[:, :, None, :, None] * ginv[:, None, :, None, :]
    return k.reshape(n, d * d, d * d)


def tensor_norm_sq(t, ginv, kron=None):
    """Squared norm of a fully lowered tensor, all indices raised with ginv."""
    rank = t.ndim - 1
    n, d = t.shape[0], t.shape[1]
    if rank == 2:
        up = ginv @ t @ ginv
        return (t * up).reshape(n, -1).sum(axis=1)
    if rank == 4:
        kk = _kron_inverse(ginv) if kron is None else kron
        tm = t.reshape(n, d * d, d * d)
        up = kk @ tm @ kk
        return (tm * up).reshape(n, -1).sum(axis=1)
    up = t
    for axis in range(1, rank + 1):
        up = np.moveaxis(
            _einsum("nab,n...b->n...a", ginv, np.moveaxis(up, axis, -1)),
            -1, axis,
        )
    prod = t * up
    return prod.reshape(prod.shape[0], -1).sum(axis=1)


def _perm_tensor4():
    from itertools import permutations

    perm = np.zeros((4, 4, 4, 4))
    for p in permutations(range(4)):
        sign = 1
        q = list(p)
        for i in range(4):
            for j in range(i + 1, 4):
                if q[i] > q[j]:
                    sign = -sign
        perm[p] = sign
    return perm


_PERM4 = _perm_tensor4()


def _levi_civita4(sqrtdet, orientation):
    return orientation * sqrtdet[:, None, None, None, None] * _PERM4[None]


def _pair_matrix(t4):
    """Restrict a rank-4 array, antisymmetric in both pairs, to the ordered
    pair basis of 2-forms -> (N, 6, 6)."""
    n = t4.shape[0]
    out = np.empty((n, 6, 6))
    for a, (i, j) in enumerate(_PAIRS4):
        for b, (k, l) in enumerate(_PAIRS4):
            out[:, a, b] = t4[:, i, j, k, l]
    return out


def _pair_expand(mat):
    """Inverse of _pair_matrix: rebuild the rank-4 array by antisymmetry."""
    n = mat.shape[0]
    t4 = np.zeros((n, 4, 4, 4, 4))
    for a, (i, j) in enumerate(_PAIRS4):
        for b, (k, l) in enumerate(_PAIRS4):
            v = mat[:, a, b]
            t4[:, i, j, k, l] = v
            t4[:, j, i, k, l] = -v
            t4[:, i, j, l, k] = -v
            t4[:, j, i, l, k] = v
    return t4


def _weyl_split(weyl, g, ginv, orientation, kron=None):
    """Self-dual / anti-self-dual parts via the 2-form representation."""
    n = g.shape[0]
    kk = _kron_inverse(ginv) if kron is None else kron
    sqrtdet = np.sqrt(np.linalg.det(g))
    eps = _levi_civita4(sqrtdet, orientation)
    # star on 2-forms, mixed indices: S_ab^cd = 1/2 eps_abpq g^pc g^qd
    eps_ud = (eps.reshape(n, 16, 16) @ kk).reshape(n, 4, 4, 4, 4)
    star = _pair_matrix(eps_ud)  # acts on ordered-pair components
    ident = np.eye(6)[None]
    p_plus = 0.5 * (ident + star)
    p_minus = 0.5 * (ident - star)
    # weyl operator with second pair raised
    w_ud = (weyl.reshape(n, 16, 16) @ kk).reshape(n, 4, 4, 4, 4)
    w_op = _pair_matrix(w_ud)
    glow = _pair_matrix(_kulkarni_nomizu(g, g)) * 0.5  # pair metric g_ac g_bd - g_ad g_bc
    out = []
    for proj in (p_plus, p_minus):
        low = proj @ w_op @ proj @ glow
        out.append(_pair_expand(low))
    return out[0], out[1]


def curvature(m: MetricField, points, orientation: int = 1) -> CurvaturePacket:
    """Full curvature packet of a metric at one point or a batch.

    orientation (+1/-1) fixes the sign of the volume form used by the
    Hodge star; flipping it exchanges the self-dual and anti-self-dual
    Weyl parts.
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    pts, squeeze = _as_batch(points, m.dim)
    d = m.dim
    g = m.g(pts)
    dg = m.dg(pts)
    d2g = m.d2g(pts)
    ginv = np.linalg.inv(g)

    nb = pts.shape[0]
    gamma = _christoffel_from(ginv, dg)
    # d_a Gamma^m_ij needs d_a g^{mk} = -g^{mp} (d_a g_pq) g^{qk}
    dginv = -(ginv[:, None] @ dg @ ginv[:, None])
    t = (_einsum("nikj->nkij", dg) + _einsum("njki->nkij", dg) - dg)
    dt = (_einsum("naikj->nakij", d2g) + _einsum("najki->nakij", d2g)
          - _einsum("nakij->nakij", d2g))
    tm = t.reshape(nb, 1, d, d * d)
    dgamma = 0.5 * (dginv @ tm + ginv[:, None] @ dt.reshape(nb, d, d, d * d))
    dgamma = dgamma.reshape(nb, d, d, d, d)

    # R^r_{s m v} = d_m G^r_vs - d_v G^r_ms + G^r_ml G^l_vs - G^l_ms G^r_vl
    t1 = _einsum("nmrvs->nrsmv", dgamma)
    t2 = _einsum("nvrms->nrsmv", dgamma)
    gsq = gamma.reshape(nb, d * d, d) @ gamma.reshape(nb, d, d * d)
    gsq = gsq.reshape(nb, d, d, d, d)
    t3 = gsq.transpose(0, 1, 4, 2, 3)  # [n,r,m,v,s] -> n r s m v
    t4 = gsq.transpose(0, 1, 4, 3, 2)  # [n,r,v,m,s] -> n r s m v
    riem_ud = t1 - t2 + t3 - t4

    riemann = (g @ riem_ud.reshape(nb, d, d ** 3)).reshape(riem_ud.shape)
    ricci = _einsum("nrsrv->nsv", riem_ud)
    scalar = _einsum("nij,nij->n", ginv, ricci)
    traceless = ricci - (scalar / d)[:, None, None] * g

    packet = CurvaturePacket(
        points=_maybe_squeeze(pts, squeeze),
        metric=_maybe_squeeze(g, squeeze),
        inverse=_maybe_squeeze(ginv, squeeze),
        christoffel=_maybe_squeeze(gamma, squeeze),
        riemann=_maybe_squeeze(riemann, squeeze),
        ricci=_maybe_squeeze(ricci, squeeze),
        scalar=_maybe_squeeze(scalar, squeeze),
        traceless_ricci=_maybe_squeeze(traceless, squeeze),
        orientation=orientation,
    )

    e_sq = tensor_norm_sq(traceless, ginv)
    norms = {"traceless_ricci_sq": e_sq}

    if d == 4:
        schouten = ricci - (scalar / 6.0)[:, None, None] * g
        sigma2 = scalar ** 2 / 24.0 - 0.5 * e_sq
        weyl = (riemann
                - _kulkarni_nomizu(traceless, g) / (d - 2)
                - (scalar / (2 * d * (d - 1)))[:, None, None, None, None]
                * _kulkarni_nomizu(g, g))
        wp, wm = _weyl_split(weyl, g, ginv, orientation)
        norms["weyl_sq"] = tensor_norm_sq(weyl, ginv)
        norms["weyl_plus_sq"] = tensor_norm_sq(wp, ginv)
        norms["weyl_minus_sq"] = tensor_norm_sq(wm, ginv)
        packet.schouten = _maybe_squeeze(schouten, squeeze)
        packet.sigma2 = _maybe_squeeze(sigma2, squeeze)
        packet.weyl = _maybe_squeeze(weyl, squeeze)
        packet.weyl_plus = _maybe_squeeze(wp, squeeze)
        packet.weyl_minus = _maybe_squeeze(wm, squeeze)

    packet.norms = {k: _maybe_squeeze(v, squeeze) for k, v in norms.items()}
    return packet


def riemann_symmetry_residuals(riemann) -> dict:
    """Sup-norm violations of the algebraic Riemann symmetries.

    Returns {"first_pair", "second_pair", "pair_swap", "first_bianchi"},
    each the largest absolute entry of the corresponding defect tensor.
    All four vanish identically for a curvature tensor; a corrupted
    component (sign flip, typo in an index map) shows up here at the
    size of the component itself.
    """
    r = np.asarray(riemann, dtype=float)
    if r.ndim < 4 or r.shape[-4:] != (r.shape[-1],) * 4:
        raise ValueError(f"expected a rank-4 square array, got shape {r.shape}")
    sup = lambda a: float(np.max(np.abs(a)))
    # R_ijkl + R_iklj + R_iljk
    cyclic = (r + np.einsum("...abcd->...adbc", r)
              + np.einsum("...abcd->...acdb", r))
    return {
        "first_pair": sup(r + np.swapaxes(r, -4, -3)),
        "second_pair": sup(r + np.swapaxes(r, -2, -1)),
        "pair_swap": sup(r - np.einsum("...abcd->...cdab", r)),
        "first_bianchi": sup(cyclic),
    }


def einstein_residual(m: MetricField, points, n: int = 3):
    """Frobenius norm |Ric + n g|_g, zero exactly when Ric = -n g."""
    pts, squeeze = _as_batch(points, m.dim)
    pack = curvature(m, pts)
    dev = pack.ricci + n * pack.metric
    val = np.sqrt(tensor_norm_sq(dev, pack.inverse))
    return _maybe_squeeze(val, squeeze)


def conformal_rescale(m: MetricField, w: ScalarField) -> MetricField:
    """Metric e^{2w} g with derivative closures built by the product rule."""

    def func(pts):
        f = np.exp(2.0 * np.asarray(w.value(pts)))
        return f[:, None, None] * m.g(pts, check=False)

    def dfunc(pts):
        g = m.g(pts, check=False)
        dg = m.dg(pts)
        f = np.exp(2.0 * np.asarray(w.value(pts)))
        dw = np.asarray(w.grad(pts))
        term = 2.0 * _einsum("nk,nij->nkij", dw, g) + dg
        return f[:, None, None, None] * term

    def d2func(pts):
        g = m.g(pts, check=False)
        dg = m.dg(pts)
        d2g = m.d2g(pts)
        f = np.exp(2.0 * np.asarray(w.value(pts)))
        dw = np.asarray(w.grad(pts))
        hw = np.asarray(w.hess(pts))
        term = (4.0 * _einsum("nk,nl,nij->nklij", dw, dw, g)
                + 2.0 * _einsum("nkl,nij->nklij", hw, g)
                + 2.0 * _einsum("nk,nlij->nklij", dw, dg)
                + 2.0 * _einsum("nl,nkij->nklij", dw, dg)
                + d2g)
        return f[:, None, None, None, None] * term

    return MetricField(m.chart, func, dfunc, d2func, m.scheme,
                       name=m.name + "/conformal")
