"""The symmetric space of SL(n,R) modeled by unimodular SPD matrices.

Points are positive-definite symmetric n x n matrices of determinant 1; a
group element g acts by the congruence p -> g^T p g and the projection from
the group is pi(g) = g^T g, whose stabilizer fiber is SO(n).  The affine
invariant distance is d(p,q) = sqrt(sum_i log(mu_i)^2) over the eigenvalues
mu_i of p^{-1} q.  With this normalization the map X -> exp(X) is an isometry
from the traceless symmetric matrices (trace-form norm) onto the space, so
unit-speed geodesic rays from the base point are t -> exp(t X) with
tr(X^2) = 1, and maximal flats are the exp images of commuting families.

Note the factor two between group and point coordinates: pi(exp(b)) =
exp(2 b), so a ray written through group elements is
t -> pi(exp((t/2) X)).  Shrink rates elsewhere in the package are quoted per
unit of the group parameter; see the README.

Distances to far-away ray points are computed by a graded eigenvalue
scheme (cluster + Schur complement) that stays accurate when the naive
matrix exponential would overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .cartan import CartanVector, SimpleSystem, chi_decompose, dominant_order
from .errors import DimensionError, ZeroVectorError
from .reps import act, highest_weight_vector, log_rep_norm

_SYM_TOL = 1e-10
_DET_TOL = 1e-9


# ---------------------------------------------------------------------------
# Basic matrix helpers


def check_group_element(g) -> np.ndarray:
    from .reps import check_unimodular_float

    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {g.shape}")
    check_unimodular_float(g, _DET_TOL)
    return g


def check_sym_point(p, tol: float = _SYM_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {p.shape}")
    if np.max(np.abs(p - p.T)) > tol * max(1.0, float(np.max(np.abs(p)))):
        raise ValueError("point is not symmetric")
    if np.min(np.linalg.eigvalsh(p)) <= 0:
        raise ValueError("point is not positive definite")
    return p


def exp_sym(x: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric matrix via its eigenbasis."""
    w, q = np.linalg.eigh(np.asarray(x, dtype=float))
    return (q * np.exp(w)) @ q.T


def log_spd(p: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(np.asarray(p, dtype=float))
    return (q * np.log(w)) @ q.T


def spd_power(p: np.ndarray, s: float) -> np.ndarray:
    w, q = np.linalg.eigh(np.asarray(p, dtype=float))
    return (q * w**s) @ q.T


def haar_so(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(n)."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def block_orthogonal(blocks: Sequence[Sequence[int]], n: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Haar sample from the SO(n) subgroup preserving the index blocks."""
    k = np.zeros((n, n))
    for grp in blocks:
        grp = list(grp)
        b = len(grp)
        if b == 1:
            k[grp[0], grp[0]] = 1.0
        else:
            z = rng.standard_normal((b, b))
            q, r = np.linalg.qr(z)
            q = q * np.sign(np.diag(r))
            k[np.ix_(grp, grp)] = q
    if np.linalg.det(k) < 0:
        grp = max(blocks, key=len)
        k[:, grp[0]] = -k[:, grp[0]]
    return k


# ---------------------------------------------------------------------------
# Projection, distance, geodesics


def project(g) -> np.ndarray:
    """Project a group element to the symmetric space: pi(g) = g^T g."""
    g = check_group_element(g)
    p = g.T @ g
    return 0.5 * (p + p.T)


def distance(p, q) -> float:
    """Affine-invariant distance sqrt(sum log(mu_i)^2), mu_i = eig(p^{-1}q)."""
    p = check_sym_point(p)
    q = check_sym_point(q)
    if p.shape != q.shape:
        raise DimensionError("point dimensions differ")
    mu = sla.eigh(q, p, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(mu) ** 2)))


def geodesic(p, q, s: float) -> np.ndarray:
    """Point at parameter fraction ``s`` on the geodesic from p to q."""
    p = check_sym_point(p)
    q = check_sym_point(q)
    ph = spd_power(p, 0.5)
    pih = spd_power(p, -0.5)
    mid = spd_power(pih @ q @ pih, s)
    out = ph @ mid @ ph
    return 0.5 * (out + out.T)


def midpoint(p, q) -> np.ndarray:
    return geodesic(p, q, 0.5)


def cartan_decompose(g) -> Tuple[np.ndarray, CartanVector, np.ndarray]:
    """Write g = k1 exp(diag(a)) k2 with k1, k2 in SO(n), a non-increasing."""
    g = check_group_element(g)
    u, s, vh = np.linalg.svd(g)
    if np.linalg.det(u) < 0:
        u[:, -1] = -u[:, -1]
        vh[-1, :] = -vh[-1, :]
    a = np.log(s)
    a = a - np.mean(a)
    return u, CartanVector(tuple(float(x) for x in a)), vh


# ---------------------------------------------------------------------------
# Parabolic data and the generalized Iwasawa decomposition


@dataclass(frozen=True)
class ParabolicData:
    """Block data of the parabolic subgroup attached to a flat direction.

    ``order`` sorts the direction's coordinates non-increasingly and
    ``blocks`` partitions the original indices 0..n-1 into groups of equal
    coordinates, in sorted order.  The parabolic consists of the matrices
    that are block upper triangular in the sorted basis; its unipotent
    radical has identity diagonal blocks.
    """

    direction: CartanVector
    order: SimpleSystem
    blocks: Tuple[Tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.direction.n

    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)


def parabolic_data(a: CartanVector, tol: float = 1e-9) -> ParabolicData:
    """Block data for the direction ``a``; the zero direction yields the
    improper parabolic (a single block, Iwasawa = polar decomposition)."""
    order = dominant_order(a)
    coords = [a.coords[i] for i in order.perm]
    blocks = []
    current = [order.perm[0]]
    for i in range(1, a.n):
        same = (coords[i] == coords[i - 1]) if a.is_exact \
            else abs(float(coords[i]) - float(coords[i - 1])) <= tol
        if same:
            current.append(order.perm[i])
        else:
            blocks.append(tuple(current))
            current = [order.perm[i]]
    blocks.append(tuple(current))
    return ParabolicData(direction=a, order=order, blocks=tuple(blocks))


def _permutation_matrix(order: SimpleSystem) -> np.ndarray:
    n = order.n
    p = np.zeros((n, n))
    for i, j in enumerate(order.perm):
        p[i, j] = 1.0
    return p


def in_parabolic(pdata: ParabolicData, h, tol: float = 1e-9) -> bool:
    """Whether h is block upper triangular for pdata (within tol)."""
    h = np.asarray(h, dtype=float)
    pm = _permutation_matrix(pdata.order)
    hp = pm @ h @ pm.T
    sizes = pdata.block_sizes()
    scale = max(1.0, float(np.max(np.abs(h))))
    row = 0
    for b in sizes:
        below = hp[row + b:, row:row + b]
        if below.size and np.max(np.abs(below)) > tol * scale:
            return False
        row += b
    return True


def iwasawa_decompose(g, pdata: ParabolicData):
    """Factor g = k * t * u with k in SO(n), t block-diagonal SPD (det 1)
    and u block-unipotent upper triangular, blocks taken from ``pdata``.

    Computed by QR in the sorted basis followed by per-block polar
    corrections; the factorization is unique.
    """
    g = check_group_element(g)
    if g.shape[0] != pdata.n:
        raise DimensionError("group element size does not match parabolic data")
    pm = _permutation_matrix(pdata.order)
    g2 = pm @ g @ pm.T
    q, r = np.linalg.qr(g2)
    sizes = pdata.block_sizes()
    n = pdata.n
    o = np.zeros((n, n))
    row = 0
    for b in sizes:
        blk = r[row:row + b, row:row + b]
        ub, sb, vbh = np.linalg.svd(blk)
        o[row:row + b, row:row + b] = ub @ vbh
        row += b
    k2 = q @ o
    rt = o.T @ r
    t2 = np.zeros((n, n))
    row = 0
    for b in sizes:
        t2[row:row + b, row:row + b] = rt[row:row + b, row:row + b]
        row += b
    u2 = np.linalg.solve(t2, rt)
    k = pm.T @ k2 @ pm
    t = pm.T @ t2 @ pm
    u = pm.T @ u2 @ pm
    return k, t, u


def modular_delta(pdata: ParabolicData, h, tol: float = 1e-9) -> float:
    """|det| of the adjoint action of h on the nilradical of the parabolic.

    For block diagonal determinants d_i (sorted blocks, sizes n_i) the value
    is prod_{i<j} |d_i|^{n_j} |d_j|^{-n_i}; the unipotent part contributes 1.
    """
    h = np.asarray(h, dtype=float)
    if not in_parabolic(pdata, h, tol):
        raise ValueError("element is not in the parabolic subgroup")
    pm = _permutation_matrix(pdata.order)
    hp = pm @ h @ pm.T
    sizes = pdata.block_sizes()
    dets = []
    row = 0
    for b in sizes:
        dets.append(abs(float(np.linalg.det(hp[row:row + b, row:row + b]))))
        row += b
    logdelta = 0.0
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            logdelta += sizes[j] * math.log(dets[i]) - sizes[i] * math.log(dets[j])
    return math.exp(logdelta)


# ---------------------------------------------------------------------------
# Geodesic rays and Busemann functions


@dataclass(frozen=True)
class GeodesicRay:
    """Unit-speed ray t -> base^T exp(t * direction) base.

    ``direction`` is symmetric, traceless, trace-form norm 1; ``base`` is a
    group element translating the ray (None = ray from the identity point).
    """

    direction: np.ndarray
    base: Optional[np.ndarray] = None

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if np.max(np.abs(d - d.T)) > _SYM_TOL:
            raise ValueError("ray direction must be symmetric")
        if abs(float(np.trace(d))) > 1e-9:
            raise ValueError("ray direction must be traceless")
        nrm = float(np.sqrt(np.sum(d * d)))
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"ray direction must have trace-form norm 1, got {nrm}")
        object.__setattr__(self, "direction", d)
        if self.base is not None:
            object.__setattr__(self, "base", check_group_element(self.base))

    def point(self, t: float) -> np.ndarray:
        p = exp_sym(t * self.direction)
        if self.base is None:
            return p
        return self.base.T @ p @ self.base


def ray_from_cartan(a: CartanVector, base: Optional[np.ndarray] = None) -> GeodesicRay:
    """Unit ray through the diagonal flat in direction ``a``."""
    u = a.unit()
    return GeodesicRay(direction=np.diag(u.as_floats()), base=base)


def _log_eigs_graded(m: np.ndarray, expo: np.ndarray, theta: float = 18.0) -> np.ndarray:
    """log eigenvalues of diag(e^{expo/2}) m diag(e^{expo/2}) for SPD m.

    Indices are clustered by adjacent gaps of ``expo`` larger than theta;
    each cluster contributes the eigenvalues of its (Schur complemented,
    rescaled) block.  Cross-cluster coupling enters the log eigenvalues at
    order e^{-theta}, far below the tolerances used here, while every block
    eigensolve only ever sees a dynamic range of e^{theta}.
    """
    order = np.argsort(-expo, kind="stable")
    e = expo[order]
    mw = m[np.ix_(order, order)]
    nloc = len(e)
    clusters = []
    cur = [0]
    for i in range(1, nloc):
        if e[i - 1] - e[i] <= theta:
            cur.append(i)
        else:
            clusters.append(cur)
            cur = [i]
    clusters.append(cur)
    sizes = [len(c) for c in clusters]
    logs = []
    ew = e.copy()
    for ci, b in enumerate(sizes):
        sub = mw[:b, :b]
        eref = ew[0]
        scale = np.exp(0.5 * (ew[:b] - eref))
        t = sub * np.outer(scale, scale)
        ev = np.linalg.eigvalsh(0.5 * (t + t.T))
        if np.min(ev) <= 0:
            raise ValueError("matrix is not positive definite")
        logs.extend(eref + np.log(ev))
        if ci + 1 < len(sizes):
            rest = mw[b:, b:] - mw[b:, :b] @ np.linalg.solve(sub, mw[:b, b:])
            mw = 0.5 * (rest + rest.T)
            ew = ew[b:]
    return np.asarray(logs)


def _distance_to_ray_point(x: np.ndarray, ray: GeodesicRay, t: float) -> float:
    """d(x, ray.point(t)), stable for large t."""
    if ray.base is not None:
        binv = np.linalg.inv(ray.base)
        x = binv.T @ x @ binv
        x = 0.5 * (x + x.T)
    d, q = np.linalg.eigh(ray.direction)
    xin = np.linalg.inv(x)
    mmat = q.T @ xin @ q
    mmat = 0.5 * (mmat + mmat.T)
    logs = _log_eigs_graded(mmat, t * d)
    return float(np.sqrt(np.sum(logs**2)))


@dataclass(frozen=True)
class BusemannEstimate:
    """Finite-horizon Busemann value with a monotonicity report.

    ``values`` are d(x, gamma(t)) - t over the grid; the sequence is
    non-increasing for an exact distance, and the last decrement bounds the
    remaining truncation error.
    """

    value: float
    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    nonincreasing: bool
    truncation: float


_DEFAULT_T_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0)


def busemann_limit(ray: GeodesicRay, x, t_grid: Sequence[float] | None = None,
                   mono_tol: float = 1e-6) -> BusemannEstimate:
    """Estimate the Busemann function of ``ray`` at ``x`` by the defining
    limit of d(x, gamma(t)) - t along ``t_grid`` (increasing, last >= 100)."""
    x = check_sym_point(x)
    grid = tuple(float(t) for t in (t_grid if t_grid is not None else _DEFAULT_T_GRID))
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("t_grid must be strictly increasing")
    if grid[-1] < 100:
        raise ValueError("last grid point must be >= 100")
    values = tuple(_distance_to_ray_point(x, ray, t) - t for t in grid)
    noninc = all(b <= a + mono_tol for a, b in zip(values, values[1:]))
    trunc = abs(values[-1] - values[-2]) if len(values) > 1 else float("inf")
    return BusemannEstimate(value=values[-1], grid=grid, values=values,
                            nonincreasing=noninc, truncation=trunc)


def busemann_formula(a: CartanVector, g) -> float:
    """Busemann function of the unit ray through direction ``a``, evaluated
    at the point pi(g), via fundamental representation norms.

    A nonnegative combination of log||rho_j(.) v_j|| over highest weight
    vectors is constant exactly on the horospheres of the ray whose
    direction is anti-dominant for their simple system (the unipotent
    subgroup fixing the v_j is the one contracted along that ray under the
    right congruence action).  The ray of ``a`` therefore uses the ordering
    that makes ``-a`` dominant:

        beta(pi(g)) = 2 ||a|| sum_j c_j (log||rho_j(g) v_j|| - log||v_j||),

    with c_j the fundamental-weight coefficients of <-a,.>/<a,a> for that
    ordering and v_j its highest weight vectors.  The factor 2 converts
    group coordinates into point coordinates (pi(exp(b)) = exp(2b)); the
    normalization pins beta(pi(e)) = 0.
    """
    if a.is_zero():
        raise ZeroVectorError("zero direction defines no Busemann function")
    g = check_group_element(g)
    if g.shape[0] != a.n:
        raise DimensionError("group element size does not match direction")
    neg = a.scale(-1)
    order = dominant_order(neg)
    coeffs = chi_decompose(neg, order)
    total = 0.0
    for j in range(1, a.n):
        cj = float(coeffs[j - 1])
        if cj == 0.0:
            continue
        rep_j, v_j = highest_weight_vector(a.n, j, order)
        total += cj * (log_rep_norm(rep_j, act(rep_j, g, v_j)) - log_rep_norm(rep_j, v_j))
    return 2.0 * a.norm() * total
