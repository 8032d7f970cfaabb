"""Representations of SL(n) assembled from a small AST.

Supported constructors: the standard representation, duals, exterior and
symmetric powers, and tensor products (DSL: ``std``, ``dual(R)``,
``wedge(k,R)``, ``sym(k,R)``, ``R * R``).  Every representation is realized
inside a tensor power of the standard representation, which fixes a monomial
basis of weight vectors in deterministic lexicographic order and endows the
space with an SO(n)-invariant inner product that is diagonal on that basis:
wedge monomials carry the determinant (Gram) convention, symmetric monomials
the multinomial weights of their symmetrized tensors.  Weight spaces are
orthogonal by construction.

Group elements act functorially: duals by inverse transpose, exterior powers
by compound matrices of minors, symmetric powers by the induced action on
polynomials, tensors by Kronecker products.  Entries may be floats or exact
``Fraction``s; the exact path is used whenever both the group element and
the vector are rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Tuple, Union

import numpy as np

from . import exactlin
from .cartan import Cocharacter, SimpleSystem, Weight
from .errors import DimensionError, ParseError, ZeroVectorError

NEG_INF = float("-inf")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Standard:
    def __str__(self) -> str:
        return "std"


@dataclass(frozen=True)
class Dual:
    base: "RepSpec"

    def __str__(self) -> str:
        return f"dual({self.base})"


@dataclass(frozen=True)
class Wedge:
    k: int
    base: "RepSpec"

    def __str__(self) -> str:
        return f"wedge({self.k},{self.base})"


@dataclass(frozen=True)
class Sym:
    k: int
    base: "RepSpec"

    def __str__(self) -> str:
        return f"sym({self.k},{self.base})"


@dataclass(frozen=True)
class Tensor:
    left: "RepSpec"
    right: "RepSpec"

    def __str__(self) -> str:
        left = f"({self.left})" if isinstance(self.left, Tensor) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, Tensor) else str(self.right)
        return f"{left}*{right}"


RepSpec = Union[Standard, Dual, Wedge, Sym, Tensor]


def parse_rep_spec(text: str) -> RepSpec:
    """Parse the DSL ``std | dual(R) | wedge(k,R) | sym(k,R) | R * R``."""
    tokens = _tokenize(text)
    spec, pos = _parse_expr(tokens, 0)
    if pos != len(tokens):
        raise ParseError(f"unexpected token {tokens[pos][0]!r}", tokens[pos][1])
    return spec


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()*,":
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append((text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


def _parse_expr(tokens, pos):
    spec, pos = _parse_atom(tokens, pos)
    while pos < len(tokens) and tokens[pos][0] == "*":
        right, pos = _parse_atom(tokens, pos + 1)
        spec = Tensor(spec, right)
    return spec, pos


def _expect(tokens, pos, symbol):
    if pos >= len(tokens):
        raise ParseError(f"expected {symbol!r} but input ended", len(tokens))
    if tokens[pos][0] != symbol:
        raise ParseError(f"expected {symbol!r}, got {tokens[pos][0]!r}", tokens[pos][1])
    return pos + 1


def _parse_atom(tokens, pos):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input", len(tokens))
    tok, at = tokens[pos]
    if tok == "std":
        return Standard(), pos + 1
    if tok == "(":
        spec, pos = _parse_expr(tokens, pos + 1)
        pos = _expect(tokens, pos, ")")
        return spec, pos
    if tok == "dual":
        pos = _expect(tokens, pos + 1, "(")
        base, pos = _parse_expr(tokens, pos)
        pos = _expect(tokens, pos, ")")
        return Dual(base), pos
    if tok in ("wedge", "sym"):
        pos = _expect(tokens, pos + 1, "(")
        if pos >= len(tokens) or not tokens[pos][0].isdigit():
            where = tokens[pos][1] if pos < len(tokens) else len(tokens)
            raise ParseError(f"{tok} needs an integer degree", where)
        k = int(tokens[pos][0])
        pos = _expect(tokens, pos + 1, ",")
        base, pos = _parse_expr(tokens, pos)
        pos = _expect(tokens, pos, ")")
        return (Wedge if tok == "wedge" else Sym)(k, base), pos
    raise ParseError(f"unknown token {tok!r}", at)


# ---------------------------------------------------------------------------
# Basis, weights, gram


@dataclass(frozen=True)
class Representation:
    """A concrete representation with its monomial weight basis.

    ``weights[i]`` is the torus character of basis element i; ``gram[i]`` the
    (positive rational) squared norm of that basis element.  Distinct-weight
    basis elements are orthogonal since the inner product is diagonal.
    """

    spec: RepSpec
    n: int
    dim: int
    weights: Tuple[Weight, ...]
    gram: Tuple[Fraction, ...]


def build_rep(spec: RepSpec, n: int) -> Representation:
    if n < 2:
        raise DimensionError("n must be at least 2")
    weights, gram = _basis_data(spec, n)
    return Representation(spec=spec, n=n, dim=len(weights), weights=weights, gram=gram)


@lru_cache(maxsize=None)
def _basis_data(spec: RepSpec, n: int):
    if isinstance(spec, Standard):
        weights = []
        for i in range(n):
            coords = [Fraction(-1, n)] * n
            coords[i] += 1
            weights.append(Weight(coords))
        return tuple(weights), tuple(Fraction(1) for _ in range(n))
    if isinstance(spec, Dual):
        wts, grm = _basis_data(spec.base, n)
        return tuple(w.negate() for w in wts), tuple(Fraction(1) / g for g in grm)
    if isinstance(spec, Wedge):
        wts, grm = _basis_data(spec.base, n)
        d = len(wts)
        if spec.k < 1:
            raise DimensionError("wedge degree must be >= 1")
        if spec.k > d:
            raise DimensionError(f"wedge degree {spec.k} exceeds dimension {d}")
        weights, gram = [], []
        for idx in combinations(range(d), spec.k):
            w = wts[idx[0]]
            g = grm[idx[0]]
            for i in idx[1:]:
                w = w.add(wts[i])
                g = g * grm[i]
            weights.append(w)
            gram.append(g)
        return tuple(weights), tuple(gram)
    if isinstance(spec, Sym):
        wts, grm = _basis_data(spec.base, n)
        d = len(wts)
        if spec.k < 1:
            raise DimensionError("sym degree must be >= 1")
        weights, gram = [], []
        for idx in combinations_with_replacement(range(d), spec.k):
            w = wts[idx[0]]
            g = grm[idx[0]]
            for i in idx[1:]:
                w = w.add(wts[i])
                g = g * grm[i]
            weights.append(w)
            gram.append(g * _distinct_arrangements(idx))
        return tuple(weights), tuple(gram)
    if isinstance(spec, Tensor):
        lw, lg = _basis_data(spec.left, n)
        rw, rg = _basis_data(spec.right, n)
        weights, gram = [], []
        for (wl, gl), (wr, gr) in product(zip(lw, lg), zip(rw, rg)):
            weights.append(wl.add(wr))
            gram.append(gl * gr)
        return tuple(weights), tuple(gram)
    raise TypeError(f"unknown spec node {spec!r}")


def _distinct_arrangements(idx: Tuple[int, ...]) -> int:
    """Number of distinct words spelled by a sorted multiset (multinomial)."""
    counts = {}
    for i in idx:
        counts[i] = counts.get(i, 0) + 1
    total = math.factorial(len(idx))
    for c in counts.values():
        total //= math.factorial(c)
    return total


@lru_cache(maxsize=None)
def _basis_index(spec: RepSpec, n: int):
    """Monomial index tuples of the basis, in the enumeration order used
    throughout (lexicographic in child indices)."""
    if isinstance(spec, (Standard,)):
        return tuple((i,) for i in range(n))
    if isinstance(spec, Dual):
        return tuple((i,) for i in range(len(_basis_data(spec.base, n)[0])))
    if isinstance(spec, Wedge):
        d = len(_basis_data(spec.base, n)[0])
        return tuple(combinations(range(d), spec.k))
    if isinstance(spec, Sym):
        d = len(_basis_data(spec.base, n)[0])
        return tuple(combinations_with_replacement(range(d), spec.k))
    if isinstance(spec, Tensor):
        dl = len(_basis_data(spec.left, n)[0])
        dr = len(_basis_data(spec.right, n)[0])
        return tuple(product(range(dl), range(dr)))
    raise TypeError(f"unknown spec node {spec!r}")


def basis_labels(rep: Representation) -> Tuple[str, ...]:
    """Human-readable monomial labels, for tables and debugging."""

    def label(spec, idx) -> str:
        if isinstance(spec, Standard):
            return f"e{idx[0] + 1}"
        if isinstance(spec, Dual):
            return f"{label_of(spec.base, idx[0])}^*"
        if isinstance(spec, Wedge):
            return "^".join(label_of(spec.base, i) for i in idx)
        if isinstance(spec, Sym):
            return ".".join(label_of(spec.base, i) for i in idx)
        if isinstance(spec, Tensor):
            return f"{label_of(spec.left, idx[0])}(x){label_of(spec.right, idx[1])}"
        raise TypeError

    def label_of(spec, flat_index) -> str:
        return label(spec, _basis_index(spec, rep.n)[flat_index])

    return tuple(label(rep.spec, idx) for idx in _basis_index(rep.spec, rep.n))


# ---------------------------------------------------------------------------
# Group action


def check_unimodular_float(mat: np.ndarray, det_tol: float = 1e-9) -> None:
    """Check det = 1 up to what the conditioning of ``mat`` permits.

    The float determinant of a matrix with condition number kappa carries a
    relative error of order kappa * eps, so the tolerance scales with a
    Frobenius estimate of kappa; blunders (wrong sign, det far from 1) are
    still rejected at every scale.
    """
    sign, logdet = np.linalg.slogdet(mat)
    if sign <= 0:
        raise ValueError("group element must have determinant 1 (got sign <= 0)")
    try:
        cond = float(np.linalg.norm(mat) * np.linalg.norm(np.linalg.inv(mat)))
    except np.linalg.LinAlgError:
        raise ValueError("group element is numerically singular")
    if abs(logdet) > det_tol * max(1.0, cond):
        raise ValueError(f"group element must have determinant 1, "
                         f"got log|det| = {logdet}")


def _as_group_matrix(g, n: int, det_tol: float = 1e-9):
    """Validate shape and unimodularity; return (matrix, exact_flag)."""
    if isinstance(g, np.ndarray) and g.dtype != object:
        mat = np.asarray(g, dtype=float)
        exact = False
    else:
        rows = [list(row) for row in g]
        flat = [x for row in rows for x in row]
        exact = exactlin.is_exact(flat)
        if exact:
            mat = np.empty((len(rows), len(rows[0])), dtype=object)
            for i, row in enumerate(rows):
                for j, x in enumerate(row):
                    mat[i, j] = Fraction(x)
        else:
            mat = np.asarray(rows, dtype=float)
    if mat.shape != (n, n):
        raise DimensionError(f"group element must be {n}x{n}, got {mat.shape}")
    if exact:
        if exactlin.det(mat.tolist()) != 1:
            raise ValueError("group element must have determinant 1")
    else:
        check_unimodular_float(mat, det_tol)
    return mat, exact


def _compound(m, k: int, exact: bool):
    d = m.shape[0]
    idx = list(combinations(range(d), k))
    sz = len(idx)
    if exact:
        out = np.empty((sz, sz), dtype=object)
        rows = m.tolist()
        for a, ia in enumerate(idx):
            for b, jb in enumerate(idx):
                out[a, b] = exactlin.det([[rows[r][c] for c in jb] for r in ia])
        return out
    minors = np.empty((sz, sz, k, k))
    for a, ia in enumerate(idx):
        block = m[np.ix_(ia, range(d))]
        for b, jb in enumerate(idx):
            minors[a, b] = block[:, jb]
    return np.linalg.det(minors.reshape(sz * sz, k, k)).reshape(sz, sz)


def _sym_power(m, k: int, exact: bool):
    """Induced action on degree-k symmetric tensors in the monomial basis."""
    d = m.shape[0]
    monomials = list(combinations_with_replacement(range(d), k))
    pos = {mono: i for i, mono in enumerate(monomials)}
    sz = len(monomials)
    zero = Fraction(0) if exact else 0.0
    out = np.full((sz, sz), zero, dtype=object if exact else float)
    cols = m.T.tolist()
    for ci, mono in enumerate(monomials):
        # image of the monomial basis vector: scale by (#distinct words)
        # and fold column vectors of m in one at a time
        start = Fraction(_distinct_arrangements(mono)) if exact \
            else float(_distinct_arrangements(mono))
        poly = {(): start}
        for child in mono:
            col = cols[child]
            new = {}
            t = None
            for key, coeff in poly.items():
                t = len(key)
                for j in range(d):
                    cj = col[j]
                    if cj == 0:
                        continue
                    nkey = tuple(sorted(key + (j,)))
                    mult = nkey.count(j)
                    term = coeff * cj * mult
                    if exact:
                        term = term / (t + 1)
                    else:
                        term = term / (t + 1.0)
                    if nkey in new:
                        new[nkey] = new[nkey] + term
                    else:
                        new[nkey] = term
            poly = new
        for key, coeff in poly.items():
            out[pos[key], ci] = coeff
    return out


def _kron(a, b, exact: bool):
    if not exact:
        return np.kron(a, b)
    da, db = a.shape[0], b.shape[0]
    out = np.empty((da * db, da * db), dtype=object)
    for i1 in range(da):
        for j1 in range(da):
            for i2 in range(db):
                for j2 in range(db):
                    out[i1 * db + i2, j1 * db + j2] = a[i1, j1] * b[i2, j2]
    return out


def _matrix(spec: RepSpec, g, exact: bool):
    if isinstance(spec, Standard):
        return g
    if isinstance(spec, Dual):
        base = _matrix(spec.base, g, exact)
        if exact:
            invm = exactlin.inv(base.tolist())
            out = np.empty(base.shape, dtype=object)
            for i in range(base.shape[0]):
                for j in range(base.shape[1]):
                    out[i, j] = invm[j][i]
            return out
        return np.linalg.inv(base).T
    if isinstance(spec, Wedge):
        return _compound(_matrix(spec.base, g, exact), spec.k, exact)
    if isinstance(spec, Sym):
        return _sym_power(_matrix(spec.base, g, exact), spec.k, exact)
    if isinstance(spec, Tensor):
        return _kron(_matrix(spec.left, g, exact), _matrix(spec.right, g, exact), exact)
    raise TypeError(f"unknown spec node {spec!r}")


def rep_matrix(rep: Representation, g) -> np.ndarray:
    """Matrix of ``g`` on the monomial basis of ``rep``."""
    mat, exact = _as_group_matrix(g, rep.n)
    return _matrix(rep.spec, mat, exact)


def _vector_in(rep: Representation, v):
    coords = list(v)
    if len(coords) != rep.dim:
        raise DimensionError(f"vector length {len(coords)} != rep dim {rep.dim}")
    exact = exactlin.is_exact(coords)
    if exact:
        return tuple(Fraction(c) for c in coords), True
    return np.asarray([float(c) for c in coords]), False


def act(rep: Representation, g, v):
    """Apply ``g`` to ``v``; exact when both inputs are rational.

    Satisfies ``act(rep, g1 @ g2, v) == act(rep, g1, act(rep, g2, v))``.
    """
    mat, g_exact = _as_group_matrix(g, rep.n)
    vec, v_exact = _vector_in(rep, v)
    if g_exact and v_exact:
        m = _matrix(rep.spec, mat, True)
        vv = np.empty(rep.dim, dtype=object)
        for i, c in enumerate(vec):
            vv[i] = c
        out = np.dot(m, vv)
        return tuple(out.tolist())
    if g_exact:
        mat = mat.astype(float)
    if v_exact:
        vec = np.asarray([float(c) for c in vec])
    m = _matrix(rep.spec, mat, False)
    return m @ vec


# ---------------------------------------------------------------------------
# Norms, weight components, valuations


def _log_sqrt_fraction(q: Fraction) -> float:
    """log(sqrt(q)) for a positive rational, safe for huge numerators."""
    return 0.5 * (_log_int(q.numerator) - _log_int(q.denominator))


def _log_int(k: int) -> float:
    return math.log(k)


def norm_sq(rep: Representation, v):
    """Gram-weighted squared norm; ``Fraction`` for exact vectors."""
    vec, exact = _vector_in(rep, v)
    if exact:
        return sum(g * c * c for g, c in zip(rep.gram, vec))
    gr = np.asarray([float(g) for g in rep.gram])
    return float(np.dot(gr, vec * vec))


def rep_norm(rep: Representation, v) -> float:
    """SO(n)-invariant norm of ``v`` (weight spaces orthogonal)."""
    ns = norm_sq(rep, v)
    if isinstance(ns, Fraction):
        if ns == 0:
            return 0.0
        return math.exp(_log_sqrt_fraction(ns))
    return math.sqrt(ns)


def log_rep_norm(rep: Representation, v) -> float:
    """log of ``rep_norm``, computed in a scale-safe way (-inf for zero)."""
    vec, exact = _vector_in(rep, v)
    if exact:
        ns = sum(g * c * c for g, c in zip(rep.gram, vec))
        if ns == 0:
            return NEG_INF
        return _log_sqrt_fraction(ns)
    w = np.sqrt(np.asarray([float(g) for g in rep.gram])) * vec
    s = float(np.max(np.abs(w))) if len(w) else 0.0
    if s == 0.0:
        return NEG_INF
    return math.log(s) + 0.5 * math.log(float(np.sum((w / s) ** 2)))


def weight_components(rep: Representation, v, eps: float = 1e-10):
    """Split ``v`` into weight components and report their log norms.

    Returns ``[(weight, r)]`` over the weights of the basis, sorted by
    weight coordinates; ``r`` is the log of the gram-weighted component norm
    for components above ``eps * ||v||`` (exact nonzero test for rational
    vectors), and ``-inf`` otherwise.
    """
    vec, exact = _vector_in(rep, v)
    groups: dict = {}
    for i, w in enumerate(rep.weights):
        groups.setdefault(w, []).append(i)
    items = sorted(groups.items(), key=lambda kv: kv[0].coords)
    out = []
    if exact:
        if all(c == 0 for c in vec):
            raise ZeroVectorError("zero vector has no weight components")
        for w, idx in items:
            ns = sum(rep.gram[i] * vec[i] * vec[i] for i in idx)
            out.append((w, _log_sqrt_fraction(ns) if ns != 0 else NEG_INF))
        return out
    total = rep_norm(rep, v)
    if total == 0.0:
        raise ZeroVectorError("zero vector has no weight components")
    gr = np.asarray([float(g) for g in rep.gram])
    for w, idx in items:
        ns = float(np.sum(gr[idx] * vec[idx] ** 2))
        nrm = math.sqrt(ns)
        out.append((w, math.log(nrm) if nrm > eps * total else NEG_INF))
    return out


def active_weights(rep: Representation, v, eps: float = 1e-10):
    """The weights whose component of ``v`` is nonzero, with log norms."""
    return [(w, r) for w, r in weight_components(rep, v, eps) if r != NEG_INF]


def highest_weight_vector(n: int, j: int, order: SimpleSystem | None = None):
    """The degree-j fundamental representation and its highest weight vector.

    Returns ``(rep, v)`` with rep = wedge(j, std) and v the wedge of the
    first j coordinate axes of ``order`` (identity order: e_1 ^ ... ^ e_j).
    Its weight is the j-th fundamental weight; its line is fixed by the
    upper-triangular subgroup adapted to ``order``.
    """
    if not 1 <= j <= n - 1:
        raise DimensionError(f"fundamental degree must be in 1..{n - 1}, got {j}")
    if order is None:
        order = SimpleSystem.identity(n)
    rep = build_rep(Wedge(j, Standard()), n)
    target = tuple(sorted(order.perm[:j]))
    index = _basis_index(rep.spec, n).index(target)
    v = np.zeros(rep.dim)
    v[index] = 1.0
    return rep, v


def m_value(rep: Representation, v, tau: Cocharacter, eps: float = 1e-10) -> int:
    """Minimal tau-exponent over the nonzero components of ``v``.

    This is the valuation at t=0 of t -> rho(tau(t)) v: the group element
    tau(t) scales each weight component by t^<weight, tau>, and the smallest
    exponent present controls the decay.  Scales linearly in tau.
    """
    if tau.n != rep.n:
        raise DimensionError("cocharacter dimension mismatch")
    if all(e == 0 for e in tau.exps):
        raise ZeroVectorError("zero cocharacter")
    act_w = active_weights(rep, v, eps)
    if not act_w:
        raise ZeroVectorError("zero vector")
    return min(w.pair_int(tau) for w, _ in act_w)
