"""Root data and character arithmetic for the diagonal torus of SL(n).

Directions in the maximal flat are traceless real (or exact rational)
n-vectors; torus characters are stored as their canonical sum-zero rational
representatives and paired with directions by the trace form.  On traceless
matrices the trace form tr(XY) is the Killing form divided by 2n, so chamber
structure, normalized directions and argmax problems are unchanged by the
choice; certificates record ``form: "trace"``.

Coordinate orderings (simple systems) are 0-based permutations of the n
diagonal entries; position i of the permutation names the coordinate in the
i-th slot of the induced chamber, with simple roots
``e[perm[i]] - e[perm[i+1]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, sqrt
from typing import Sequence, Tuple, Union

from .errors import DimensionError, ZeroVectorError
from . import exactlin

Scalar = Union[int, float, Fraction]

_FLOAT_SUM_TOL = 1e-12


def _coerce(values) -> Tuple[Scalar, ...]:
    out = []
    for v in values:
        if isinstance(v, bool):
            raise TypeError("bool is not a coordinate")
        if isinstance(v, int):
            out.append(Fraction(v))
        elif isinstance(v, (Fraction, float)):
            out.append(v)
        else:
            raise TypeError(f"unsupported coordinate type {type(v)!r}")
    return tuple(out)


@dataclass(frozen=True)
class CartanVector:
    """A traceless direction in the flat of diagonal matrices.

    Coordinates sum to 0: exactly for rationals, within 1e-12 (relative to
    the largest entry) for floats.
    """

    coords: Tuple[Scalar, ...]

    def __init__(self, coords: Sequence[Scalar]):
        coords = _coerce(coords)
        if len(coords) < 2:
            raise DimensionError("need at least 2 coordinates")
        total = sum(coords)
        if exactlin.is_exact(coords):
            if total != 0:
                raise ValueError(f"coordinates must sum to 0, got {total}")
        else:
            scale = max(1.0, max(abs(float(c)) for c in coords))
            if abs(float(total)) > _FLOAT_SUM_TOL * scale:
                raise ValueError(f"coordinates must sum to 0, got {float(total)}")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def is_exact(self) -> bool:
        return exactlin.is_exact(self.coords)

    def is_zero(self) -> bool:
        if self.is_exact:
            return all(c == 0 for c in self.coords)
        return all(abs(float(c)) < 1e-15 for c in self.coords)

    def norm_sq(self) -> Scalar:
        return sum(c * c for c in self.coords)

    def norm(self) -> float:
        return sqrt(float(self.norm_sq()))

    def unit(self) -> "CartanVector":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroVectorError("cannot normalize the zero direction")
        return CartanVector(tuple(float(c) / nrm for c in self.coords))

    def scale(self, s: Scalar) -> "CartanVector":
        return CartanVector(tuple(c * s for c in self.coords))

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.coords)


@dataclass(frozen=True)
class Weight:
    """A torus character, stored as its sum-zero rational representative."""

    coords: Tuple[Fraction, ...]

    def __init__(self, coords: Sequence[Union[int, Fraction]]):
        coords = tuple(Fraction(c) for c in coords)
        if sum(coords) != 0:
            raise ValueError("weight representative must sum to 0 exactly")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    def pair(self, a: "CartanVector") -> Scalar:
        """Evaluate the character on a flat direction (trace-form pairing)."""
        return form_inner(self.as_cartan(), a)

    def pair_int(self, tau: "Cocharacter") -> int:
        """Pairing with an integer cocharacter; always an exact integer."""
        val = sum(c * e for c, e in zip(self.coords, tau.exps))
        if val.denominator != 1:
            raise ArithmeticError(f"non-integral pairing {val}")
        return int(val)

    def as_cartan(self) -> CartanVector:
        return CartanVector(self.coords)

    def negate(self) -> "Weight":
        return Weight(tuple(-c for c in self.coords))

    def add(self, other: "Weight") -> "Weight":
        if self.n != other.n:
            raise DimensionError("weight dimension mismatch")
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))


@dataclass(frozen=True)
class Cocharacter:
    """An integer one-parameter subgroup of the diagonal torus.

    ``exps`` are the diagonal exponents; they sum to 0.  ``primitive`` is
    True when the gcd of the nonzero entries is 1.
    """

    exps: Tuple[int, ...]

    def __init__(self, exps: Sequence[int]):
        exps = tuple(int(e) for e in exps)
        if sum(exps) != 0:
            raise ValueError("cocharacter exponents must sum to 0")
        object.__setattr__(self, "exps", exps)

    @property
    def n(self) -> int:
        return len(self.exps)

    @property
    def primitive(self) -> bool:
        g = 0
        for e in self.exps:
            g = gcd(g, abs(e))
        return g == 1

    def norm_sq(self) -> int:
        return sum(e * e for e in self.exps)

    def norm(self) -> float:
        return sqrt(self.norm_sq())

    def as_cartan(self) -> CartanVector:
        return CartanVector(tuple(Fraction(e) for e in self.exps))

    def power(self, k: int) -> "Cocharacter":
        return Cocharacter(tuple(k * e for e in self.exps))


@dataclass(frozen=True)
class SimpleSystem:
    """An ordering of the n coordinates; determines a simple system.

    The induced simple roots are ``e[perm[i]] - e[perm[i+1]]`` for
    i = 0..n-2, and the closed positive chamber is the set of directions
    whose coordinates are non-increasing along ``perm``.
    """

    perm: Tuple[int, ...]

    def __init__(self, perm: Sequence[int]):
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"not a permutation of 0..{len(perm) - 1}: {perm}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> "SimpleSystem":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def simple_roots(self) -> Tuple[Weight, ...]:
        n = self.n
        roots = []
        for i in range(n - 1):
            coords = [Fraction(0)] * n
            coords[self.perm[i]] = Fraction(1)
            coords[self.perm[i + 1]] = Fraction(-1)
            roots.append(Weight(coords))
        return tuple(roots)

    def contains(self, a: CartanVector) -> bool:
        """True when ``a`` lies in the closed positive chamber."""
        c = a.coords
        return all(c[self.perm[i]] >= c[self.perm[i + 1]] for i in range(self.n - 1))


def form_inner(a: CartanVector, b: CartanVector) -> Scalar:
    """Trace-form inner product of two flat directions.

    Returns a ``Fraction`` when both inputs are exact, otherwise a float.
    Symmetric and positive definite on traceless vectors.
    """
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")
    total = sum(x * y for x, y in zip(a.coords, b.coords))
    if isinstance(total, Fraction):
        return total
    return float(total)


def fundamental_weights(n: int, order: SimpleSystem | None = None) -> Tuple[Weight, ...]:
    """The n-1 fundamental weights for the given coordinate ordering.

    They satisfy 2<alpha_i, chi_j> / <alpha_i, alpha_i> = delta_ij under the
    trace form.  For the identity ordering, chi_j has j leading entries
    (n-j)/n and the rest -j/n.
    """
    if n < 2:
        raise DimensionError("n must be at least 2")
    if order is None:
        order = SimpleSystem.identity(n)
    if order.n != n:
        raise DimensionError("ordering size does not match n")
    weights = []
    for j in range(1, n):
        coords = [Fraction(-j, n)] * n
        for i in range(j):
            coords[order.perm[i]] = Fraction(n - j, n)
        weights.append(Weight(coords))
    return tuple(weights)


def chi_decompose(a: CartanVector, order: SimpleSystem) -> Tuple[Scalar, ...]:
    """Coefficients of the character b -> <a,b>/<a,a> over the fundamental
    weights of ``order``.

    The fundamental weights are dual to the simple roots (each root has
    squared length 2), so the j-th coefficient is
    ``(a[perm[j]] - a[perm[j+1]]) / <a,a>``.  If ``a`` lies in the closed
    positive chamber of ``order``, every coefficient is >= 0.
    """
    if a.is_zero():
        raise ZeroVectorError("cannot decompose the character of the zero direction")
    if order.n != a.n:
        raise DimensionError("ordering size does not match direction")
    nsq = a.norm_sq()
    c = a.coords
    return tuple((c[order.perm[j]] - c[order.perm[j + 1]]) / nsq for j in range(a.n - 1))


def chi_recombine(coeffs: Sequence[Scalar], order: SimpleSystem) -> CartanVector:
    """Sum-zero vector of ``sum_j coeffs[j] * chi_j`` for the given order."""
    n = order.n
    chis = fundamental_weights(n, order)
    acc = [Fraction(0)] * n
    exact = exactlin.is_exact(coeffs)
    if not exact:
        acc = [0.0] * n
    for coef, chi in zip(coeffs, chis):
        for i, x in enumerate(chi.coords):
            acc[i] = acc[i] + coef * x
    return CartanVector(acc)


def dominant_order(a: CartanVector) -> SimpleSystem:
    """Ordering that sorts the coordinates of ``a`` non-increasingly.

    Ties keep ascending original index (stable sort), so the result is
    deterministic and certificates are reproducible.
    """
    idx = sorted(range(a.n), key=lambda i: a.coords[i], reverse=True)
    return SimpleSystem(tuple(idx))
