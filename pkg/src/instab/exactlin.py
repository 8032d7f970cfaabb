"""Small dense linear algebra that works over exact rationals and floats.

All routines accept nested sequences; scalars may be ``Fraction``/``int``
(exact path, pivoting on the first nonzero entry) or ``float`` (partial
pivoting).  Matrices here are tiny (corral Gram systems, minors of group
elements), so clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Sequence


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def is_exact(values) -> bool:
    return all(is_exact_scalar(v) for v in values)


def _rows(a) -> List[list]:
    return [list(row) for row in a]


def solve(a: Sequence[Sequence], b: Sequence) -> list:
    """Solve ``a x = b`` by Gaussian elimination.

    Raises ``ZeroDivisionError`` if the matrix is singular (exact mode) or
    numerically rank deficient (float mode).
    """
    m = _rows(a)
    n = len(m)
    if any(len(row) != n for row in m) or len(b) != n:
        raise ValueError("solve expects a square system")
    exact = all(is_exact(row) for row in m) and is_exact(b)
    rhs = list(b)
    if exact:
        m = [[Fraction(x) for x in row] for row in m]
        rhs = [Fraction(x) for x in rhs]

    for col in range(n):
        if exact:
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(m[r][col]))
            if abs(m[piv][col]) < 1e-300:
                piv = None
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv_p = 1 / m[col][col] if not exact else Fraction(1, 1) / m[col][col]
        for r in range(n):
            if r == col:
                continue
            factor = m[r][col] * inv_p
            if factor == 0:
                continue
            for c in range(col, n):
                m[r][c] -= factor * m[col][c]
            rhs[r] -= factor * rhs[col]
    return [rhs[i] / m[i][i] for i in range(n)]


def det(a: Sequence[Sequence]):
    """Determinant by fraction-free-ish Gaussian elimination."""
    m = _rows(a)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("det expects a square matrix")
    exact = all(is_exact(row) for row in m)
    if exact:
        m = [[Fraction(x) for x in row] for row in m]
    result = Fraction(1) if exact else 1.0
    sign = 1
    for col in range(n):
        if exact:
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(m[r][col]))
            if m[piv][col] == 0:
                piv = None
        if piv is None:
            return result * 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pivot = m[col][col]
        result *= pivot
        for r in range(col + 1, n):
            factor = m[r][col] / pivot
            if factor == 0:
                continue
            for c in range(col, n):
                m[r][c] -= factor * m[col][c]
    return result * sign


def inv(a: Sequence[Sequence]) -> List[list]:
    """Matrix inverse via Gauss-Jordan with the same pivoting rules."""
    m = _rows(a)
    n = len(m)
    exact = all(is_exact(row) for row in m)
    if exact:
        m = [[Fraction(x) for x in row] for row in m]
        aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    else:
        aug = [list(row) + [float(i == j) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        if exact:
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(aug[r][col]))
            if abs(aug[piv][col]) < 1e-300:
                piv = None
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pivot = aug[col][col]
        aug[col] = [x / pivot for x in aug[col]]
        for r in range(n):
            if r == col:
                continue
            factor = aug[r][col]
            if factor == 0:
                continue
            aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def primitive_integer_vector(values: Sequence[Fraction]) -> List[int]:
    """Scale a rational vector by the smallest positive rational making all
    entries integers with overall gcd 1.  Direction is preserved."""
    fracs = [Fraction(v) for v in values]
    if all(f == 0 for f in fracs):
        raise ValueError("cannot normalize the zero vector")
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [x // g for x in ints]
