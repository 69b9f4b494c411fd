"""Fraction-free determinants and exact linear solves."""
from __future__ import annotations

from typing import Sequence

from .gcd import poly_lcm
from .poly import MultiPoly
from .ratfunc import RatFunc


class DimensionError(ValueError):
    pass


def bareiss_det(m: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant by Bareiss elimination; every division is exact."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        raise DimensionError("determinant of an empty matrix")
    ring = m[0][0].ring
    a = [list(row) for row in m]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        p = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                v = p * row_i[j] - aik * row_k[j]
                row_i[j] = v.exact_div(prev) if not prev.is_constant() else v.scale(1 / _const(prev))
            row_i[k] = ring.zero
        prev = p
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def _const(p: MultiPoly):
    from fractions import Fraction
    return Fraction(p.constant_value())


def minor(m: Sequence[Sequence], row: int, col: int) -> list[list]:
    """Submatrix with one row and one column deleted (0-based indices)."""
    return [[x for j, x in enumerate(r) if j != col] for i, r in enumerate(m) if i != row]


def _clear_row(row: Sequence[RatFunc]) -> list[MultiPoly]:
    dens = [x.den for x in row if not x.den.is_constant()]
    if not dens:
        return [x.num for x in row]
    lcm = dens[0]
    for d in dens[1:]:
        if d != lcm:
            lcm = poly_lcm(lcm, d)
    return [x.num * lcm.exact_div(x.den) for x in row]


def solve_linear(m: Sequence[Sequence[RatFunc]], rhs: Sequence[RatFunc]) -> list[RatFunc] | None:
    """Unique solution of ``m @ x = rhs`` over the rational function field.

    Returns ``None`` when ``m`` lacks full column rank or the system is
    inconsistent.  Rows are cleared of denominators and reduced by
    fraction-free Gauss-Jordan elimination, so the only gcds taken are the
    final ``numerator/determinant`` reductions.
    """
    nrows = len(m)
    if nrows != len(rhs):
        raise DimensionError("right-hand side length does not match the matrix")
    ncols = len(m[0]) if nrows else 0
    if any(len(r) != ncols for r in m):
        raise DimensionError("ragged matrix")
    if ncols == 0:
        return [] if all(b.is_zero() for b in rhs) else None
    if ncols > nrows:
        return None
    ring = m[0][0].ring
    aug = [_clear_row(list(r) + [b]) for r, b in zip(m, rhs)]
    prev = ring.one
    for k in range(ncols):
        piv = next((r for r in range(k, nrows) if not aug[r][k].is_zero()), None)
        if piv is None:
            return None
        aug[k], aug[piv] = aug[piv], aug[k]
        p = aug[k][k]
        row_k = aug[k]
        for i in range(nrows):
            if i == k:
                continue
            row_i = aug[i]
            aik = row_i[k]
            for j in range(k + 1, ncols + 1):
                v = p * row_i[j] - aik * row_k[j]
                row_i[j] = v.exact_div(prev) if not prev.is_constant() else v.scale(1 / _const(prev))
            row_i[k] = ring.zero
        # earlier pivots are scaled along with the rest of their rows
        for i in range(k):
            aug[i][i] = p
        prev = p
    if any(not aug[r][ncols].is_zero() for r in range(ncols, nrows)):
        return None
    det = prev
    return [RatFunc(aug[i][ncols], det) for i in range(ncols)]
