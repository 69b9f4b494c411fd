"""Exact Taylor jets of trajectories of affine linear models."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import NonGenericPointError, RatFunc
from .model import LinearModel


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients of t^0..t^N."""

    coefficients: tuple

    @classmethod
    def of(cls, coeffs) -> "TruncatedSeries":
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls.of([c] + [0] * order)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self, k: int = 1) -> "TruncatedSeries":
        c = list(self.coefficients)
        for _ in range(k):
            c = [i * c[i] for i in range(1, len(c))]
        return TruncatedSeries(tuple(c))

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coefficients[:order + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order) + 1
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coefficients[:n], other.coefficients[:n])))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries(tuple(c * x for x in self.coefficients))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order) + 1
        a, b = self.coefficients, other.coefficients
        return TruncatedSeries(tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)))

    def is_zero(self) -> bool:
        return not any(self.coefficients)


@dataclass(frozen=True)
class Trajectory:
    states: tuple[TruncatedSeries, ...]
    outputs: tuple[TruncatedSeries, ...]
    inputs: tuple[TruncatedSeries, ...]
    order: int


def default_order(model: LinearModel) -> int:
    return 2 * model.n + 4


def _evaluate_all(model: LinearModel, point: Sequence) -> dict:
    values = list(point) + [0]  # operator symbol slot, unused by model entries

    def ev(x: RatFunc):
        try:
            return x.evaluate(values)
        except NonGenericPointError as exc:
            raise NonGenericPointError(f"non-generic parameter point: {exc}") from None

    return {
        "A": [[ev(x) for x in row] for row in model.A],
        "B": [[ev(x) for x in row] for row in model.B],
        "C": [[ev(x) for x in row] for row in model.C],
        "D": [[ev(x) for x in row] for row in model.D],
        "f0": [ev(x) for x in model.f0],
        "g0": [ev(x) for x in model.g0],
    }


def simulate(model: LinearModel, params: Sequence, x0: Sequence, inputs: Sequence[TruncatedSeries],
             order: int) -> Trajectory:
    """Taylor coefficients of states and outputs up to t^order.

    Raises :class:`NonGenericPointError` when a model denominator vanishes at
    ``params``.
    """
    if len(params) != len(model.params):
        raise ValueError("parameter vector length does not match the model")
    if len(x0) != model.n or len(inputs) != model.kappa:
        raise ValueError("initial state or input count does not match the model")
    if any(u.order < order for u in inputs):
        raise ValueError("input series are truncated below the requested order")
    mats = _evaluate_all(model, params)
    A, B, C, D, f0, g0 = mats["A"], mats["B"], mats["C"], mats["D"], mats["f0"], mats["g0"]
    n, k = model.n, model.kappa
    xs = [[Fraction(v) for v in x0]]
    for t in range(order):
        cur = xs[-1]
        nxt = []
        for i in range(n):
            acc = sum(A[i][j] * cur[j] for j in range(n) if A[i][j])
            acc += sum(B[i][j] * inputs[j].coefficients[t] for j in range(k) if B[i][j])
            if t == 0:
                acc += f0[i]
            nxt.append(Fraction(acc) / (t + 1))
        xs.append(nxt)
    states = tuple(TruncatedSeries(tuple(xs[t][i] for t in range(order + 1))) for i in range(n))
    outs = []
    for r in range(model.m):
        coeffs = []
        for t in range(order + 1):
            acc = sum(C[r][j] * xs[t][j] for j in range(n) if C[r][j])
            acc += sum(D[r][j] * inputs[j].coefficients[t] for j in range(k) if D[r][j])
            if t == 0:
                acc += g0[r]
            coeffs.append(Fraction(acc))
        outs.append(TruncatedSeries(tuple(coeffs)))
    trimmed = tuple(u.truncate(order) for u in inputs)
    return Trajectory(states, tuple(outs), trimmed, order)


def random_input(rng: random.Random, order: int, degree: int | None = None, bound: int = 9) -> TruncatedSeries:
    """Polynomial input with random small integer coefficients, as a jet of the given order."""
    degree = order if degree is None else degree
    coeffs = [rng.randint(-bound, bound) for _ in range(degree + 1)]
    coeffs[degree] = coeffs[degree] or 1
    coeffs += [0] * max(0, order - degree)
    return TruncatedSeries.of(coeffs[:order + 1])


def series_wronskian(series: Sequence[TruncatedSeries], order: int | None = None) -> TruncatedSeries:
    """Wronskian determinant det[f_j^{(i)}] as a truncated series.

    The result is exact up to ``t^(order - k + 1)`` for a tuple of length k.
    """
    k = len(series)
    if k == 0:
        return TruncatedSeries.of([1])
    order = min(s.order for s in series) if order is None else order
    if k - 1 > order:
        raise ValueError(f"a Wronskian of {k} functions needs series of order at least {k - 1}")
    keep = order - (k - 1)
    rows = [[s.truncate(order).derivative(i).truncate(keep) for s in series] for i in range(k)]
    # Laplace expansion along rows, memoized on the set of columns still available
    memo: dict[tuple, TruncatedSeries] = {}

    def det(row: int, cols: tuple) -> TruncatedSeries:
        if row == k:
            return TruncatedSeries.constant(1, keep)
        hit = memo.get(cols)
        if hit is not None:
            return hit
        total = TruncatedSeries.constant(0, keep)
        for pos, c in enumerate(cols):
            entry = rows[row][c]
            if entry.is_zero():
                continue
            sub = det(row + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total + (term if pos % 2 == 0 else term.scale(-1))
        memo[cols] = total
        return total

    return det(0, tuple(range(k)))


def jet_rank(series: Sequence[TruncatedSeries]) -> int:
    """Rank over Q of the coefficient vectors of the given jets.

    Full rank certifies linear independence over constants, which for analytic
    functions is equivalent to a nonzero Wronskian.
    """
    rows = [list(s.coefficients) for s in series]
    rank = 0
    width = min((len(r) for r in rows), default=0)
    for col in range(width):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / p[col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], p)]
        rank += 1
    return rank
