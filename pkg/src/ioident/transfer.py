"""Transfer-function matrices ``H(s) = C (sI - A)^-1 B + D``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import OPERATOR_SYMBOL, OperatorPoly, RatFunc, bareiss_det, minor
from .ioeq import characteristic_matrix
from .model import CompartmentModel, LinearModel, as_linear

OFFSET_CAVEAT = ("model has constant offsets f0/g0; the transfer function describes the offset-free part "
                 "with zero initial conditions")


@dataclass(frozen=True)
class TransferEntry:
    """Reduced entry ``num/den`` with ``den`` monic in s."""

    num: OperatorPoly
    den: OperatorPoly
    value: RatFunc  # the same function as a reduced quotient over params and s

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def format(self) -> str:
        if self.num.is_zero():
            return "0"
        num = self.num.format(OPERATOR_SYMBOL)
        if self.den.degree() == 0:
            return num
        if _terms(self.num) > 1 or num.startswith("-"):
            num = f"({num})"
        den = self.den.format(OPERATOR_SYMBOL)
        return f"{num}/({den})" if _terms(self.den) > 1 else f"{num}/{den}"

    def __str__(self):
        return self.format()


def _terms(p: OperatorPoly) -> int:
    return sum(1 for c in p.coeffs if not c.is_zero())


@dataclass(frozen=True)
class TransferMatrix:
    entries: tuple  # rows of TransferEntry, one row per output
    caveat: str | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def entry_from_ratfunc(value: RatFunc) -> TransferEntry:
    """Split a reduced quotient into numerator and monic denominator in s.

    ``value`` is coprime in Q[params, s], hence (Gauss) also coprime in
    Q(params)[s]; only the s-leading coefficient has to be divided out.
    """
    ring = value.ring
    svar = ring.index(OPERATOR_SYMBOL)
    if value.is_zero():
        one = RatFunc(ring.one)
        return TransferEntry(OperatorPoly([]), OperatorPoly([one]), value)
    den_parts = value.den.coeffs_in(svar)
    lead = RatFunc(den_parts[max(den_parts)])
    inv = lead.inverse()
    num = OperatorPoly.from_multipoly(value.num, svar, scale=inv)
    den = OperatorPoly.from_multipoly(value.den, svar, scale=inv)
    return TransferEntry(num, den, value)


def transfer_matrix(model: LinearModel | CompartmentModel) -> TransferMatrix:
    """Transfer-function matrix via the adjugate of ``L(sI - A)``."""
    lm = as_linear(model)
    ring = lm.ring
    mat, lcm = characteristic_matrix(lm)
    det = RatFunc(bareiss_det(mat))
    L = RatFunc(lcm)
    n = lm.n
    adj_cache: dict = {}

    def adj(i, k):
        # adj(P)[i][k] = (-1)^(i+k) det of P without row k and column i
        if (i, k) not in adj_cache:
            d = bareiss_det(minor(mat, k, i)) if n > 1 else ring.one
            adj_cache[i, k] = RatFunc(d if (i + k) % 2 == 0 else -d)
        return adj_cache[i, k]

    zero = RatFunc(ring.zero)
    rows = []
    for r in range(lm.m):
        row = []
        for j in range(lm.kappa):
            acc = zero
            for i in range(n):
                if lm.C[r][i].is_zero():
                    continue
                for k in range(n):
                    if lm.B[k][j].is_zero():
                        continue
                    acc = acc + lm.C[r][i] * adj(i, k) * lm.B[k][j]
            value = acc * L / det + lm.D[r][j]
            row.append(entry_from_ratfunc(value))
        rows.append(tuple(row))
    return TransferMatrix(tuple(rows), OFFSET_CAVEAT if lm.has_offsets() else None)


def transfer_coefficients(h: TransferMatrix | Sequence[Sequence[TransferEntry]]) -> list[RatFunc]:
    """Numerator and denominator coefficients of all entries, without rational constants or repeats."""
    rows = h.entries if isinstance(h, TransferMatrix) else h
    out, seen = [], set()
    for row in rows:
        for e in row:
            if e.is_zero():
                continue
            for c in e.num.coeffs + e.den.coeffs:
                if c.is_constant() or c in seen:
                    continue
                seen.add(c)
                out.append(c)
    return out
