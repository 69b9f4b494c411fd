"""Evaluation and linear algebra over prime fields, for randomized zero tests."""
from __future__ import annotations

import random
from typing import Sequence

from .poly import MultiPoly
from .ratfunc import RatFunc


class UnluckyPrimeError(ArithmeticError):
    """The prime divides a denominator met during evaluation; retry with another."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3e24
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, bits: int = 62) -> int:
    while True:
        n = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_prime(n):
            return n


def _coeff_mod(c, prime: int) -> int:
    if isinstance(c, int):
        return c % prime
    den = c.denominator % prime
    if den == 0:
        raise UnluckyPrimeError(f"prime {prime} divides coefficient denominator {c.denominator}")
    return c.numerator * pow(den, -1, prime) % prime


def eval_mod_prime(p: MultiPoly, point: Sequence[int], prime: int) -> int:
    """Value of ``p`` at ``point`` in the field with ``prime`` elements."""
    if len(point) != p.ring.nvars:
        raise ValueError(f"point has {len(point)} entries, ring has {p.ring.nvars} symbols")
    total = 0
    for e, c in p.terms.items():
        t = _coeff_mod(c, prime)
        for v, k in zip(point, e):
            if k:
                t = t * pow(v, k, prime) % prime
        total += t
    return total % prime


def eval_ratfunc_mod(r: RatFunc, point: Sequence[int], prime: int) -> int:
    d = eval_mod_prime(r.den, point, prime)
    if d == 0:
        raise UnluckyPrimeError("denominator vanishes at the evaluation point")
    return eval_mod_prime(r.num, point, prime) * pow(d, -1, prime) % prime


def gradient_mod(r: RatFunc, point: Sequence[int], prime: int, variables: Sequence[int]) -> list[int]:
    """Partial derivatives of ``r`` at ``point`` modulo ``prime``."""
    n = eval_mod_prime(r.num, point, prime)
    d = eval_mod_prime(r.den, point, prime)
    if d == 0:
        raise UnluckyPrimeError("denominator vanishes at the evaluation point")
    inv_d2 = pow(d * d % prime, -1, prime)
    out = []
    for v in variables:
        dn = eval_mod_prime(r.num.diff(v), point, prime)
        dd = eval_mod_prime(r.den.diff(v), point, prime)
        out.append((dn * d - n * dd) * inv_d2 % prime)
    return out


def rank_mod(rows: Sequence[Sequence[int]], prime: int) -> int:
    m = [[x % prime for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, prime)
        for r in range(rank + 1, len(m)):
            f = m[r][c] * inv % prime
            if f:
                m[r] = [(x - f * y) % prime for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank
