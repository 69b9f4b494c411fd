"""Multivariate polynomial gcd over the rationals.

Subresultant remainder sequences on a main variable, after removing common
monomial factors and contents in that variable.  Before running a remainder
sequence the main variable is tested by specialising the other variables and reducing modulo a
prime: if the image gcd is constant in the main variable, the true gcd is too
(provided the leading coefficients survive), so the sequence is skipped.  When
this holds for every variable the gcd is an integer and no contents are taken.
The shortcut is never wrong; it only avoids work.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd as igcd
from operator import add, sub

from .poly import MultiPoly, grlex_key

_SHORTCUT_PRIME = (1 << 61) - 1
_SHORTCUT_POINTS = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Greatest common divisor, primitive over the integers with positive leading coefficient.

    ``poly_gcd(0, 0)`` is zero.
    """
    if a.ring != b.ring:
        raise ValueError("gcd of polynomials from different rings")
    if a.is_zero() and b.is_zero():
        return a.ring.zero
    if a.is_zero():
        return b.primitive()[1]
    if b.is_zero():
        return a.primitive()[1]
    if a.is_constant() or b.is_constant():
        return a.ring.one
    _, pa = a.primitive()
    _, pb = b.primitive()
    if pa == pb:
        return pa
    terms = _gcd(pa.terms, pb.terms, a.ring.nvars)
    g = MultiPoly(a.ring, terms)
    return g.primitive()[1]


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero() or b.is_zero():
        return a.ring.zero
    g = poly_gcd(a, b)
    return (a * b.exact_div(g)).primitive()[1]


# -- integer-coefficient dict representation ----------------------------------
# Polynomials below are plain dicts {exp: int}.  All helpers keep the full
# exponent arity so no re-packing is needed between recursion levels.


def _vars_of(p: dict) -> list[int]:
    if not p:
        return []
    n = len(next(iter(p)))
    return [i for i in range(n) if any(e[i] for e in p)]


def _int_content(p: dict) -> int:
    return reduce(igcd, p.values(), 0)


def _is_const(p: dict) -> bool:
    return all(not any(e) for e in p)


def _const_dict(c: int, n: int) -> dict:
    return {(0,) * n: c} if c else {}


def _mul(a: dict, b: dict) -> dict:
    res: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple([x + y for x, y in zip(e1, e2)])
            v = res.get(e, 0) + c1 * c2
            if v:
                res[e] = v
            else:
                del res[e]
    return res


def _sub(a: dict, b: dict) -> dict:
    res = dict(a)
    for e, c in b.items():
        v = res.get(e, 0) - c
        if v:
            res[e] = v
        else:
            res.pop(e, None)
    return res


def _exact_div(a: dict, b: dict) -> dict:
    """Exact quotient of integer polynomials (assumed divisible)."""
    if not a:
        return {}
    le, lc = max(b.items())
    rest = [(e, c) for e, c in b.items() if e != le]
    rem = dict(a)
    quo = {}
    while rem:
        e = max(rem)
        c = rem.pop(e)
        q, r = divmod(c, lc)
        if r or any(x < y for x, y in zip(e, le)):
            raise ArithmeticError("inexact division in gcd kernel")
        qe = tuple([x - y for x, y in zip(e, le)])
        quo[qe] = q
        for oe, oc in rest:
            t = tuple([x + y for x, y in zip(qe, oe)])
            v = rem.get(t, 0) - q * oc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return quo


def _shift_all(p: dict, m: tuple) -> dict:
    return {tuple(map(sub, e, m)): c for e, c in p.items()}


def _split(p: dict, v: int) -> dict[int, dict]:
    out: dict[int, dict] = {}
    for e, c in p.items():
        out.setdefault(e[v], {})[e[:v] + (0,) + e[v + 1:]] = c
    return out


def _shift(p: dict, v: int, k: int) -> dict:
    if not k:
        return p
    return {e[:v] + (e[v] + k,) + e[v + 1:]: c for e, c in p.items()}


def _content_in(p: dict, v: int, n: int) -> dict:
    coeffs = sorted(_split(p, v).values(), key=len)
    g = coeffs[0]
    for c in coeffs[1:]:
        if _is_const(g) and abs(next(iter(g.values()))) == 1:
            break
        g = _gcd(g, c, n)
    return _normalize_sign(g)


def _normalize_sign(p: dict) -> dict:
    if not p:
        return p
    e = max(p, key=grlex_key)
    if p[e] < 0:
        return {k: -c for k, c in p.items()}
    return p


def _prem(a: dict, b: dict, v: int) -> dict:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b with respect to variable v."""
    bs = _split(b, v)
    db = max(bs)
    lcb = bs[db]
    rb = {k: c for k, c in bs.items() if k != db}
    r = a
    steps = max(e[v] for e in a) - db + 1
    while r and steps > 0:
        rs = _split(r, v)
        dr = max(rs)
        if dr < db:
            break
        lcr = rs[dr]
        # r <- lcb * (r - lcr x^dr) - lcr * x^(dr-db) * (b - lcb x^db)
        tail = {}
        for k, c in rs.items():
            if k != dr:
                tail.update(_shift(c, v, k))
        new = _mul(lcb, tail)
        shift = dr - db
        for k, c in rb.items():
            new = _sub(new, _shift(_mul(lcr, c), v, k + shift))
        r = new
        steps -= 1
    for _ in range(steps):
        r = _mul(lcb, r)
    return r


def _lead_in(p: dict, v: int) -> dict:
    s = _split(p, v)
    return s[max(s)]


def _power(p: dict, k: int, n: int) -> dict:
    out = _const_dict(1, n)
    for _ in range(k):
        out = _mul(out, p)
    return out


def _monomial_factor(p: dict) -> tuple:
    return tuple(min(col) for col in zip(*p))


def _eval_mod(p: dict, v: int, point: dict[int, int], prime: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for e, c in p.items():
        t = c % prime
        for i, k in enumerate(e):
            if k and i != v:
                t = t * pow(point[i], k, prime) % prime
        if t:
            out[e[v]] = (out.get(e[v], 0) + t) % prime
    return {k: c for k, c in out.items() if c}


def _uni_gcd_degree(a: dict[int, int], b: dict[int, int], prime: int) -> int:
    def trim(p):
        return {k: c for k, c in p.items() if c % prime}

    a, b = trim(a), trim(b)
    while b:
        db = max(b)
        inv = pow(b[db], -1, prime)
        r = dict(a)
        while r and max(r) >= db:
            dr = max(r)
            q = r[dr] * inv % prime
            for k, c in b.items():
                kk = k + dr - db
                r[kk] = (r.get(kk, 0) - q * c) % prime
            r = trim(r)
        a, b = b, r
    return max(a) if a else -1


def _coprime_in(a: dict, b: dict, v: int, others: list[int]) -> bool:
    """True when gcd(a, b) certainly has degree 0 in v."""
    da = max(e[v] for e in a)
    db = max(e[v] for e in b)
    for shift in range(3):
        point = {i: _SHORTCUT_POINTS[(j + 3 * shift) % len(_SHORTCUT_POINTS)] + shift
                 for j, i in enumerate(others)}
        ia = _eval_mod(a, v, point, _SHORTCUT_PRIME)
        ib = _eval_mod(b, v, point, _SHORTCUT_PRIME)
        if not ia or not ib or max(ia) != da or max(ib) != db:
            continue
        return _uni_gcd_degree(ia, ib, _SHORTCUT_PRIME) == 0
    return False


def _gcd(a: dict, b: dict, n: int) -> dict:
    if not a:
        return _normalize_sign(b)
    if not b:
        return _normalize_sign(a)
    if _is_const(a) or _is_const(b):
        return _const_dict(igcd(_int_content(a), _int_content(b)), n)
    ma, mb = _monomial_factor(a), _monomial_factor(b)
    if any(ma) or any(mb):
        common_factor = tuple(map(min, ma, mb))
        inner = _gcd(_shift_all(a, ma), _shift_all(b, mb), n)
        return {tuple(map(add, e, common_factor)): c for e, c in inner.items()}
    va, vb = set(_vars_of(a)), set(_vars_of(b))
    only_a = va - vb
    if only_a:
        return _gcd(_content_in(a, min(only_a), n), b, n)
    only_b = vb - va
    if only_b:
        return _gcd(a, _content_in(b, min(only_b), n), n)
    common = sorted(va, key=lambda i: max(max(e[i] for e in a), max(e[i] for e in b)))
    if all(_coprime_in(a, b, i, [j for j in common if j != i]) for i in common):
        return _const_dict(igcd(_int_content(a), _int_content(b)), n)
    v = common[0]
    ca = _content_in(a, v, n)
    cb = _content_in(b, v, n)
    cont = _gcd(ca, cb, n)
    pa = _exact_div(a, ca)
    pb = _exact_div(b, cb)
    others = [i for i in common if i != v]
    if _coprime_in(pa, pb, v, others):
        return cont
    if max(e[v] for e in pa) < max(e[v] for e in pb):
        pa, pb = pb, pa
    # subresultant remainder sequence: exact divisions keep coefficients small
    g = h = _const_dict(1, n)
    while True:
        d = max(e[v] for e in pa) - max(e[v] for e in pb)
        r = _prem(pa, pb, v)
        if not r:
            break
        if not any(e[v] for e in r):
            # the sequence ended in a nonzero v-free element: primitive parts coprime
            return cont
        pa, pb = pb, _exact_div(r, _mul(g, _power(h, d, n)))
        g = _lead_in(pa, v)
        if d == 1:
            h = g
        elif d > 1:
            h = _exact_div(_power(g, d, n), _power(h, d - 1, n))
    res = _exact_div(pb, _content_in(pb, v, n))
    return _mul(_normalize_sign(res), cont)


def rational_gcd_content(values) -> Fraction:
    """gcd of rationals, i.e. gcd of numerators over lcm of denominators."""
    g, l = 0, 1
    for c in values:
        c = Fraction(c)
        g = igcd(g, c.numerator)
        l = l * c.denominator // igcd(l, c.denominator)
    return Fraction(g, l)
