"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial lives in a :class:`PolyRing`, which fixes the symbol order.  Terms
are stored as ``{exponent_tuple: coefficient}`` with coefficients kept as
``int`` when integral and :class:`fractions.Fraction` otherwise.  Zero
coefficients are never stored.

Terms are ordered graded-lexicographically: higher total degree first, ties
broken lexicographically on the exponent tuple, so the first declared symbol is
the most significant and the last one (the operator symbol ``s`` by convention)
the least.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd as igcd
from numbers import Rational
from operator import add, sub
from typing import Iterable, Mapping, Sequence

OPERATOR_SYMBOL = "s"


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def grlex_key(exp: tuple) -> tuple:
    return (sum(exp), exp)


class PolyRing:
    """Symbol table shared by a family of polynomials."""

    __slots__ = ("symbols", "nvars", "_index", "_zero_exp")

    def __init__(self, symbols: Iterable[str]):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in {self.symbols}")
        self.nvars = len(self.symbols)
        self._index = {name: i for i, name in enumerate(self.symbols)}
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"PolyRing({list(self.symbols)})"

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    @property
    def one(self) -> "MultiPoly":
        return MultiPoly(self, {self._zero_exp: 1})

    def const(self, c) -> "MultiPoly":
        return MultiPoly(self, {self._zero_exp: c})

    def gen(self, name: str) -> "MultiPoly":
        i = self._index[name]
        exp = tuple(1 if k == i else 0 for k in range(self.nvars))
        return MultiPoly(self, {exp: 1})

    def monomial(self, exp: Sequence[int], coeff=1) -> "MultiPoly":
        return MultiPoly(self, {tuple(exp): coeff})


class MultiPoly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("ring", "terms", "_hash", "_lead")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, object] | None = None, *, _clean=False):
        self.ring = ring
        if _clean:
            self.terms = terms
        else:
            self.terms = {}
            for exp, c in (terms or {}).items():
                if c:
                    if len(exp) != ring.nvars:
                        raise ValueError(f"exponent {exp} does not match ring arity {ring.nvars}")
                    self.terms[tuple(exp)] = _norm(c)
        self._hash = None
        self._lead = None

    # -- basic predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_value(self):
        """Return the rational value of a constant polynomial."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(self.ring._zero_exp, 0)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("polynomials belong to different rings")
            return other
        if isinstance(other, (int, Rational)):
            return self.ring.const(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = res.get(e, 0) + c
            if v:
                res[e] = _norm(v)
            else:
                res.pop(e, None)
        return MultiPoly(self.ring, res, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self.ring.zero
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        res: dict = {}
        get = res.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(add, e1, e2))
                v = get(e, 0) + c1 * c2
                if v:
                    res[e] = v
                else:
                    del res[e]
        return MultiPoly(self.ring, {e: c if type(c) is int else _norm(c) for e, c in res.items()}, _clean=True)

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        if not c:
            return self.ring.zero
        if c == 1:
            return self
        return MultiPoly(self.ring, {e: _norm(v * c) for e, v in self.terms.items()}, _clean=True)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact division; raises ``ArithmeticError`` otherwise."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            return self.scale(Fraction(1) / Fraction(other.constant_value()))
        q, r = self._divide_lex(other)
        if r.terms:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def _divide_lex(self, other: "MultiPoly"):
        # Stops at the first lex-leading term that is not divisible, so the
        # returned remainder is zero exactly when `other` divides `self`.
        le, lc = max(other.terms.items())
        rem = dict(self.terms)
        quo: dict = {}
        rest = [(e, c) for e, c in other.terms.items() if e != le]
        # max-heap of exponents; entries whose term has cancelled are skipped
        heap = [tuple(-x for x in e) for e in rem]
        heapq.heapify(heap)
        while heap:
            e = tuple(-x for x in heapq.heappop(heap))
            if e not in rem:
                continue
            if any(x < y for x, y in zip(e, le)):
                break
            c = rem[e]
            qe = tuple(map(sub, e, le))
            if isinstance(c, int) and isinstance(lc, int) and c % lc == 0:
                qc = c // lc
            else:
                qc = _norm(Fraction(c) / lc)
            quo[qe] = qc
            del rem[e]
            for oe, oc in rest:
                t = tuple(map(add, qe, oe))
                old = rem.get(t)
                v = (old or 0) - qc * oc
                if v:
                    if old is None:
                        heapq.heappush(heap, tuple(-x for x in t))
                    rem[t] = _norm(v)
                else:
                    rem.pop(t, None)
        return MultiPoly(self.ring, quo, _clean=True), MultiPoly(self.ring, rem, _clean=True)

    # -- structure ----------------------------------------------------------
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    def leading_term(self):
        """(exponent, coefficient) of the grlex-largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if self._lead is None:
            e = max(self.terms, key=grlex_key)
            self._lead = (e, self.terms[e])
        return self._lead

    def leading_coefficient(self):
        return self.leading_term()[1]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def coeffs_in(self, var: int) -> dict[int, "MultiPoly"]:
        """Coefficients with respect to one variable, as polynomials in the rest."""
        groups: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[var]
            groups.setdefault(k, {})[e[:var] + (0,) + e[var + 1:]] = c
        return {k: MultiPoly(self.ring, t, _clean=True) for k, t in groups.items()}

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return Fraction(0)
        g = 0
        lcm = 1
        for c in self.terms.values():
            c = Fraction(c)
            g = igcd(g, c.numerator)
            lcm = lcm * c.denominator // igcd(lcm, c.denominator)
        return Fraction(g, lcm)

    def primitive(self):
        """Split into (content, integer primitive part with positive leading coefficient)."""
        if not self.terms:
            return Fraction(0), self
        cont = self.content()
        if self.leading_coefficient() < 0:
            cont = -cont
        return cont, self.scale(1 / cont)

    def diff(self, var: int) -> "MultiPoly":
        res = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                res[e[:var] + (k - 1,) + e[var + 1:]] = _norm(c * k)
        return MultiPoly(self.ring, res, _clean=True)

    def evaluate(self, values: Sequence) -> Fraction:
        """Exact value at a rational point (one value per ring symbol)."""
        total = Fraction(0)
        for e, c in self.terms.items():
            t = Fraction(c)
            for v, k in zip(values, e):
                if k:
                    t *= Fraction(v) ** k
            total += t
        return _norm(total)

    def subs(self, assignment: Mapping[int, object]) -> "MultiPoly":
        """Substitute rational values for some variables (by index)."""
        res: dict = {}
        for e, c in self.terms.items():
            t = Fraction(c)
            ne = list(e)
            for i, v in assignment.items():
                if e[i]:
                    t *= Fraction(v) ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            val = res.get(ne, 0) + t
            if val:
                res[ne] = val
            else:
                res.pop(ne, None)
        return MultiPoly(self.ring, res)

    def change_ring(self, ring: PolyRing) -> "MultiPoly":
        """Re-express in a ring whose symbols are a superset of this one's."""
        idx = [ring.index(name) for name in self.ring.symbols]
        res = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in zip(idx, e):
                ne[i] = k
            res[tuple(ne)] = c
        return MultiPoly(ring, res, _clean=True)

    # -- printing -----------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r})"


def _format_coeff_abs(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_monomial(symbols, exp) -> str:
    parts = []
    for name, k in zip(symbols, exp):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: MultiPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        mono = _format_monomial(p.ring.symbols, e)
        mag = _format_coeff_abs(abs(c))
        if not mono:
            body = mag
        elif mag == "1":
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
