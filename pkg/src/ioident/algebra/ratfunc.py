"""Reduced rational functions over the rationals, and operator polynomials."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .gcd import poly_gcd
from .poly import MultiPoly, PolyRing, format_poly


class NonGenericPointError(ArithmeticError):
    """A denominator vanishes at the requested evaluation point."""


class RatFunc:
    """Immutable quotient ``num/den`` kept in canonical form.

    ``num`` and ``den`` are coprime and the grlex-leading coefficient of
    ``den`` is 1, which makes the representation unique.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, _reduced=False):
        if den is None:
            den = num.ring.one
            _reduced = True
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @classmethod
    def const(cls, ring: PolyRing, c) -> "RatFunc":
        return cls(ring.const(c))

    @classmethod
    def gen(cls, ring: PolyRing, name: str) -> "RatFunc":
        return cls(ring.gen(name))

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return Fraction(self.num.constant_value()) / Fraction(self.den.constant_value())

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.ring != self.ring:
                raise ValueError("rational functions belong to different rings")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other)
        if isinstance(other, (int, Rational)):
            return RatFunc(self.ring.const(other))
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_constant():
                return RatFunc(self.num + other.num, self.den, _reduced=True)
            return RatFunc(self.num + other.num, self.den)
        # a polynomial plus a reduced fraction stays reduced (denominators are monic, so 1 when constant)
        if self.den.is_constant():
            return RatFunc(self.num * other.den + other.num, other.den, _reduced=True)
        if other.den.is_constant():
            return RatFunc(self.num + other.num * self.den, self.den, _reduced=True)
        g = poly_gcd(self.den, other.den)
        d1 = self.den.exact_div(g)
        d2 = other.den.exact_div(g)
        num = self.num * d2 + other.num * d1
        return RatFunc(num, d1 * other.den)

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
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFunc(self.ring.zero)
        if self.den.is_constant() and other.den.is_constant():
            return _poly_over_const(self.num * other.num, self.den * other.den)
        if self.is_constant():
            return other._scale(self.constant_value())
        if other.is_constant():
            return self._scale(other.constant_value())
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        num = self.num.exact_div(g1) * other.num.exact_div(g2)
        den = self.den.exact_div(g2) * other.den.exact_div(g1)
        return RatFunc(*_monic_den(num, den), _reduced=True)

    __rmul__ = __mul__

    def _scale(self, c) -> "RatFunc":
        if not c:
            return RatFunc(self.ring.zero)
        return RatFunc(self.num.scale(c), self.den, _reduced=True)

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(*_monic_den(self.den, self.num), _reduced=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, _reduced=True)

    # -- calculus and evaluation ---------------------------------------------
    def diff(self, var: int) -> "RatFunc":
        dn = self.num.diff(var)
        dd = self.den.diff(var)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: Sequence) -> Fraction:
        d = self.den.evaluate(values)
        if d == 0:
            raise NonGenericPointError(f"denominator {format_poly(self.den)} vanishes")
        return Fraction(self.num.evaluate(values)) / d

    def sign_normalized(self) -> "RatFunc":
        """Same function up to sign, with a positive leading numerator coefficient."""
        if self.is_zero() or self.num.leading_coefficient() > 0:
            return self
        return -self

    def change_ring(self, ring: PolyRing) -> "RatFunc":
        return RatFunc(self.num.change_ring(ring), self.den.change_ring(ring), _reduced=True)

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)!r})"


def _monic_den(num: MultiPoly, den: MultiPoly):
    lc = den.leading_coefficient()
    if lc != 1:
        inv = Fraction(1) / Fraction(lc)
        return num.scale(inv), den.scale(inv)
    return num, den


def _poly_over_const(num: MultiPoly, den: MultiPoly) -> RatFunc:
    c = Fraction(den.constant_value())
    return RatFunc(num.scale(1 / c), num.ring.one, _reduced=True)


def _reduce(num: MultiPoly, den: MultiPoly):
    if num.is_zero():
        return num, num.ring.one
    if den.is_constant():
        return num.scale(Fraction(1) / Fraction(den.constant_value())), num.ring.one
    # cheap trial division first; a polynomial quotient needs no gcd
    try:
        return num.exact_div(den), num.ring.one
    except ArithmeticError:
        pass
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = num.exact_div(g)
        den = den.exact_div(g)
    return _monic_den(num, den)


def _wrap(s: str, multi: bool) -> str:
    return f"({s})" if multi else s


def format_ratfunc(r: RatFunc) -> str:
    if r.den.is_constant():
        return format_poly(r.num)
    num = format_poly(r.num)
    den = format_poly(r.den)
    return f"{_wrap(num, len(r.num.terms) > 1 or num.startswith('-'))}/({den})"


class OperatorPoly:
    """Polynomial in the differentiation operator with rational-function coefficients.

    ``coeffs[k]`` multiplies the k-th derivative (equivalently ``s**k``).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[RatFunc]):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_multipoly(cls, p: MultiPoly, var: int, ring: PolyRing | None = None,
                       scale: RatFunc | None = None) -> "OperatorPoly":
        """Read off coefficients of powers of ``var``; optionally multiply each by ``scale``."""
        ring = ring or p.ring
        parts = p.coeffs_in(var)
        deg = max(parts, default=-1)
        out = []
        for k in range(deg + 1):
            c = RatFunc(parts[k]) if k in parts else RatFunc(ring.zero)
            if scale is not None:
                c = c * scale
            out.append(c)
        return cls(out)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> RatFunc:
        return self.coeffs[-1]

    def monic(self) -> "OperatorPoly":
        lc = self.leading()
        return OperatorPoly([c / lc for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, OperatorPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def format(self, var: str = "s") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            cs = format_ratfunc(c)
            neg = False
            if c.is_constant():
                val = c.constant_value()
                neg = val < 0
                cs = format_ratfunc(abs(val) * RatFunc(c.ring.one)) if neg else cs
                body = mono if (abs(val) == 1 and mono) else (f"{cs}*{mono}" if mono else cs)
            else:
                multi = len(c.num.terms) > 1 or not c.den.is_constant()
                if not multi and c.num.leading_coefficient() < 0:
                    neg = True
                    cs = format_ratfunc(-c)
                body = f"{_wrap(cs, multi)}*{mono}" if mono else cs
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.format()
