"""Line-oriented model description language.

Two block kinds are understood::

    system decay                  compartment example1
    params a b c                  params a01 a12 a21
    states x w                    vertices 2
    inputs                        edge 1 -> 2
    eq x' = -a*x + b - w          edge 2 -> 1 rate a12
    eq w' = 0                     leak 1
    out y1 = c*x                  input 1
    out y2 = w                    output 2 scale 1

``#`` starts a comment.  Right-hand sides of ``eq``/``out`` must be affine in
the states and inputs, with coefficients rational in the parameters.  Edge
and leak rates default to ``a<target><source>`` and ``a0<vertex>`` and are
declared as parameters implicitly.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .algebra import RatFunc
from .algebra.ratfunc import format_ratfunc
from .model import CompartmentModel, LinearModel, ModelError, make_ring


class ModelParseError(ValueError):
    pass


class ModelSyntaxError(ModelParseError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ModelSemanticError(ModelParseError):
    def __init__(self, message: str, symbol: str | None = None, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.symbol = symbol
        self.line = line


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|[-+*/^()=',]))"
)


class _Tokens:
    def __init__(self, text: str, lineno: int):
        self.line = lineno
        self.items = []  # (kind, value, col)
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ModelSyntaxError(f"unexpected character {text[col - 1]!r}", lineno, col)
            kind = m.lastgroup
            self.items.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0
        self.end_col = len(text) + 1

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, self.end_col)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def at_end(self):
        return self.i >= len(self.items)

    def expect(self, kind, value=None):
        k, v, col = self.next()
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            got = v if v is not None else "end of line"
            raise ModelSyntaxError(f"expected {want!r}, found {got!r}", self.line, col)
        return v, col

    def accept(self, kind, value=None):
        k, v, _ = self.peek()
        if k == kind and (value is None or v == value):
            self.i += 1
            return True
        return False

    def finish(self):
        if not self.at_end():
            _, v, col = self.peek()
            raise ModelSyntaxError(f"unexpected {v!r}", self.line, col)


class _Affine:
    """Affine form: {None: constant, symbol: coefficient}."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = {k: v for k, v in parts.items() if not v.is_zero()}

    def is_constant(self):
        return all(k is None for k in self.parts)

    def const(self, ring):
        return self.parts.get(None, RatFunc(ring.zero))


class _ExprParser:
    def __init__(self, toks: _Tokens, ring, variables: Iterable[str]):
        self.t = toks
        self.ring = ring
        self.variables = set(variables)
        self.zero = RatFunc(ring.zero)

    def _add(self, a: _Affine, b: _Affine, sign=1) -> _Affine:
        out = dict(a.parts)
        for k, v in b.parts.items():
            out[k] = out.get(k, self.zero) + (v if sign > 0 else -v)
        return _Affine(out)

    def _nonlinear(self, col):
        raise ModelSemanticError(
            f"column {col}: term is not affine in the states and inputs (degree > 1)", line=self.t.line)

    def expr(self) -> _Affine:
        a = self.term()
        while True:
            k, v, _ = self.t.peek()
            if k == "op" and v in "+-":
                self.t.next()
                a = self._add(a, self.term(), 1 if v == "+" else -1)
            else:
                return a

    def term(self) -> _Affine:
        a = self.unary()
        while True:
            k, v, col = self.t.peek()
            if k == "op" and v in "*/":
                self.t.next()
                b = self.unary()
                if v == "*":
                    if not a.is_constant() and not b.is_constant():
                        self._nonlinear(col)
                    if a.is_constant():
                        a, b = b, a
                    c = b.const(self.ring)
                    a = _Affine({s: x * c for s, x in a.parts.items()})
                else:
                    if not b.is_constant():
                        self._nonlinear(col)
                    c = b.const(self.ring)
                    if c.is_zero():
                        raise ModelSemanticError(f"column {col}: division by zero", line=self.t.line)
                    a = _Affine({s: x / c for s, x in a.parts.items()})
            else:
                return a

    def unary(self) -> _Affine:
        k, v, _ = self.t.peek()
        if k == "op" and v in "+-":
            self.t.next()
            a = self.unary()
            return a if v == "+" else _Affine({s: -x for s, x in a.parts.items()})
        return self.power()

    def power(self) -> _Affine:
        base = self.atom()
        k, v, col = self.t.peek()
        if k == "op" and v == "^":
            self.t.next()
            neg = self.t.accept("op", "-")
            e, ecol = self.t.expect("num")
            if "." in e:
                raise ModelSyntaxError("exponent must be an integer", self.t.line, ecol)
            e = -int(e) if neg else int(e)
            if not base.is_constant():
                if e == 1:
                    return base
                self._nonlinear(col)
            c = base.const(self.ring)
            if e < 0 and c.is_zero():
                raise ModelSemanticError(f"column {col}: zero raised to a negative power", line=self.t.line)
            return _Affine({None: c ** e})
        return base

    def atom(self) -> _Affine:
        k, v, col = self.t.next()
        if k == "num":
            return _Affine({None: RatFunc.const(self.ring, Fraction(v))})
        if k == "id":
            if v in self.variables:
                return _Affine({v: RatFunc.const(self.ring, 1)})
            if v in self.ring and v != "s":
                return _Affine({None: RatFunc.gen(self.ring, v)})
            raise ModelSemanticError(f"column {col}: undeclared symbol {v!r}", symbol=v, line=self.t.line)
        if k == "op" and v == "(":
            a = self.expr()
            self.t.expect("op", ")")
            return a
        got = v if v is not None else "end of line"
        raise ModelSyntaxError(f"unexpected {got!r} in expression", self.t.line, col)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def _ident_list(toks: _Tokens) -> list[tuple[str, int]]:
    out = []
    while not toks.at_end():
        toks.accept("op", ",")
        if toks.at_end():
            break
        name, col = toks.expect("id")
        out.append((name, col))
    return out


def parse_model(text: str) -> LinearModel | CompartmentModel:
    """Parse and validate a model document."""
    lines = list(_lines(text))
    if not lines:
        raise ModelSyntaxError("empty document", 1, 1)
    lineno, body = lines[0]
    toks = _Tokens(body, lineno)
    kind, col = toks.expect("id")
    if kind not in ("system", "compartment"):
        raise ModelSyntaxError("document must start with 'system <name>' or 'compartment <name>'", lineno, col)
    name, _ = toks.expect("id")
    toks.finish()
    try:
        if kind == "system":
            return _parse_system(name, lines[1:])
        return _parse_compartment(name, lines[1:])
    except ModelError as exc:
        raise ModelSemanticError(str(exc)) from exc


def _declare(names, seen, lineno):
    out = []
    for name, col in names:
        if name in seen:
            raise ModelSemanticError(f"column {col}: symbol {name!r} declared twice", symbol=name, line=lineno)
        if name == "s":
            raise ModelSemanticError(f"column {col}: 's' is reserved for the differential operator",
                                     symbol=name, line=lineno)
        seen.add(name)
        out.append(name)
    return out


def _parse_system(name, lines) -> LinearModel:
    params: list[str] = []
    states: list[str] | None = None
    inputs: list[str] = []
    seen: set[str] = set()
    eqs: list[tuple[int, _Tokens, str, int]] = []
    outs: list[tuple[int, _Tokens, str, int]] = []
    for lineno, body in lines:
        toks = _Tokens(body, lineno)
        kw, col = toks.expect("id")
        if kw == "params":
            params += _declare(_ident_list(toks), seen, lineno)
        elif kw == "states":
            if states is not None:
                raise ModelSemanticError("states declared twice", line=lineno)
            states = _declare(_ident_list(toks), seen, lineno)
        elif kw == "inputs":
            inputs += _declare(_ident_list(toks), seen, lineno)
        elif kw == "eq":
            target, tcol = toks.expect("id")
            toks.expect("op", "'")
            toks.expect("op", "=")
            eqs.append((lineno, toks, target, tcol))
        elif kw == "out":
            target, tcol = toks.expect("id")
            toks.expect("op", "=")
            outs.append((lineno, toks, target, tcol))
        else:
            raise ModelSyntaxError(f"unknown keyword {kw!r} in system block", lineno, col)
    if not states:
        raise ModelSemanticError("a system needs a non-empty 'states' declaration")
    ring = make_ring(params)
    variables = set(states) | set(inputs)
    zero = RatFunc(ring.zero)
    rows: dict[str, _Affine] = {}
    for lineno, toks, target, tcol in eqs:
        if target not in states:
            raise ModelSemanticError(f"column {tcol}: {target!r} is not a declared state", symbol=target, line=lineno)
        if target in rows:
            raise ModelSemanticError(f"column {tcol}: second equation for {target!r}", symbol=target, line=lineno)
        rows[target] = _ExprParser(toks, ring, variables).expr()
        toks.finish()
    missing = [x for x in states if x not in rows]
    if missing:
        raise ModelSemanticError(f"no equation for state {missing[0]!r}", symbol=missing[0])
    out_rows: list[tuple[str, _Affine]] = []
    for lineno, toks, target, tcol in outs:
        if target in seen or target in (o for o, _ in out_rows):
            raise ModelSemanticError(f"column {tcol}: output name {target!r} already used", symbol=target, line=lineno)
        out_rows.append((target, _ExprParser(toks, ring, variables).expr()))
        toks.finish()

    def split(aff: _Affine):
        return ([aff.parts.get(x, zero) for x in states], [aff.parts.get(u, zero) for u in inputs],
                aff.parts.get(None, zero))

    A, B, f0 = [], [], []
    for x in states:
        a, b, c = split(rows[x])
        A.append(tuple(a))
        B.append(tuple(b))
        f0.append(c)
    C, D, g0 = [], [], []
    for _, aff in out_rows:
        c, d, g = split(aff)
        C.append(tuple(c))
        D.append(tuple(d))
        g0.append(g)
    return LinearModel(name=name, params=tuple(params), states=tuple(states),
                       outputs=tuple(o for o, _ in out_rows), inputs=tuple(inputs),
                       A=tuple(A), B=tuple(B), C=tuple(C), D=tuple(D), f0=tuple(f0), g0=tuple(g0), ring=ring)


def default_rate(target: int, source: int) -> str:
    if target >= 10 or source >= 10:
        return f"a{target}_{source}"
    return f"a{target}{source}"


def _parse_compartment(name, lines) -> CompartmentModel:
    params: list[str] = []
    seen: set[str] = set()
    n = None
    edges, leaks = [], []
    scaled = []  # (kind, vertex, tokens or None, lineno)

    def vertex(toks):
        v, col = toks.expect("num")
        if "." in v:
            raise ModelSyntaxError("vertex index must be an integer", toks.line, col)
        v = int(v)
        if n is None:
            raise ModelSemanticError("'vertices' must come before edges, leaks, inputs and outputs", line=toks.line)
        if not 1 <= v <= n:
            raise ModelSemanticError(f"column {col}: vertex {v} outside 1..{n}", line=toks.line)
        return v

    def rate(toks, default):
        if toks.accept("id", "rate"):
            r, col = toks.expect("id")
        else:
            r, col = default, None
        if r == "s":
            raise ModelSemanticError("'s' is reserved for the differential operator", symbol=r, line=toks.line)
        if r not in seen:
            seen.add(r)
            params.append(r)
        toks.finish()
        return r

    for lineno, body in lines:
        toks = _Tokens(body, lineno)
        kw, col = toks.expect("id")
        if kw == "params":
            params += _declare(_ident_list(toks), seen, lineno)
        elif kw == "vertices":
            if n is not None:
                raise ModelSemanticError("vertices declared twice", line=lineno)
            v, vcol = toks.expect("num")
            if "." in v:
                raise ModelSyntaxError("vertex count must be an integer", lineno, vcol)
            n = int(v)
            if n < 1:
                raise ModelSemanticError("a compartment model needs at least one vertex (empty state list)",
                                         line=lineno)
            toks.finish()
        elif kw == "edge":
            i = vertex(toks)
            toks.expect("op", "->")
            j = vertex(toks)
            edges.append((i, j, rate(toks, default_rate(j, i))))
        elif kw == "leak":
            i = vertex(toks)
            leaks.append((i, rate(toks, default_rate(0, i))))
        elif kw in ("input", "output"):
            i = vertex(toks)
            if toks.accept("id", "scale"):
                scaled.append((kw, i, toks, lineno))
            else:
                toks.finish()
                scaled.append((kw, i, None, lineno))
        else:
            raise ModelSyntaxError(f"unknown keyword {kw!r} in compartment block", lineno, col)
    if n is None:
        raise ModelSemanticError("compartment block needs 'vertices <n>' (empty state list)")
    ring = make_ring(params)
    inputs, outputs = [], []
    for kw, i, toks, lineno in scaled:
        if toks is None:
            scale = RatFunc.const(ring, 1)
        else:
            aff = _ExprParser(toks, ring, ()).expr()
            toks.finish()
            scale = aff.const(ring)
        if scale.is_zero():
            raise ModelSemanticError(f"{kw} scaling at vertex {i} is zero", line=lineno)
        (inputs if kw == "input" else outputs).append((i, scale))
    return CompartmentModel(name=name, n=n, params=tuple(params), edges=tuple(edges), leaks=tuple(leaks),
                            inputs=tuple(inputs), outputs=tuple(outputs), ring=ring)


def _paren(r: RatFunc) -> str:
    s = format_ratfunc(r)
    if r.is_polynomial() and len(r.num.terms) == 1:
        return s
    return f"({s})"


def format_affine(coeffs: Iterable[tuple[str | None, RatFunc]]) -> str:
    parts = []
    for sym, c in coeffs:
        if c.is_zero():
            continue
        if sym is None:
            body = format_ratfunc(c)
            if not (c.is_polynomial() and len(c.num.terms) == 1):
                body = f"({body})"
        elif c == 1:
            body = sym
        elif c == -1:
            body = f"-{sym}"
        else:
            body = f"{_paren(c)}*{sym}"
        if not parts:
            parts.append(body)
        elif body.startswith("-"):
            parts.append(f" - {body[1:]}")
        else:
            parts.append(f" + {body}")
    return "".join(parts) or "0"


def format_model(model: LinearModel | CompartmentModel) -> str:
    """Canonical source text; ``parse_model`` reads it back to an equal model."""
    if isinstance(model, CompartmentModel):
        lines = [f"compartment {model.name}"]
        if model.params:
            lines.append("params " + " ".join(model.params))
        lines.append(f"vertices {model.n}")
        for i, j, r in model.edges:
            lines.append(f"edge {i} -> {j} rate {r}")
        for i, r in model.leaks:
            lines.append(f"leak {i} rate {r}")
        for kw, items in (("input", model.inputs), ("output", model.outputs)):
            for i, scale in items:
                lines.append(f"{kw} {i}" if scale == 1 else f"{kw} {i} scale {format_ratfunc(scale)}")
        return "\n".join(lines) + "\n"
    lines = [f"system {model.name}"]
    if model.params:
        lines.append("params " + " ".join(model.params))
    lines.append("states " + " ".join(model.states))
    if model.inputs:
        lines.append("inputs " + " ".join(model.inputs))
    for r, x in enumerate(model.states):
        terms = list(zip(model.states, model.A[r])) + list(zip(model.inputs, model.B[r])) + [(None, model.f0[r])]
        lines.append(f"eq {x}' = {format_affine(terms)}")
    for r, y in enumerate(model.outputs):
        terms = list(zip(model.states, model.C[r])) + list(zip(model.inputs, model.D[r])) + [(None, model.g0[r])]
        lines.append(f"out {y} = {format_affine(terms)}")
    return "\n".join(lines) + "\n"


def parse_expression(text: str, ring) -> RatFunc:
    """Rational expression in the symbols of ``ring`` (the operator symbol excluded)."""
    toks = _Tokens(text, 1)
    aff = _ExprParser(toks, ring, ()).expr()
    toks.finish()
    return aff.const(ring)


def load_model(path) -> LinearModel | CompartmentModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
