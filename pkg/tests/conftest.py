import random
from pathlib import Path

import pytest
import sympy

from ioident.algebra import MultiPoly, PolyRing, RatFunc
from ioident.dsl import load_model, parse_expression, parse_model

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"


def model(name):
    return load_model(MODELS / f"{name}.model")


def expr(m, text):
    return parse_expression(text, m.ring)


def exprs(m, texts):
    return [parse_expression(t, m.ring) for t in texts]


def to_sympy(p, syms=None):
    """MultiPoly or RatFunc as a sympy expression, for oracle comparisons."""
    if isinstance(p, RatFunc):
        return to_sympy(p.num, syms) / to_sympy(p.den, syms)
    syms = syms or sympy.symbols(p.ring.symbols)
    total = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator) if hasattr(c, "denominator") else sympy.Integer(c)
        for s, k in zip(syms, e):
            term *= s ** k
        total += term
    return sympy.expand(total)


def random_poly(rng, ring, nterms=4, degree=3, bound=5):
    terms = {}
    for _ in range(nterms):
        e = [0] * ring.nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(ring.nvars)] += 1
        terms[tuple(e)] = rng.randint(-bound, bound)
    return MultiPoly(ring, terms)


# -- random models -------------------------------------------------------------


def random_compartment_text(rng, n, strongly=False, inputs=1, outputs=1, leaks=None, name="rnd"):
    edges = set()
    if strongly and n > 1:
        cyc = list(range(1, n + 1))
        rng.shuffle(cyc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges.add((a, b))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(1, n + 1), 2) if n > 1 else (1, 1)
        if a != b:
            edges.add((a, b))
    if leaks is None:
        leaks = rng.randint(0, min(2, n))
    lines = [f"compartment {name}", f"vertices {n}"]
    lines += [f"edge {a} -> {b}" for a, b in sorted(edges)]
    lines += [f"leak {v}" for v in sorted(rng.sample(range(1, n + 1), leaks))]
    lines += [f"input {v}" for v in sorted(rng.sample(range(1, n + 1), min(inputs, n)))]
    lines += [f"output {v}" for v in sorted(rng.sample(range(1, n + 1), min(outputs, n)))]
    return "\n".join(lines) + "\n"


def random_compartment(rng, n, **kw):
    return parse_model(random_compartment_text(rng, n, **kw))


def _random_coeff(rng, params, zero_prob=0.45):
    r = rng.random()
    if r < zero_prob:
        return None
    if r < zero_prob + 0.2:
        return str(rng.choice([-3, -2, -1, 1, 2, 3]))
    p = rng.choice(params)
    c = rng.choice([1, 1, -1, 2])
    return p if c == 1 else f"{c}*{p}"


def random_system_text(rng, n, m, kappa, nparams=3, offsets=True, name="rnd"):
    params = [f"p{i}" for i in range(1, nparams + 1)]
    states = [f"x{i}" for i in range(1, n + 1)]
    ins = [f"u{i}" for i in range(1, kappa + 1)]
    lines = [f"system {name}", "params " + " ".join(params), "states " + " ".join(states)]
    if ins:
        lines.append("inputs " + " ".join(ins))

    def rhs(symbols, force=None, constant=False):
        terms = []
        for s in symbols:
            c = _random_coeff(rng, params)
            if c is not None:
                terms.append(f"({c})*{s}")
        if force and not terms:
            terms.append(f"{force}")
        if constant and rng.random() < 0.3:
            terms.append(f"({_random_coeff(rng, params, 0.0)})")
        return " + ".join(terms) or "0"

    for x in states:
        lines.append(f"eq {x}' = {rhs(states + ins, constant=offsets)}")
    for j in range(1, m + 1):
        lines.append(f"out y{j} = {rhs(states, force=rng.choice(states))}")
    return "\n".join(lines) + "\n"


def random_system(rng, n, m, kappa, **kw):
    return parse_model(random_system_text(rng, n, m, kappa, **kw))


@pytest.fixture
def rng():
    return random.Random(20240611)


# -- acceptance summary ----------------------------------------------------------

CRITERIA: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(k.split("(")[0]), k)):
        ok, title = CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {title}")
