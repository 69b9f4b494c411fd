import random

import pytest
import sympy

from ioident.algebra import RatFunc
from ioident.dsl import parse_model
from ioident.ioeq import (CONSTANT, IOEquation, Monomial, coefficients, cramer_io_equations, derivative_tower,
                          full_io_equations, sign_normalized, verify_equation)
from ioident.model import as_linear

from conftest import expr, exprs, model, random_system, to_sympy


def y(i, k):
    return Monomial("y", i, k)


def u(i, k):
    return Monomial("u", i, k)


def eq_of(m, output, order, table):
    return IOEquation.build(output, order, {mono: expr(m, text) for mono, text in table.items()})


def two_compartment_eq(m):
    return eq_of(m, 0, 2, {y(0, 1): "a01 + a12 + a21", y(0, 0): "a01*a12", u(0, 0): "-a21"})


def test_two_compartment_elimination():
    m = model("example1")
    (eq,) = full_io_equations(m)
    assert eq == two_compartment_eq(m)
    assert eq.format(["y2"], ["u1"]) == "y2'' + (a01 + a12 + a21)*y2' + a01*a12*y2 - a21*u1"


def test_two_compartment_cramer():
    m = model("example1")
    assert cramer_io_equations(m) == [two_compartment_eq(m)]


def test_decay_full_set_with_reversed_ordering():
    m = model("decay")
    p1, p2 = full_io_equations(m, [1, 0])
    assert p1 == IOEquation.build(1, 1, {})
    assert p2 == eq_of(m, 0, 1, {y(0, 0): "a", y(1, 0): "c", CONSTANT: "-b*c"})
    assert p2.format(["y1", "y2"], []) == "y1' + a*y1 + c*y2 - b*c"


def test_decay_declaration_ordering():
    m = model("decay")
    p1, p2 = full_io_equations(m)
    assert p1.order == 2 and p1.output == 0
    assert p2.order_in(0) is not None and p2.order_in(0) < p1.order
    for eq in (p1, p2):
        assert verify_equation(m, eq)


def test_chain_outputs():
    m1, m3 = model("chain_out1"), model("chain_out3")
    assert full_io_equations(m1) == [eq_of(m1, 0, 1, {y(0, 0): "a31", u(0, 0): "-1"})]
    assert full_io_equations(m3) == [eq_of(m3, 0, 3, {
        y(0, 2): "a31 + a32", y(0, 1): "a31*a32", u(0, 0): "-a31*a32", u(0, 1): "-a31"})]


def test_cramer_is_non_minimal_off_the_gate():
    m = model("chain_out1")
    (eq,) = cramer_io_equations(m)
    expected = eq_of(m, 0, 3, {y(0, 2): "a31 + a32", y(0, 1): "a31*a32", u(0, 2): "-1", u(0, 1): "-a32"})
    assert eq == expected
    assert verify_equation(m, eq)


def test_one_compartment_cramer():
    m = parse_model("compartment one\nvertices 1\nleak 1\ninput 1\noutput 1\n")
    assert cramer_io_equations(m) == [eq_of(m, 0, 1, {y(0, 0): "a01", u(0, 0): "-1"})]


def test_scalings_enter_cramer_equations():
    m = parse_model("compartment sc\nparams b c\nvertices 2\nedge 1 -> 2\nedge 2 -> 1\nleak 2\n"
                    "input 1 scale b\noutput 2 scale c\n")
    (cr,) = cramer_io_equations(m)
    (el,) = full_io_equations(m)
    assert cr == el
    assert cr.coefficient(u(0, 0)) == expr(m, "-a21*b*c")
    assert verify_equation(m, cr)
    divided = eq_of(m, 0, 2, {y(0, 1): "a21 + a12 + a02", y(0, 0): "a21*a02", u(0, 0): "-a21*b/c"})
    assert not verify_equation(m, divided)


def test_lead_model_against_characteristic_polynomial():
    m = model("lead")
    lm = as_linear(m)
    (eq,) = full_io_equations(m)
    syms = sympy.symbols(lm.ring.symbols)
    A = sympy.Matrix([[to_sympy(x, syms) for x in row] for row in lm.A])
    f0 = sympy.Matrix([to_sympy(x, syms) for x in lm.f0])
    lam = sympy.Symbol("lam")
    cp = sympy.Poly(A.charpoly(lam).as_expr(), lam)
    assert eq.order == 3
    for k in range(3):
        assert sympy.expand(to_sympy(eq.coefficient(y(0, k)), syms) - cp.coeff_monomial(lam ** k)) == 0
    const = -(((-A).adjugate() * f0)[0])
    assert sympy.expand(to_sympy(eq.coefficient(CONSTANT), syms) - const) == 0
    assert eq.coefficient(y(0, 2)) == expr(m, "-k1 + k3 - k6")


def test_coefficients_sets():
    m = model("example1")
    assert coefficients([two_compartment_eq(m)]) == exprs(m, ["a01 + a12 + a21", "a01*a12", "-a21"])
    d = model("decay")
    assert coefficients(full_io_equations(d, [1, 0])) == exprs(d, ["a", "c", "-b*c"])
    assert coefficients([IOEquation.build(0, 1, {})]) == []


def test_coefficients_drop_constants_and_repeats():
    m = model("example1")
    eq = eq_of(m, 0, 2, {y(0, 1): "3", y(0, 0): "a21", u(0, 0): "a21"})
    assert coefficients([eq, eq]) == [expr(m, "a21")]


def test_sign_normalization():
    m = model("example1")
    assert sign_normalized(exprs(m, ["-a21", "a21", "-a01 + a12"])) == exprs(m, ["a21", "a01 - a12"])


def test_verify_equation_detects_wrong_coefficient():
    m = model("example1")
    good = two_compartment_eq(m)
    bad = eq_of(m, 0, 2, {y(0, 1): "a01 + a12 + a21", y(0, 0): "a01", u(0, 0): "-a21"})
    assert verify_equation(m, good)
    assert not verify_equation(m, bad)


def test_derivative_tower_recurrence():
    lm = as_linear(model("example1"))
    tower = derivative_tower(lm, 0, 3)
    for lo, hi in zip(tower, tower[1:]):
        for j in range(lm.n):
            acc = sum((lo.row[i] * lm.A[i][j] for i in range(lm.n)), RatFunc(lm.ring.zero))
            assert hi.row[j] == acc
    assert u(0, 1) in tower[3].inputs and u(0, 0) in tower[3].inputs


def test_ordering_is_validated():
    with pytest.raises(ValueError):
        full_io_equations(model("decay"), [0, 0])


def test_runs_are_deterministic():
    m = model("bromosulfophthalein")
    assert full_io_equations(m) == full_io_equations(m)
    assert full_io_equations(m, [1, 0]) == full_io_equations(m, [1, 0])


def test_full_sets_are_triangular_within_budget_and_verified():
    rng = random.Random(21)
    for _ in range(25):
        m = random_system(rng, rng.randint(1, 3), 2, rng.randint(0, 1))
        for ordering in ([0, 1], [1, 0]):
            eqs = full_io_equations(m, ordering)
            assert sum(eq.order for eq in eqs) <= m.n
            for l, eq in enumerate(eqs):
                assert eq.output == ordering[l]
                for j in range(l):
                    o = eq.order_in(ordering[j])
                    assert o is None or o < eqs[j].order
                assert verify_equation(m, eq, trials=2, rng=rng)
