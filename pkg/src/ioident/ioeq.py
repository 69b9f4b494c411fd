"""Input-output equations of linear models.

Two constructions are provided:

* :func:`full_io_equations` eliminates the states by linear algebra over the
  parameter field.  Every derivative of an output is an affine form in the
  states and the input derivatives; a linear relation among output
  derivatives exists exactly when their state rows are linearly dependent.
* :func:`cramer_io_equations` uses the characteristic polynomial and the
  minors of ``sI - A`` of a compartment model.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .algebra import OPERATOR_SYMBOL, MultiPoly, NonGenericPointError, RatFunc, bareiss_det, minor, solve_linear
from .algebra.ratfunc import format_ratfunc
from .model import CompartmentModel, LinearModel, as_linear
from .series import TruncatedSeries, default_order, random_input, simulate


class Monomial(NamedTuple):
    """A derivative ``y_index^(order)``/``u_index^(order)``, or the constant (kind ``"1"``)."""

    kind: str
    index: int = 0
    order: int = 0

    def sort_key(self):
        return ({"y": 0, "u": 1, "1": 2}[self.kind], -self.order, self.index)

    def format(self, y_names: Sequence[str], u_names: Sequence[str]) -> str:
        if self.kind == "1":
            return "1"
        base = (y_names if self.kind == "y" else u_names)[self.index]
        if self.order <= 3:
            return base + "'" * self.order
        return f"{base}^({self.order})"


CONSTANT = Monomial("1")


@dataclass(frozen=True)
class IOEquation:
    """Linear differential relation, monic in the highest derivative of one output.

    The leading monomial ``y_output^(order)`` has coefficient 1 and is not
    stored in ``coeffs``.
    """

    output: int
    order: int
    coeffs: tuple  # ((Monomial, RatFunc), ...) in canonical order, no zeros

    @classmethod
    def build(cls, output: int, order: int, coeffs: dict) -> "IOEquation":
        lead = Monomial("y", output, order)
        items = [(m, c) for m, c in coeffs.items() if not c.is_zero() and m != lead]
        items.sort(key=lambda mc: mc[0].sort_key())
        return cls(output, order, tuple(items))

    @property
    def leading(self) -> Monomial:
        return Monomial("y", self.output, self.order)

    def coefficient(self, mono: Monomial):
        if mono == self.leading:
            return 1
        for m, c in self.coeffs:
            if m == mono:
                return c
        return None

    def monomials(self) -> list[Monomial]:
        return [self.leading] + [m for m, _ in self.coeffs]

    def order_in(self, output: int) -> int | None:
        """Highest derivative order of an output, ``None`` when it does not occur."""
        orders = [m.order for m in self.monomials() if m.kind == "y" and m.index == output]
        return max(orders) if orders else None

    def max_order(self) -> int:
        return max(m.order for m in self.monomials())

    def format(self, y_names: Sequence[str], u_names: Sequence[str]) -> str:
        out = [self.leading.format(y_names, u_names)]
        for m, c in self.coeffs:
            mono = m.format(y_names, u_names)
            neg = False
            if c.is_constant():
                v = c.constant_value()
                neg = v < 0
                mag = abs(v)
                cs = "" if (mag == 1 and m.kind != "1") else (str(mag) if m.kind == "1" else f"{mag}*")
                body = cs + ("" if m.kind == "1" else mono)
            else:
                single = c.is_polynomial() and len(c.num.terms) == 1
                if single and c.num.leading_coefficient() < 0:
                    neg, c = True, -c
                cs = format_ratfunc(c) if single else f"({format_ratfunc(c)})"
                body = cs if m.kind == "1" else f"{cs}*{mono}"
            out.append((" - " if neg else " + ") + body)
        return "".join(out)


# -- derivative tower -----------------------------------------------------


@dataclass(frozen=True)
class TowerLevel:
    """``y^(k) = row . x + sum(inputs[m] * m)``."""

    row: tuple
    inputs: dict


def derivative_tower(model: LinearModel, output: int, depth: int) -> list[TowerLevel]:
    """Affine forms of ``y_output, y_output', ..., y_output^(depth)``."""
    zero = RatFunc(model.ring.zero)
    n, k = model.n, model.kappa
    row = tuple(model.C[output])
    inp = {Monomial("u", j, 0): model.D[output][j] for j in range(k)}
    inp[CONSTANT] = model.g0[output]
    inp = {m: c for m, c in inp.items() if not c.is_zero()}
    levels = [TowerLevel(row, inp)]
    for _ in range(depth):
        nxt_row = tuple(_dot(row, [model.A[i][j] for i in range(n)], zero) for j in range(n))
        nxt = {}
        for m, c in inp.items():
            if m.kind == "u":
                nxt[Monomial("u", m.index, m.order + 1)] = c
        for j in range(k):
            c = _dot(row, [model.B[i][j] for i in range(n)], zero)
            if not c.is_zero():
                mono = Monomial("u", j, 0)
                nxt[mono] = nxt.get(mono, zero) + c
        c = _dot(row, model.f0, zero)
        if not c.is_zero():
            nxt[CONSTANT] = c
        row, inp = nxt_row, {m: c for m, c in nxt.items() if not c.is_zero()}
        levels.append(TowerLevel(row, inp))
    return levels


def _dot(a, b, zero):
    acc = zero
    for x, y in zip(a, b):
        if not x.is_zero() and not y.is_zero():
            acc = acc + x * y
    return acc


def full_io_equations(model: LinearModel | CompartmentModel, ordering: Sequence[int] | None = None) -> list[IOEquation]:
    """The unique full set of input-output equations for an output ordering.

    ``ordering`` lists 0-based output indices from smallest to largest; the
    default is declaration order.  Equations are returned in that order.
    """
    model = as_linear(model)
    ordering = list(range(model.m)) if ordering is None else list(ordering)
    if sorted(ordering) != list(range(model.m)):
        raise ValueError(f"ordering {ordering} is not a permutation of the outputs")
    zero = RatFunc(model.ring.zero)
    basis: list[tuple[Monomial, TowerLevel]] = []
    equations = []
    for out in ordering:
        tower = derivative_tower(model, out, model.n)
        for k, level in enumerate(tower):
            alpha = _express(basis, level.row, zero)
            if alpha is not None:
                coeffs: dict = {}
                for (mono, lv), a in zip(basis, alpha):
                    if a.is_zero():
                        continue
                    coeffs[mono] = coeffs.get(mono, zero) - a
                    for m, c in lv.inputs.items():
                        coeffs[m] = coeffs.get(m, zero) + a * c
                for m, c in level.inputs.items():
                    coeffs[m] = coeffs.get(m, zero) - c
                equations.append(IOEquation.build(out, k, coeffs))
                break
            basis.append((Monomial("y", out, k), level))
        else:  # pragma: no cover - the state space has dimension n
            raise AssertionError("no relation found within n derivatives")
    _check_triangular(equations, ordering)
    return equations


def _express(basis, target_row, zero):
    """Coefficients writing ``target_row`` in terms of basis rows, or None."""
    if not basis:
        return [] if all(x.is_zero() for x in target_row) else None
    n = len(target_row)
    mat = [[lv.row[i] for _, lv in basis] for i in range(n)]
    return solve_linear(mat, list(target_row))


def _check_triangular(equations: list[IOEquation], ordering: Sequence[int]) -> None:
    for l, eq in enumerate(equations):
        for j in range(l):
            prev = equations[j]
            o = eq.order_in(ordering[j])
            if o is not None and o >= prev.order:
                raise AssertionError("full set of input-output equations is not triangular")


# -- Cramer-rule equations ------------------------------------------------


def characteristic_matrix(model: LinearModel) -> tuple[list[list[MultiPoly]], MultiPoly]:
    """Polynomial matrix ``L*(sI - A)`` with ``L`` the lcm of the denominators of ``A``."""
    from .algebra import poly_lcm

    ring = model.ring
    lcm = ring.one
    for row in model.A:
        for x in row:
            if not x.den.is_constant() and x.den != lcm:
                lcm = poly_lcm(lcm, x.den)
    s = ring.gen(OPERATOR_SYMBOL)
    mat = []
    for i, row in enumerate(model.A):
        mat.append([(s * lcm if i == j else ring.zero) - x.num * lcm.exact_div(x.den) for j, x in enumerate(row)])
    return mat, lcm


def _det(mat, ring) -> MultiPoly:
    return ring.one if not mat else bareiss_det(mat)


def cramer_io_equations(cm: CompartmentModel) -> list[IOEquation]:
    """One relation per output from the characteristic polynomial and minors of ``sI - A``.

    For output vertex i with scaling c_i and input vertices j with scalings b_j::

        det(sI - A)(y_i) - c_i * sum_j (-1)^(i+j) det(M_ji)(b_j u_j) = 0

    where M_ji deletes row j and column i of ``sI - A``.  Since
    ``y_i = c_i x_i``, the output scaling multiplies the input side; dividing
    by it instead gives a relation that trajectories do not satisfy unless
    ``c_i = 1``.
    """
    lm = as_linear(cm)
    ring = lm.ring
    svar = ring.index(OPERATOR_SYMBOL)
    mat, _ = characteristic_matrix(lm)  # compartment matrices are polynomial
    charpoly = _det(mat, ring)
    char_coeffs = charpoly.coeffs_in(svar)
    equations = []
    for r, (i, c_i) in enumerate(cm.outputs):
        coeffs: dict = {}
        for k, c in char_coeffs.items():
            if k < cm.n:
                coeffs[Monomial("y", r, k)] = RatFunc(c)
        for col, (j, b_j) in enumerate(cm.inputs):
            cof = _det(minor(mat, j - 1, i - 1), ring)
            scale = b_j * c_i * (-1 if (i + j) % 2 == 0 else 1)
            for k, c in cof.coeffs_in(svar).items():
                coeffs[Monomial("u", col, k)] = RatFunc(c) * scale
        equations.append(IOEquation.build(r, cm.n, coeffs))
    return equations


# -- coefficient extraction and verification --------------------------------


def coefficients(eqs: Sequence[IOEquation]) -> list[RatFunc]:
    """Non-leading coefficients of all equations, without rational constants or repeats."""
    out, seen = [], set()
    for eq in eqs:
        for _, c in eq.coeffs:
            if c.is_constant() or c in seen:
                continue
            seen.add(c)
            out.append(c)
    return out


def sign_normalized(values: Sequence[RatFunc]) -> list[RatFunc]:
    out, seen = [], set()
    for v in values:
        v = v.sign_normalized()
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def monomial_series(traj, mono: Monomial, order: int) -> TruncatedSeries:
    if mono.kind == "1":
        return TruncatedSeries.constant(1, order)
    src = traj.outputs if mono.kind == "y" else traj.inputs
    return src[mono.index].derivative(mono.order).truncate(order)


def equation_residual(traj, eq: IOEquation, params: Sequence) -> TruncatedSeries:
    keep = traj.order - eq.max_order()
    point = list(params) + [0]
    total = monomial_series(traj, eq.leading, keep)
    for m, c in eq.coeffs:
        total = total + monomial_series(traj, m, keep).scale(c.evaluate(point))
    return total


def random_instance(model: LinearModel, rng: random.Random):
    params = [Fraction(rng.randint(1, 60), rng.randint(1, 7)) for _ in model.params]
    x0 = [rng.randint(-20, 20) for _ in model.states]
    return params, x0


def verify_equation(model: LinearModel | CompartmentModel, eq: IOEquation, trials: int = 3,
                    rng: random.Random | None = None, order: int | None = None, max_retries: int = 20) -> bool:
    """Check that ``eq`` vanishes on random trajectories of ``model``."""
    model = as_linear(model)
    rng = rng or random.Random(0)
    order = max(order or default_order(model), eq.max_order() + 2)
    done = retries = 0
    while done < trials:
        params, x0 = random_instance(model, rng)
        inputs = [random_input(rng, order) for _ in model.inputs]
        try:
            traj = simulate(model, params, x0, inputs, order)
            residual = equation_residual(traj, eq, params)
        except NonGenericPointError:
            retries += 1
            if retries > max_retries:
                raise
            continue
        if not residual.is_zero():
            return False
        done += 1
    return True
