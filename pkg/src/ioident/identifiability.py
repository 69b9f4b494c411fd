"""Identifiability analysis: theorem gates, solvability diagnostics and randomized field tests.

Field membership is tested locally: ``h`` is declared dependent on a set of
generators when adding ``h`` does not raise the rank of their Jacobian with
respect to the parameters.  This is algebraic dependence over the rationals,
i.e. membership in the algebraic closure of the generated field, and not
membership in the field itself.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import OPERATOR_SYMBOL, NonGenericPointError, PolyRing, RatFunc, UnluckyPrimeError, random_prime
from .algebra.modular import gradient_mod, rank_mod
from .algebra.ratfunc import format_ratfunc
from .dsl import parse_expression
from .graph import ConditionReport, condition_report
from .ioeq import (IOEquation, coefficients, cramer_io_equations, full_io_equations, monomial_series,
                   random_instance)
from .model import CompartmentModel, LinearModel, as_linear
from .series import default_order, jet_rank, random_input, simulate
from .transfer import TransferMatrix, transfer_coefficients, transfer_matrix

DEPENDENT = "Dependent"
INDEPENDENT = "Independent"
SOLVABLE = "Solvable"
RANK_DEFICIENT = "RankDeficient"
PROVEN = "IdentifiableFieldProven"
IO_ONLY = "IOFieldOnly"
METHODS = ("elimination", "cramer", "transfer")

MEMBERSHIP_SEMANTICS = "local/algebraic dependence"
SOLVABILITY_CAVEAT = "probabilistic, one-sided"
RELATION_ONLY = "relation only, not a full set"


class PrimeLog:
    """Random source for the field tests that records every prime it draws."""

    def __init__(self, rng: random.Random | None = None, bits: int = 62):
        self.rng = rng or random.Random(0)
        self.bits = bits
        self.primes: list[int] = []

    def prime(self) -> int:
        p = random_prime(self.rng, self.bits)
        self.primes.append(p)
        return p

    def point(self, nvars: int, prime: int) -> list[int]:
        return [self.rng.randrange(prime) for _ in range(nvars)]


def _as_source(rng) -> PrimeLog:
    if isinstance(rng, PrimeLog):
        return rng
    return PrimeLog(rng)


def _common_ring(*groups: Sequence[RatFunc]) -> PolyRing | None:
    ring = None
    for g in groups:
        for r in g:
            if ring is None:
                ring = r.ring
            elif r.ring != ring:
                raise ValueError("functions belong to different parameter rings")
    return ring


def _param_vars(ring: PolyRing) -> list[int]:
    return [i for i, name in enumerate(ring.symbols) if name != OPERATOR_SYMBOL]


def _max_degree(fs: Sequence[RatFunc]) -> int:
    return max((f.num.total_degree() + f.den.total_degree() for f in fs), default=0)


def jacobian_ranks(groups: Sequence[Sequence[RatFunc]], trials: int = 3, primes: int = 3,
                   rng=None) -> list[int]:
    """Generic Jacobian rank of each group, as the maximum over random points and primes.

    A rank computed at one point never exceeds the generic rank, so the
    maximum over several points is the generic rank unless every point is
    unlucky.
    """
    src = _as_source(rng)
    ring = _common_ring(*groups)
    if ring is None:
        return [0 for _ in groups]
    variables = _param_vars(ring)
    best = [0] * len(groups)
    for _ in range(primes):
        p = src.prime()
        done = 0
        while done < trials:
            pt = src.point(ring.nvars, p)
            try:
                grads = {}
                for g in groups:
                    for f in g:
                        if f not in grads:
                            grads[f] = gradient_mod(f, pt, p, variables)
            except UnluckyPrimeError:
                continue
            for k, g in enumerate(groups):
                best[k] = max(best[k], rank_mod([grads[f] for f in g], p))
            done += 1
    return best


def failure_bound(fs: Sequence[RatFunc], samples: int, prime_bits: int = 62) -> float:
    """Schwartz-Zippel estimate of the chance that every sample underestimates a rank."""
    deg = max(1, 2 * len(fs) * max(1, _max_degree(fs)))
    per_sample = min(1.0, deg / 2 ** (prime_bits - 1))
    return per_sample ** samples


def jacobian_membership(h: RatFunc, generators: Sequence[RatFunc], trials: int = 3, primes: int = 3,
                        rng=None) -> str:
    """``Dependent`` when ``h`` is algebraically dependent on ``generators``, else ``Independent``."""
    gens = list(generators)
    r_g, r_gh = jacobian_ranks([gens, gens + [h]], trials, primes, rng)
    return DEPENDENT if r_gh == r_g else INDEPENDENT


def field_equivalence(gens1: Sequence[RatFunc], gens2: Sequence[RatFunc], trials: int = 3, primes: int = 3,
                      rng=None) -> bool:
    """Both sets have the same algebraic closure (every element of each is dependent on the other)."""
    g1, g2 = list(gens1), list(gens2)
    r1, r2, r12 = jacobian_ranks([g1, g2, g1 + g2], trials, primes, rng)
    return r1 == r12 and r2 == r12


# -- solvability -----------------------------------------------------------


@dataclass(frozen=True)
class SolvabilityResult:
    verdict: str
    trials: int
    nonzero_trials: int

    @property
    def caveat(self) -> str | None:
        return SOLVABILITY_CAVEAT if self.verdict == RANK_DEFICIENT else None


def solvability_diagnostic(model: LinearModel | CompartmentModel, eq: IOEquation, trials: int = 5,
                           rng: random.Random | None = None, order: int | None = None,
                           max_retries: int = 20) -> SolvabilityResult:
    """Wronskian test on the non-leading monomials of ``eq`` along random trajectories.

    The Wronskian is nonzero iff the monomial jets are linearly independent,
    which is decided by an exact rank of their Taylor coefficients.
    """
    model = as_linear(model)
    rng = rng or random.Random(0)
    monos = [m for m, _ in eq.coeffs]
    k = len(monos)
    need = eq.max_order() + k + 2
    order = max(order or default_order(model), need)
    keep = order - eq.max_order()
    nonzero = done = retries = 0
    while done < trials:
        params, x0 = random_instance(model, rng)
        inputs = [random_input(rng, order) for _ in model.inputs]
        try:
            traj = simulate(model, params, x0, inputs, order)
        except NonGenericPointError:
            retries += 1
            if retries > max_retries:
                raise
            continue
        if jet_rank([monomial_series(traj, m, keep) for m in monos]) == k:
            nonzero += 1
        done += 1
    return SolvabilityResult(SOLVABLE if nonzero else RANK_DEFICIENT, trials, nonzero)


# -- output-preserving transformations ---------------------------------------


def witness_transformation(model: LinearModel, substitutions: Mapping[str, str], trials: int = 5,
                           rng: random.Random | None = None, order: int | None = None,
                           extra_symbol: str = "k", max_retries: int = 20) -> bool:
    """Check that a substitution of parameters and states leaves the outputs unchanged.

    ``substitutions`` maps parameter or state names to expressions in the
    parameters, the states and ``extra_symbol``.  Symbols not mapped are left
    alone.  State substitutions act on initial values; states inside
    parameter substitutions are evaluated at the initial state.
    """
    model = as_linear(model)
    rng = rng or random.Random(0)
    if extra_symbol in model.params or extra_symbol in model.states:
        raise ValueError(f"symbol {extra_symbol!r} already names a parameter or state")
    for name in substitutions:
        if name not in model.params and name not in model.states:
            raise ValueError(f"{name!r} is neither a parameter nor a state")
    ring = PolyRing(tuple(model.params) + tuple(model.states) + (extra_symbol,))
    maps = {name: parse_expression(expr, ring) for name, expr in substitutions.items()}
    order = order or default_order(model)
    done = retries = 0
    while done < trials:
        params, x0 = random_instance(model, rng)
        kval = Fraction(rng.randint(1, 50), rng.randint(1, 7))
        point = list(params) + list(x0) + [kval]
        inputs = [random_input(rng, order) for _ in model.inputs]
        try:
            new_params = [maps[p].evaluate(point) if p in maps else v for p, v in zip(model.params, params)]
            new_x0 = [maps[x].evaluate(point) if x in maps else v for x, v in zip(model.states, x0)]
            before = simulate(model, params, x0, inputs, order)
            after = simulate(model, new_params, new_x0, inputs, order)
        except NonGenericPointError:
            retries += 1
            if retries > max_retries:
                raise
            continue
        if before.outputs != after.outputs:
            return False
        done += 1
    return True


# -- orchestration -----------------------------------------------------------


@dataclass
class EquationDiagnostic:
    source: str
    equation: IOEquation
    solvability: SolvabilityResult


@dataclass
class IdentifiabilityReport:
    model: LinearModel | CompartmentModel
    conditions: ConditionReport
    method: str
    generators: list
    status: str
    equations: dict  # method -> list of IOEquation
    transfer: TransferMatrix | None
    generator_sets: dict  # method -> list of RatFunc
    labels: dict  # method -> note on what the generators mean
    agreement: dict  # "m1~m2" -> bool
    diagnostics: list[EquationDiagnostic]
    seed: int
    primes: list[int]
    failure_bound: float
    ordering: list[int]
    caveats: list[str] = field(default_factory=list)


def _gate(conditions: ConditionReport, method: str) -> bool:
    if method == "elimination":
        return conditions.elimination_gate
    return conditions.cramer_gate


def analyze(model: LinearModel | CompartmentModel, ordering: Sequence[int] | None = None,
            method: str = "auto", seed: int = 0, trials: int = 3, primes: int = 3,
            solvability_trials: int = 5, series_order: int | None = None) -> IdentifiabilityReport:
    """Compute IO equations, pick generators per the strongest applicable gate, and diagnose.

    ``method`` is one of ``auto``, ``all``, ``elimination``, ``cramer`` or
    ``transfer``.  ``auto`` and ``all`` report elimination coefficients, which
    carry a gate whenever the Cramer/transfer gate holds; ``all`` also
    computes and cross-checks the other constructions.
    """
    if method not in ("auto", "all") + METHODS:
        raise ValueError(f"unknown method {method!r}")
    is_cm = isinstance(model, CompartmentModel)
    if method == "cramer" and not is_cm:
        raise ValueError("the Cramer-rule construction needs a compartment model")
    conditions = condition_report(model)
    lm = as_linear(model)
    ordering = list(range(lm.m)) if ordering is None else list(ordering)
    rng = random.Random(seed)
    primelog = PrimeLog(random.Random(rng.getrandbits(64)))
    diag_rng = random.Random(rng.getrandbits(64))

    wanted = {"elimination"}
    if method == "all":
        wanted |= {"transfer"} | ({"cramer"} if is_cm else set())
    elif method != "auto":
        wanted.add(method)

    equations, gensets, labels = {}, {}, {}
    equations["elimination"] = full_io_equations(lm, ordering)
    gensets["elimination"] = coefficients(equations["elimination"])
    labels["elimination"] = "full set of input-output equations"
    if "cramer" in wanted:
        equations["cramer"] = cramer_io_equations(model)
        gensets["cramer"] = coefficients(equations["cramer"])
        labels["cramer"] = "Cramer-rule equations" if conditions.cramer_gate else RELATION_ONLY
    tm = None
    caveats = []
    if "transfer" in wanted:
        tm = transfer_matrix(lm)
        gensets["transfer"] = transfer_coefficients(tm)
        labels["transfer"] = ("transfer-function coefficients" if conditions.cramer_gate
                              else "transfer-function coefficients, no gate")
        if tm.caveat:
            caveats.append(tm.caveat)

    chosen = "elimination" if method in ("auto", "all") else method
    status = PROVEN if _gate(conditions, chosen) else IO_ONLY

    agreement = {}
    others = [m for m in METHODS if m in gensets and m != "elimination"]
    for m in others:
        agreement[f"elimination~{m}"] = field_equivalence(gensets["elimination"], gensets[m], trials, primes,
                                                          primelog)
    if "cramer" in gensets and "transfer" in gensets:
        agreement["cramer~transfer"] = field_equivalence(gensets["cramer"], gensets["transfer"], trials, primes,
                                                         primelog)

    diagnostics = []
    for src in [m for m in ("elimination", "cramer") if m in equations]:
        for eq in equations[src]:
            res = solvability_diagnostic(lm, eq, solvability_trials, diag_rng, series_order)
            diagnostics.append(EquationDiagnostic(src, eq, res))
    if any(d.solvability.verdict == RANK_DEFICIENT for d in diagnostics if d.source == chosen):
        caveats.append("a solvability check failed: equation coefficients cannot all be recovered from data")

    all_funcs = [f for g in gensets.values() for f in g]
    samples = trials * primes
    return IdentifiabilityReport(
        model=model, conditions=conditions, method=chosen, generators=gensets[chosen], status=status,
        equations=equations, transfer=tm, generator_sets=gensets, labels=labels, agreement=agreement,
        diagnostics=diagnostics, seed=seed, primes=list(primelog.primes),
        failure_bound=failure_bound(all_funcs, samples) if primelog.primes else 0.0, ordering=ordering, caveats=caveats)


def format_generators(gens: Sequence[RatFunc]) -> list[str]:
    return [format_ratfunc(g) for g in gens]
