"""Command-line front end.

Exit codes: 0 on success, 1 for unreadable or invalid input (including bad
flags), 2 when an internal consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import __version__
from .algebra.ratfunc import format_ratfunc
from .dsl import load_model, parse_expression
from .graph import InvariantViolation, bfs_spanning_forest, condition_report
from .identifiability import (MEMBERSHIP_SEMANTICS, PrimeLog, analyze, failure_bound, jacobian_membership,
                              witness_transformation)
from .ioeq import IOEquation, coefficients, cramer_io_equations, full_io_equations, sign_normalized
from .model import CompartmentModel, as_linear
from .transfer import transfer_coefficients, transfer_matrix


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _strs(values) -> list[str]:
    return [format_ratfunc(v) for v in values]


def _model_info(model) -> dict:
    lm = as_linear(model)
    return {
        "name": model.name,
        "kind": "compartment" if isinstance(model, CompartmentModel) else "system",
        "params": list(lm.params),
        "states": list(lm.states),
        "outputs": list(lm.outputs),
        "inputs": list(lm.inputs),
    }


def _equation_json(eq: IOEquation, model) -> dict:
    lm = as_linear(model)
    names = (lm.outputs, lm.inputs)
    return {
        "output": lm.outputs[eq.output],
        "order": eq.order,
        "text": eq.format(*names),
        "leading": eq.leading.format(*names),
        "coefficients": [{"monomial": m.format(*names), "value": format_ratfunc(c)} for m, c in eq.coeffs],
    }


def _conditions_json(conditions) -> dict:
    out = conditions.as_dict()
    out["certificate"] = conditions.certificate
    out["elimination_gate"] = conditions.elimination_gate
    out["cramer_gate"] = conditions.cramer_gate
    return out


def _transfer_json(tm) -> dict:
    return {
        "entries": [[e.format() for e in row] for row in tm.entries],
        "coefficients": _strs(transfer_coefficients(tm)),
        "caveat": tm.caveat,
    }


def _parse_ordering(text: str | None, model) -> list[int] | None:
    if not text:
        return None
    names = list(as_linear(model).outputs)
    picked = [t.strip() for t in text.split(",") if t.strip()]
    order = []
    for t in picked:
        if t not in names:
            raise UsageError(f"--ordering names unknown output {t!r}; outputs are {', '.join(names)}")
        order.append(names.index(t))
    if sorted(order) != list(range(len(names))):
        raise UsageError("--ordering must list every output exactly once")
    return order


def _analysis(model, args):
    return analyze(model, ordering=_parse_ordering(args.ordering, model), method=args.method or "auto",
                   seed=args.seed, trials=args.trials, series_order=args.series_order)


def _report_json(model, rep) -> dict:
    lm = as_linear(model)
    return {
        "command": "analyze",
        "model": _model_info(model),
        "conditions": _conditions_json(rep.conditions),
        "ordering": [lm.outputs[i] for i in rep.ordering],
        "method": rep.method,
        "status": rep.status,
        "generators": _strs(rep.generators),
        "generators_sign_normalized": _strs(sign_normalized(rep.generators)),
        "generator_sets": {k: _strs(v) for k, v in rep.generator_sets.items()},
        "labels": dict(rep.labels),
        "agreement": dict(rep.agreement),
        "membership_semantics": MEMBERSHIP_SEMANTICS,
        "equations": {k: [_equation_json(e, model) for e in v] for k, v in rep.equations.items()},
        "transfer": _transfer_json(rep.transfer) if rep.transfer is not None else None,
        "diagnostics": [
            {
                "source": d.source,
                "equation": d.equation.format(lm.outputs, lm.inputs),
                "verdict": d.solvability.verdict,
                "trials": d.solvability.trials,
                "nonzero_trials": d.solvability.nonzero_trials,
                "caveat": d.solvability.caveat,
            }
            for d in rep.diagnostics
        ],
        "randomness": {"seed": rep.seed, "primes": rep.primes, "failure_bound": rep.failure_bound},
        "caveats": list(rep.caveats),
    }


# -- text rendering -----------------------------------------------------------


def _text_analyze(d: dict) -> list[str]:
    lines = [f"model: {d['model']['name']} ({d['model']['kind']})",
             f"certificate: {d['conditions']['certificate']}",
             f"ordering: {' < '.join(d['ordering'])}",
             f"method: {d['method']}",
             f"status: {d['status']}",
             "generators:"]
    lines += [f"  {g}" for g in d["generators"]]
    for src, eqs in d["equations"].items():
        lines.append(f"{src} equations ({d['labels'][src]}):")
        lines += [f"  {e['text']}" for e in eqs]
    if d["transfer"] is not None:
        lines += _text_transfer(d["transfer"])
    for k, v in d["agreement"].items():
        lines.append(f"field agreement {k}: {v} ({d['membership_semantics']})")
    lines.append("solvability:")
    for x in d["diagnostics"]:
        extra = f" [{x['caveat']}]" if x["caveat"] else ""
        lines.append(f"  {x['source']}: {x['verdict']}{extra}: {x['equation']}")
    lines += [f"caveat: {c}" for c in d["caveats"]]
    r = d["randomness"]
    lines.append(f"seed: {r['seed']}, primes: {len(r['primes'])}, failure bound: {r['failure_bound']:.3g}")
    return lines


def _text_transfer(t: dict) -> list[str]:
    lines = ["transfer matrix:"]
    lines += ["  [" + ", ".join(row) + "]" for row in t["entries"]]
    lines.append("transfer coefficients:")
    lines += [f"  {c}" for c in t["coefficients"]]
    if t["caveat"]:
        lines.append(f"caveat: {t['caveat']}")
    return lines


# -- commands -----------------------------------------------------------------


def cmd_analyze(model, args) -> tuple[dict, list[str]]:
    d = _report_json(model, _analysis(model, args))
    return d, _text_analyze(d)


def cmd_io(model, args):
    method = args.method or "elimination"
    lm = as_linear(model)
    ordering = _parse_ordering(args.ordering, model)
    wanted = ["elimination", "cramer"] if method == "all" else [method]
    if method == "transfer":
        raise UsageError("io supports --method elimination, cramer or all")
    if "cramer" in wanted and not isinstance(model, CompartmentModel):
        if method == "cramer":
            raise UsageError("the Cramer-rule construction needs a compartment model")
        wanted.remove("cramer")
    cond = condition_report(model)
    out = {"command": "io", "model": _model_info(model), "equations": {}, "coefficients": {}, "labels": {}}
    lines = []
    for m in wanted:
        eqs = full_io_equations(lm, ordering) if m == "elimination" else cramer_io_equations(model)
        label = "full set of input-output equations" if m == "elimination" else (
            "Cramer-rule equations" if cond.cramer_gate else "relation only, not a full set")
        out["equations"][m] = [_equation_json(e, model) for e in eqs]
        out["coefficients"][m] = _strs(coefficients(eqs))
        out["labels"][m] = label
        lines.append(f"{m} equations ({label}):")
        lines += [f"  {e.format(lm.outputs, lm.inputs)}" for e in eqs]
        lines.append("coefficients:")
        lines += [f"  {c}" for c in out["coefficients"][m]]
    return out, lines


def cmd_transfer(model, args):
    t = _transfer_json(transfer_matrix(model))
    gate = condition_report(model).cramer_gate
    t["identifiable_field_generators"] = gate
    out = {"command": "transfer", "model": _model_info(model), "transfer": t}
    lines = _text_transfer(t)
    lines.append("coefficients generate the identifiable field" if gate
                 else "no gate: coefficients are not claimed to generate the identifiable field")
    return out, lines


def cmd_certify(model, args):
    cond = condition_report(model)
    out = {"command": "certify", "model": _model_info(model), "conditions": _conditions_json(cond),
           "forest": None}
    lines = [f"certificate: {cond.certificate}"]
    for k, v in cond.as_dict().items():
        if k != "certificates":
            lines.append(f"  {k}: {'n/a' if v is None else v}")
    if isinstance(model, CompartmentModel) and cond.leak_or_input_reachable_from_all:
        sources = sorted(model.leak_set | model.input_set)
        forest, relabel = bfs_spanning_forest(model.n, model.edge_set, sources)
        out["forest"] = {"sources": sources, "edges": [[i, j] for i, j in forest],
                         "relabel": {str(k): v for k, v in sorted(relabel.items())}}
        lines.append("spanning forest towards leaks and inputs: "
                     + (", ".join(f"{i}->{j}" for i, j in forest) or "(empty)"))
    return out, lines


def cmd_check(model, args):
    lm = as_linear(model)
    h = parse_expression(args.function, lm.ring)
    rep = _analysis(model, args)
    log = PrimeLog(random.Random(args.seed))
    verdict = jacobian_membership(h, rep.generators, args.trials, 3, log)
    bound = failure_bound(list(rep.generators) + [h], 3 * args.trials)
    out = {"command": "check", "model": _model_info(model), "function": format_ratfunc(h),
           "generators": _strs(rep.generators), "status": rep.status, "verdict": verdict,
           "membership_semantics": MEMBERSHIP_SEMANTICS,
           "randomness": {"seed": args.seed, "primes": log.primes, "failure_bound": bound}}
    lines = [f"{format_ratfunc(h)}: {verdict} ({MEMBERSHIP_SEMANTICS})",
             f"generators ({rep.status}): " + ", ".join(out["generators"])]
    return out, lines


def cmd_witness(model, args):
    subs = {}
    for item in args.map or []:
        if "=" not in item:
            raise UsageError(f"--map expects sym=expr, got {item!r}")
        k, v = item.split("=", 1)
        subs[k.strip()] = v.strip()
    ok = witness_transformation(model, subs, args.trials, random.Random(args.seed), args.series_order)
    out = {"command": "witness", "model": _model_info(model), "map": dict(sorted(subs.items())),
           "output_preserving": ok, "trials": args.trials, "seed": args.seed}
    return out, [f"output-preserving: {ok}"]


COMMANDS = {
    "analyze": (cmd_analyze, "theorem gates, identifiable-field generators and diagnostics"),
    "io": (cmd_io, "input-output equations"),
    "transfer": (cmd_transfer, "transfer-function matrix"),
    "certify": (cmd_certify, "graph conditions and certificates"),
    "check": (cmd_check, "test whether a parameter function is determined by the generators"),
    "witness": (cmd_witness, "test an output-preserving parameter/state transformation"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ioident", description="Identifiability analysis of linear ODE and compartment models.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("model", help="model file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--ordering", help="output ordering, smallest first, e.g. y2,y1")
        sp.add_argument("--method", choices=("elimination", "cramer", "transfer", "all"))
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--series-order", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        if name == "check":
            sp.add_argument("--function", required=True, help="rational expression in the parameters")
        if name == "witness":
            sp.add_argument("--map", action="append", metavar="SYM=EXPR",
                            help="substitution; expressions may use the parameters, the states and k")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed < 0 or args.seed >= 2 ** 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if args.trials is None:
            args.trials = 5 if args.command == "witness" else 3
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        model = load_model(args.model)
        handler = COMMANDS[args.command][0]
        data, lines = handler(model, args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"ioident: error: {exc}", file=sys.stderr)
        return 1
    except (InvariantViolation, AssertionError) as exc:
        print(f"ioident: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
