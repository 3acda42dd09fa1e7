"""Command-line front end.

    loopm BENCHMARK --goals "E(x**2)" "c2(y)" [--invariants] [--after_loop]
                    [--sens_diff p | --sens p] [--synth_unsolv_inv] [--synth_solv_loop]
                    [--inv_deg D] [--format text|json] [--dump_recurrences]
                    [--simulate N --samples K --seed S --bind p=1/2 --csv FILE]

Exit status: 0 on success, 1 when the analysis reports an error, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .algebra.poly import format_poly
from .errors import AnalysisError, DivergesError
from .frontend import parse_file
from .invariants import invariant_basis
from .limits import limits_from_env
from .moments import MomentGoal, parse_goal
from .recurrences import MomentEngine, extract_recurrences
from .sensitivity import sensitivity
from .solver import DIVERGES, NO_LIMIT, closed_forms, limit_at_infinity
from .unsolvable import candidate_closed_form, synth_solvable_loop_text, synthesize_combinations


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    benchmark: str
    goals: list = field(default_factory=list)
    invariants: bool = False
    after_loop: bool = False
    sens_diff: str = None
    sens: str = None
    synth_unsolv_inv: bool = False
    synth_solv_loop: bool = False
    inv_deg: int = 2
    format: str = "text"
    dump_recurrences: bool = False
    simulate: int = None
    samples: int = 10_000
    seed: int = 0
    bind: dict = field(default_factory=dict)
    csv: str = None

    def __post_init__(self):
        if self.sens_diff and self.sens:
            raise UsageError("--sens_diff and --sens are mutually exclusive")
        if self.inv_deg < 1:
            raise UsageError("--inv_deg must be at least 1")
        if self.format not in ("text", "json"):
            raise UsageError("--format must be text or json")


class Report:
    def __init__(self, program):
        self.data = {"program": program, "goals": [], "invariants": [], "sensitivities": [],
                     "diagnostics": []}
        self.lines = []

    def line(self, text):
        self.lines.append(text)

    def error(self, err: AnalysisError):
        self.data["diagnostics"].append({"kind": err.kind, "module": err.module,
                                         "restriction": err.restriction, "message": str(err)})
        self.lines.append(f"error: {err.describe()}")

    def notice(self, text):
        self.data["diagnostics"].append({"kind": "Notice", "module": "unsolvable",
                                         "restriction": None, "message": text})
        self.lines.append(f"note: {text}")


def _default_goals(ast):
    return [MomentGoal("E", 1, ((v, 1),)) for v in ast.variables]


def _bindings(pairs):
    out = {}
    for item in pairs:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--bind expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = Fraction(value.strip())
        except ValueError as exc:
            raise UsageError(f"bad value in --bind {item!r}") from exc
    return out


def _sstr(expr):
    return sympy.sstr(expr)


def _after_loop(report, goal, cf, field):
    value = limit_at_infinity(cf)
    if value is DIVERGES:
        raise DivergesError(f"{goal} has no finite value after the loop (it diverges)")
    if value is NO_LIMIT:
        raise DivergesError(f"{goal} oscillates and has no value after the loop")
    text = _sstr(field.to_sympy(value))
    report.line(f"{goal} [after loop] = {text}")
    report.data.setdefault("after_loop", []).append({"goal": str(goal), "value": text})


def _closed_form_stage(config, ast, goals, report, limits):
    engine = MomentEngine(ast, limits)
    if config.dump_recurrences:
        system = extract_recurrences(ast, goals, limits, engine=engine)
        report.line(system.dump())
        report.data["recurrences"] = system.dump().splitlines()
    _, _, cfs = closed_forms(ast, goals, limits, engine=engine)
    for g in goals:
        cf = cfs[g]
        if config.after_loop:
            _after_loop(report, g, cf, engine.field)
        else:
            report.line(f"{g} = {cf.render()}")
        report.data["goals"].append({"goal": str(g), "closed_form_terms": cf.to_json()})
    if config.invariants:
        basis = invariant_basis({str(g): cfs[g] for g in goals}, engine.params, limits)
        for text in basis.lines():
            report.line(text)
        if not basis.complete:
            report.notice("relations among irrational bases came from a bounded search; "
                          "the invariant ideal may be incomplete")
        report.data["invariants"] = basis.to_json()


def _sensitivity_stage(config, ast, goals, report, limits):
    param = config.sens_diff or config.sens
    method = "diff" if config.sens_diff else "recurrence"
    for g in goals:
        cf = sensitivity(ast, g, param, method, limits)
        report.line(f"d/d{param} {g} = {cf.render()}")
        report.data["sensitivities"].append(
            {"goal": str(g), "param": param, "method": method, "closed_form_terms": cf.to_json()})


def _synthesis_stage(config, ast, report, limits):
    notices = []
    cands = synthesize_combinations(ast, config.inv_deg, limits, notices)
    for text in notices:
        report.notice(text)
    if not cands:
        report.line(f"no polynomial combination of degree <= {config.inv_deg} satisfies "
                    "a linear recurrence")
    report.data["combinations"] = []
    for cand in cands:
        entry = cand.to_json()
        report.line(str(cand))
        try:
            cf = candidate_closed_form(ast, cand, limits)
        except AnalysisError as err:
            report.error(err)
        else:
            report.line(f"E({format_poly(cand.S)}) = {cf.render()}")
            entry["closed_form_terms"] = cf.to_json()
        if config.synth_solv_loop:
            text = synth_solvable_loop_text(ast, cand, limits)
            report.line(text.rstrip("\n"))
            entry["loop"] = text
        report.data["combinations"].append(entry)


def _simulation_stage(config, ast, goals, report):
    from .simulator import estimate_moment, run_samples
    traces = run_samples(ast, config.simulate, config.samples, config.seed, config.bind)
    report.data["simulation"] = []
    for g in goals:
        est, err = estimate_moment(traces, g, config.simulate)
        report.line(f"{g} [simulated, n={config.simulate}, {config.samples} samples] "
                    f"= {est:.6g} +- {err:.3g}")
        report.data["simulation"].append({"goal": str(g), "n": config.simulate,
                                          "estimate": est, "stderr": err})
    if config.csv:
        traces.write_csv(config.csv)


def run(config: RunConfig, out=None) -> int:
    """Run the pipeline; writes the report to ``out`` and returns the exit code."""
    out = out or sys.stdout
    report = Report(config.benchmark)
    status = 0
    try:
        limits = limits_from_env()
        ast = parse_file(config.benchmark)
        goals = [parse_goal(g) if isinstance(g, str) else g for g in config.goals]
        goals = goals or _default_goals(ast)
        if config.after_loop and ast.nonterminating:
            raise UsageError("--after_loop needs a loop with a guard")
        if config.synth_unsolv_inv or config.synth_solv_loop:
            _synthesis_stage(config, ast, report, limits)
        elif config.sens_diff or config.sens:
            _sensitivity_stage(config, ast, goals, report, limits)
        else:
            _closed_form_stage(config, ast, goals, report, limits)
        if config.simulate is not None:
            _simulation_stage(config, ast, goals, report)
    except AnalysisError as err:
        report.error(err)
        status = 1
    except OSError as err:
        print(f"error: cannot read {config.benchmark}: {err.strerror}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    if config.format == "json":
        out.write(json.dumps(report.data, indent=2) + "\n")
    else:
        out.write("\n".join(report.lines) + ("\n" if report.lines else ""))
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="loopm", allow_abbrev=False,
                                description="Moments, invariants and sensitivities of "
                                            "probabilistic loops.")
    p.add_argument("benchmark", help="program file")
    p.add_argument("--goals", nargs="+", default=[], metavar="GOAL",
                   help='moment goals such as "E(x**2)", "c2(x)" or "k3(y)"')
    p.add_argument("--invariants", action="store_true", help="compute the moment invariant ideal")
    p.add_argument("--after_loop", action="store_true", help="report values after termination")
    p.add_argument("--sens_diff", "-sens_diff", metavar="PARAM",
                   help="sensitivity by differentiating closed forms")
    p.add_argument("--sens", "-sens", metavar="PARAM", help="sensitivity via sensitivity recurrences")
    p.add_argument("--synth_unsolv_inv", action="store_true",
                   help="synthesize combinations of defective variables")
    p.add_argument("--synth_solv_loop", action="store_true",
                   help="emit solvable loops for the synthesized combinations")
    p.add_argument("--inv_deg", type=int, default=2, help="degree bound for synthesis")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--dump_recurrences", action="store_true", help="print the recurrence system")
    p.add_argument("--simulate", type=int, metavar="N", help="also simulate N iterations")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bind", nargs="+", default=[], metavar="NAME=VALUE")
    p.add_argument("--csv", metavar="FILE", help="write simulated traces as CSV")
    return p


def main(argv=None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        config = RunConfig(
            benchmark=args.benchmark, goals=args.goals, invariants=args.invariants,
            after_loop=args.after_loop, sens_diff=args.sens_diff, sens=args.sens,
            synth_unsolv_inv=args.synth_unsolv_inv, synth_solv_loop=args.synth_solv_loop,
            inv_deg=args.inv_deg, format=args.format, dump_recurrences=args.dump_recurrences,
            simulate=args.simulate, samples=args.samples, seed=args.seed,
            bind=_bindings(args.bind), csv=args.csv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    return run(config, out)


if __name__ == "__main__":
    sys.exit(main())
