"""Command line entry point: ``pamdp solve|compare|bench``.

Exit codes: 0 success, 1 engines disagree, 2 bad input, 3 initial state
unsolvable, 4 timeout.
"""

import argparse
import json
import os
import signal
import sys
import time
from fractions import Fraction

from .mdp import CostModel
from .oracle import StateCapExceeded, enumerate_mdp, explicit_emp, explicit_ssp
from .solver import NoProperStatesError, NonPositiveCostError, SolveTimeout, solve_emp_symblicit, solve_ssp_symblicit
from .strips import (EmptyStateSpaceError, MssParseError, MssValidationError, gen_monkey, gen_moats, gen_random,
                     mss_to_mdp, parse_mss)

EXIT_MISMATCH, EXIT_INPUT, EXIT_UNSOLVABLE, EXIT_TIMEOUT = 1, 2, 3, 4


class UsageError(ValueError):
    pass


def _num(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def load_model(gen=None, path=None, seed=0):
    """MSS from ``--gen name:params`` or from a file."""
    if (gen is None) == (path is None):
        raise UsageError("give exactly one of --gen and --input")
    if path is not None:
        with open(path) as fh:
            return parse_mss(fh.read()), os.path.basename(path)
    name, _, params = gen.partition(":")
    try:
        args = [int(t) for t in params.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad generator parameters {params!r}") from None
    if name == "monkey" and len(args) == 2:
        return gen_monkey(*args), gen
    if name == "moats" and len(args) == 2:
        return gen_moats(*args), gen
    if name == "random" and len(args) <= 1:
        return gen_random(args[0] if args else seed), gen
    raise UsageError(f"unknown generator {gen!r} (monkey:S,P, moats:C,D or random[:SEED])")


class _Alarm:
    """Hard wall-clock limit through SIGALRM (main thread only)."""

    def __init__(self, seconds):
        self.seconds = seconds

    def _fire(self, signum, frame):
        raise SolveTimeout("time budget exhausted")

    def __enter__(self):
        if self.seconds:
            self.prev = signal.signal(signal.SIGALRM, self._fire)
            signal.setitimer(signal.ITIMER_REAL, self.seconds)
        return self

    def __exit__(self, *exc):
        if self.seconds:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, self.prev)
        return False


def run_symblicit(mss, objective, arith="exact", timeout=None):
    mdp, goal = mss_to_mdp(mss, keep_goal=objective == "ssp")
    costs = CostModel(mdp)
    with _Alarm(timeout):
        if objective == "ssp":
            report = solve_ssp_symblicit(mdp, costs, goal, arith=arith, timeout=timeout, keep_history=False)
        else:
            report = solve_emp_symblicit(mdp, costs, arith=arith, timeout=timeout, keep_history=False)
    return mdp, report


def run_explicit(mss, objective, timeout=None):
    mdp, goal = mss_to_mdp(mss, keep_goal=objective == "ssp")
    costs = CostModel(mdp)
    t0 = time.perf_counter()
    with _Alarm(timeout):
        e = enumerate_mdp(mdp, costs, goal if objective == "ssp" else None)
        res = explicit_ssp(e) if objective == "ssp" else explicit_emp(e)
    return mdp, e, res, time.perf_counter() - t0


def symblicit_report(mdp, report):
    d = mdp.domain
    out = {"objective": report.objective, "engine": "symblicit", "direction": report.direction}
    init = report.value_of(mdp.initial)
    if report.objective == "ssp":
        out["initial_value"] = "unsolvable" if init is None else _num(init)
        out["values"] = [{"block": B.to_records(), "value": _num(v)} for B, v in report.values.blocks]
    else:
        out["initial_gain"] = _num(init[0])
        out["values"] = [{"block": B.to_records(), "gain": _num(g), "bias": _num(b)}
                         for B, (g, b) in report.values.blocks]
    out["iterations"] = report.iterations
    out["max_quotient"] = report.max_quotient
    out["timings"] = {k: round(v, 6) for k, v in report.timings().items()}
    out["strategy"] = [{"block": B.to_records(), "action": a} for B, a in report.strategy.blocks]
    out["conditions"] = list(d.names)
    return out


def explicit_report(mdp, e, res, seconds, objective):
    r = mdp.domain.render
    out = {"objective": objective, "engine": "explicit",
           "direction": "minimize", "states": len(e.states)}
    i0 = e.index.get(mdp.initial)
    if out["objective"] == "ssp":
        out["initial_value"] = _num(res.values[i0]) if i0 in res.values else "unsolvable"
        out["values"] = [{"state": r(e.states[i]), "value": _num(res.values[i])} for i in sorted(res.values)]
    else:
        g, b = res.values
        out["initial_gain"] = _num(g[i0])
        out["values"] = [{"state": r(s), "gain": _num(g[i]), "bias": _num(b[i])} for i, s in enumerate(e.states)]
    out["iterations"] = res.iterations
    out["timings"] = {"total": round(seconds, 6)}
    out["strategy"] = [{"state": r(e.states[i]), "action": a} for i, a in sorted(res.strategy.items())]
    return out


def compare(mss, objective):
    """Return a list of human-readable mismatches between the two engines."""
    mdp, report = run_symblicit(mss, objective)
    _, e, res, _ = run_explicit(mss, objective)
    issues = []
    if objective == "ssp":
        sym_proper = {i for i, s in enumerate(e.states) if s in report.proper}
        if sym_proper != res.proper:
            issues.append(f"proper sets differ ({len(sym_proper)} vs {len(res.proper)} states)")
        for i in sorted(res.proper):
            s = e.states[i]
            if report.value_of(s) != res.values[i]:
                issues.append(f"value at {mdp.domain.render(s)}: {report.value_of(s)} vs {res.values[i]}")
    else:
        g, _ = res.values
        for i, s in enumerate(e.states):
            if report.value_of(s)[0] != g[i]:
                issues.append(f"gain at {mdp.domain.render(s)}: {report.value_of(s)[0]} vs {g[i]}")
    if report.iterations != res.iterations:
        issues.append(f"iterations {report.iterations} vs {res.iterations}")
    return issues


def _parser():
    p = argparse.ArgumentParser(prog="pamdp", description="Symblicit strategy iteration for monotonic MDPs")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, multi=False):
        sp.add_argument("--objective", choices=["ssp", "emp"], default="ssp")
        if multi:
            sp.add_argument("--gen", action="append", help="generator name:params (repeatable)")
        else:
            sp.add_argument("--gen", help="generator, e.g. monkey:1,2 moats:2,3 random:7")
        sp.add_argument("--input", help="MSS text file")
        sp.add_argument("--seed", type=int, default=0, help="seed for the random generator")
        sp.add_argument("--out", help="write the report to this file instead of stdout")

    s = sub.add_parser("solve", help="solve one instance")
    common(s)
    s.add_argument("--engine", choices=["symblicit", "explicit"], default="symblicit")
    s.add_argument("--arith", choices=["exact", "float"], default="exact")
    s.add_argument("--timeout", type=float)

    c = sub.add_parser("compare", help="check both engines agree on one instance")
    common(c)
    c.add_argument("--arith", choices=["exact"], default="exact")

    b = sub.add_parser("bench", help="time several instances")
    common(b, multi=True)
    b.add_argument("--engine", choices=["symblicit", "explicit"], default="symblicit")
    b.add_argument("--timeout", type=float)
    return p


def _timeout(args):
    if getattr(args, "timeout", None) is not None:
        return args.timeout
    env = os.environ.get("PAMDP_TIMEOUT")
    return float(env) if env else None


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bench(args):
    rows = [["instance", "iterations", "max_quotient", "lump", "syst", "impr", "total", "value"]]
    for gen in args.gen or []:
        mss, name = load_model(gen, None, args.seed)
        try:
            if args.engine == "symblicit":
                mdp, rep = run_symblicit(mss, args.objective, timeout=_timeout(args))
                t = rep.timings()
                v = rep.value_of(mdp.initial)
                v = v if args.objective == "ssp" else v[0]
                rows.append([name, rep.iterations, rep.max_quotient] + [f"{t[k]:.2f}" for k in
                            ("lump", "syst", "impr", "total")] + [_num(v) if v is not None else "unsolvable"])
            else:
                mdp, e, res, secs = run_explicit(mss, args.objective, timeout=_timeout(args))
                i0 = e.index[mdp.initial]
                v = res.values.get(i0) if args.objective == "ssp" else res.values[0][i0]
                rows.append([name, res.iterations, len(e.states), "-", "-", "-", f"{secs:.2f}",
                             _num(v) if v is not None else "unsolvable"])
        except (SolveTimeout, StateCapExceeded) as exc:
            rows.append([name] + ["TO" if isinstance(exc, SolveTimeout) else "CAP"] * 7)
    widths = [max(len(str(r[k])) for r in rows) for k in range(len(rows[0]))]
    return "".join("  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "bench":
            if args.input:
                raise UsageError("bench takes --gen only")
            _emit(_bench(args), args.out)
            return 0
        mss, _ = load_model(args.gen, args.input, args.seed)
        if args.command == "compare":
            issues = compare(mss, args.objective)
            _emit("".join(f"mismatch: {m}\n" for m in issues) or "match\n", args.out)
            return EXIT_MISMATCH if issues else 0
        if args.engine == "explicit":
            if args.arith != "exact":
                raise UsageError("the explicit engine is exact only")
            mdp, e, res, secs = run_explicit(mss, args.objective, _timeout(args))
            out = explicit_report(mdp, e, res, secs, args.objective)
        else:
            mdp, rep = run_symblicit(mss, args.objective, args.arith, _timeout(args))
            out = symblicit_report(mdp, rep)
        _emit(json.dumps(out, indent=2) + "\n", args.out)
        if args.objective == "ssp" and out["initial_value"] == "unsolvable":
            print("error: the initial state cannot reach the goal almost surely", file=sys.stderr)
            return EXIT_UNSOLVABLE
        return 0
    except (MssParseError, MssValidationError, UsageError, NonPositiveCostError, EmptyStateSpaceError,
            StateCapExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoProperStatesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except SolveTimeout:
        print("error: timeout", file=sys.stderr)
        return EXIT_TIMEOUT


if __name__ == "__main__":
    sys.exit(main())
