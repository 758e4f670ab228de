"""Command-line surface.

Usage shape:

    hardy constant  (--copson P | --arithmetic --weights DESC [--certified])
    hardy estimate  --mean MEAN --weights DESC --method METHOD [--N ...]
    hardy verify    {axioms,jcin,cut,decreasing,lsc-example,mu1-sweep} ...
    hardy explore   continuity ...

Exit codes: 0 success or pass (counterexample searches and exploratory
runs are informational and always 0 unless they error), 1 a verified
claim failed, 2 usage error, 3 a route's preconditions or a mean's
domain were violated.

Output is deterministic for a fixed argv and seed: JSON has sorted keys,
a "schema" tag and no timestamps; rational values print as "p/q". Number
literals on the command line parse exactly unless --float is given. The
HARDY_THREADS environment variable caps worker threads; results do not
depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .scalars import Number, format_number, json_ready, parse_number
from .kernel import MeanDomainError, MeanSpec, check_axioms, step_profile
from .families import parse_mean
from .weights import WeightSeq, as_float, coarsen, make_sequence, ratio_diagnostics
from .search import OptimizerConfig
from .hardy import (HypothesisViolation, InconclusiveError, arithmetic_hardy,
                    copson_constant, finite_lower_bound, geometric_probe,
                    kedlaya_estimate, unweighted_limit)
from .checks import (ExpansionBudgetError, equal_sum_rearrangement, jcin_sweep,
                     lsc_example_table, mu1_sweep, verify_cut,
                     verify_decreasing, verify_jcin)

SCHEMA = "hardy-lab/1"


@dataclass
class Rendered:
    """One subcommand's outcome in every output shape."""

    code: int
    command: str
    config: dict
    report: dict
    text: str
    rows: Optional[List[List[object]]] = None


def _threads() -> int:
    raw = os.environ.get("HARDY_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"HARDY_THREADS must be an integer, got {raw!r}") from None


def _parse_values(text: str, float_mode: bool) -> List[Number]:
    toks = [t.strip() for t in text.replace(";", ",").split(",")]
    if not any(toks):
        raise ValueError("empty value list")
    if "" in toks:
        raise ValueError(f"malformed value list {text!r}: empty entry")
    if float_mode:
        return [float(t) for t in toks]
    for t in toks:
        if "." in t or (("e" in t.lower()) and "inf" not in t.lower()):
            raise ValueError(
                f"{t!r} is a float literal; write an exact ratio like p/q, "
                "or pass --float to accept float precision")
    return [parse_number(t) for t in toks]


def _weights_arg(desc: str, float_mode: bool) -> WeightSeq:
    seq = make_sequence(desc)
    return as_float(seq) if float_mode else seq


def _kv_rows(payload: dict, prefix: str = "") -> List[List[object]]:
    rows: List[List[object]] = []
    for key in sorted(payload):
        val = payload[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            rows.extend(_kv_rows(val, name + "."))
        elif isinstance(val, list):
            rows.append([name, json.dumps(val)])
        else:
            rows.append([name, val])
    return rows


def _write(args, rendered: Rendered) -> int:
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        body = json.dumps({
            "schema": SCHEMA,
            "command": rendered.command,
            "config": json_ready(rendered.config),
            "report": rendered.report,
        }, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        rows = rendered.rows if rendered.rows is not None else \
            [["field", "value"]] + _kv_rows(rendered.report)
        writer.writerows(rows)
        body = buf.getvalue()
    else:
        body = rendered.text if rendered.text.endswith("\n") else rendered.text + "\n"
    out_path = getattr(args, "output", None)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return rendered.code


def _verdict_text(rep) -> str:
    head = {"pass": "PASS", "fail": "FAIL",
            "counterexample_found": "COUNTEREXAMPLE FOUND",
            "inconclusive": "INCONCLUSIVE (no counterexample found)"}[rep.outcome]
    return f"{head}  check={rep.check} instances={rep.instances} margin={rep.margin:.6g}"


def _check_exit(rep) -> int:
    # searches without the theorem's hypotheses are informational
    if rep.outcome in ("counterexample_found", "inconclusive"):
        return 0
    return 0 if rep.passed else 1


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_constant(args) -> Rendered:
    if args.copson is not None:
        p = parse_number(args.copson)
        value = copson_constant(float(p))
        report = {"constant": "copson", "order": format_number(p),
                  "value": json_ready(value)}
        return Rendered(0, "constant", {"copson": format_number(p)}, report,
                        format_number(value))
    lam = _weights_arg(args.weights, args.float)
    est = arithmetic_hardy(lam, args.N, certified=args.certified)
    text = format_number(est.value)
    if est.upper is not None:
        text += f"\ninterval: [{float(est.lower)!r}, {float(est.upper)!r}]"
    cfg = {"arithmetic": True, "weights": args.weights, "N": args.N,
           "certified": args.certified}
    return Rendered(0, "constant", cfg, est.to_json(), text)


def _cmd_estimate(args) -> Rendered:
    lam = _weights_arg(args.weights, args.float)
    cfg = OptimizerConfig(starts=args.starts, seed=args.seed, threads=_threads())
    if args.method == "finite":
        mean = parse_mean(args.mean)
        est = finite_lower_bound(mean, lam, args.N, cfg)
    elif args.method == "geometric-probe":
        est = geometric_probe(lam, parse_number(args.q), args.N)
    elif args.method == "kedlaya":
        mean = parse_mean(args.mean)
        est = kedlaya_estimate(mean, lam, args.N, window=args.window)
    else:  # nonweighted-limit
        mean = parse_mean(args.mean)
        est = unweighted_limit(mean, args.N)
    config = {"mean": args.mean, "weights": args.weights, "method": args.method,
              "N": args.N, "seed": args.seed, "starts": args.starts}
    text = (f"{est.kind}: value={est.value!r} direction={est.direction} "
            f"mean={est.mean} weights={est.weights} N={est.N}")
    report = est.to_json()
    rows = [["field", "value"]] + _kv_rows(report)
    return Rendered(0, "estimate", config, report, text, rows)


def _cmd_verify_axioms(args) -> Rendered:
    mean = parse_mean(args.mean)
    rep = check_axioms(mean, trials=args.trials, seed=args.seed, tol=args.tol)
    lines = []
    for name, oc in rep.outcomes.items():
        if oc.skipped:
            lines.append(f"SKIP {name}: {oc.skipped}")
        else:
            lines.append(f"{'PASS' if oc.passed else 'FAIL'} {name}: "
                         f"worst={oc.worst_violation:.3g} over {oc.trials} trials")
    lines.append(f"{'PASS' if rep.passed else 'FAIL'} overall for {mean.name}")
    cfg = {"mean": args.mean, "trials": args.trials, "seed": args.seed,
           "tol": args.tol}
    return Rendered(0 if rep.passed else 1, "verify-axioms", cfg, rep.to_json(),
                    "\n".join(lines))


def _cmd_verify_jcin(args) -> Rendered:
    mean = parse_mean(args.mean)
    if (args.x is None) != (args.w is None):
        raise ValueError("--x and --w must be given together")
    if args.x is not None:
        x = _parse_values(args.x, args.float)
        w = _parse_values(args.w, False)
        rep = verify_jcin(mean, x, w, tol=args.tol)
        cfg = {"mean": args.mean, "x": args.x, "w": args.w, "tol": args.tol}
    else:
        rep = jcin_sweep(mean, trials=args.trials, seed=args.seed, tol=args.tol)
        cfg = {"mean": args.mean, "trials": args.trials, "seed": args.seed,
               "tol": args.tol}
    return Rendered(_check_exit(rep), "verify-jcin", cfg, rep.to_json(),
                    _verdict_text(rep))


def _parse_blocks(spec: str, n_terms: Optional[int]) -> List[int]:
    parts = [int(t) for t in spec.split(",") if t.strip()]
    if not parts:
        raise ValueError("empty --blocks")
    if len(parts) == 1 and n_terms is not None:
        return parts * n_terms
    return parts


def _cmd_verify_cut(args) -> Rendered:
    lam = make_sequence(args.weights)
    blocks = _parse_blocks(args.blocks, args.N)
    n_terms = args.N if args.N is not None else len(blocks)
    if n_terms > len(blocks):
        raise ValueError("--N asks for more truncations than --blocks covers")
    psi = coarsen(lam, blocks)
    target = args.mean if args.mean in ("arithmetic", "power:1") else parse_mean(args.mean)
    cfg_opt = OptimizerConfig(starts=args.starts, seed=args.seed, threads=_threads())
    rep = verify_cut(target, psi, lam, n_terms, tol=args.tol, config=cfg_opt)
    cfg = {"mean": args.mean, "weights": args.weights, "blocks": args.blocks,
           "N": n_terms, "tol": args.tol, "seed": args.seed}
    return Rendered(_check_exit(rep), "verify-cut", cfg, rep.to_json(),
                    _verdict_text(rep))


def _cmd_verify_decreasing(args) -> Rendered:
    mean = parse_mean(args.mean)
    x = _parse_values(args.x, args.float)
    w = _parse_values(args.w, False)
    grid = _parse_values(args.grid, args.float)
    f = step_profile(x, w)
    rep = verify_decreasing(mean, f, grid, tol=args.tol)
    cfg = {"mean": args.mean, "x": args.x, "w": args.w, "grid": args.grid,
           "tol": args.tol}
    return Rendered(_check_exit(rep), "verify-decreasing", cfg, rep.to_json(),
                    _verdict_text(rep))


def _cmd_verify_lsc(args) -> Rendered:
    table = lsc_example_table(args.kmax, args.N)
    lines = [f"k={k:3d}  value={v!r}" for k, v in table.rows]
    lines.append(f"baseline={table.baseline!r}")
    lines.append(f"limit={table.limit_value!r} converged={table.converged}")
    ok = table.converged and table.tail_min >= table.baseline - 1e-9
    cfg = {"kmax": args.kmax, "N": args.N}
    return Rendered(0 if ok else 1, "verify-lsc-example", cfg, table.to_json(),
                    "\n".join(lines), table.csv_rows())


def _cmd_verify_mu1(args) -> Rendered:
    mean = parse_mean(args.mean)
    cap = float(parse_number(args.cap)) if args.cap is not None else None
    cfg_opt = OptimizerConfig(starts=args.starts, seed=args.seed,
                              threads=_threads())
    rep = mu1_sweep(mean, trials=args.trials, N=args.N, seed=args.seed,
                    cap=cap, tol=args.tol, config=cfg_opt)
    cfg = {"mean": args.mean, "trials": args.trials, "N": args.N,
           "seed": args.seed, "cap": args.cap, "tol": args.tol}
    return Rendered(_check_exit(rep), "verify-mu1-sweep", cfg, rep.to_json(),
                    _verdict_text(rep))


def _cmd_explore_continuity(args) -> Rendered:
    mean = parse_mean(args.mean)
    cfg_opt = OptimizerConfig(starts=args.starts, seed=args.seed,
                              threads=_threads())
    rows_out = []
    for tok in args.s_grid.split(","):
        s = parse_number(tok)
        if not (0 < s < 1):
            raise ValueError("--s-grid entries must lie in (0, 1)")
        lam = make_sequence(f"geometric:{format_number(s)}")
        est = finite_lower_bound(mean, lam, args.N, cfg_opt)
        rows_out.append({"s": format_number(s), "value": est.value})
    ones_est = finite_lower_bound(mean, make_sequence("ones"), args.N, cfg_opt)
    cap = copson_constant(float(mean.params)) if mean.family == "power" else None
    report = {
        "rows": rows_out,
        "ones_value": ones_est.value,
        "closed_form_cap": json_ready(cap),
        "note": "exploratory continuity sweep; no pass/fail semantics",
    }
    lines = [f"s={r['s']:>8}  value={r['value']!r}" for r in rows_out]
    lines.append(f"ones      value={ones_est.value!r}")
    if cap is not None:
        lines.append(f"closed-form cap at unit weights: {cap!r}")
    csv_rows = [["s", "value"]] + [[r["s"], repr(r["value"])] for r in rows_out]
    cfg = {"mean": args.mean, "s_grid": args.s_grid, "N": args.N,
           "seed": args.seed}
    return Rendered(0, "explore-continuity", cfg, report, "\n".join(lines),
                    csv_rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p, *, fmt_default: str = "text") -> None:
    p.add_argument("--format", choices=("json", "csv", "text"),
                   default=fmt_default, help="output format")
    p.add_argument("--output", help="write the report to this path instead of stdout")
    p.add_argument("--float", action="store_true",
                   help="parse numeric literals as floats instead of exact rationals")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hardy",
        description="Weighted means, their best constants, and structural checks.")
    sub = top.add_subparsers(dest="command", required=True)

    c = sub.add_parser(
        "constant",
        help="closed-form constants",
        description="Closed-form best constants: the power-mean constant "
                    "(1-p)^(-1/p) and the arithmetic-mean constant as an "
                    "exact partial sum, optionally certified into an interval "
                    "with a tail bound.")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--copson", metavar="P", help="power-mean order")
    g.add_argument("--arithmetic", action="store_true",
                   help="arithmetic-mean constant of --weights")
    c.add_argument("--weights", default="dyadic", help="weight descriptor")
    c.add_argument("--N", type=int, default=200, help="truncation length")
    c.add_argument("--certified", action="store_true",
                   help="also bound the tail, reporting a two-sided interval")
    _add_common(c)
    c.set_defaults(handler=_cmd_constant)

    e = sub.add_parser(
        "estimate",
        help="constant estimation routes",
        description="Estimates of the best constant: finite-section search "
                    "(lower bound), the geometric probe vector (lower bound, "
                    "arithmetic mean), the diverging-weights substitution "
                    "route, and the unweighted limit n*M(1,1/2,...,1/n).")
    e.add_argument("--mean", default="power:1", help="mean descriptor")
    e.add_argument("--weights", default="ones", help="weight descriptor")
    e.add_argument("--method", required=True,
                   choices=("finite", "geometric-probe", "kedlaya",
                            "nonweighted-limit"))
    e.add_argument("--N", type=int, default=256)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--starts", type=int, default=8)
    e.add_argument("--q", default="1/2", help="probe ratio in (0,1)")
    e.add_argument("--window", type=float, default=0.5,
                   help="trailing window fraction for steady-state estimates")
    _add_common(e, fmt_default="json")
    e.set_defaults(handler=_cmd_estimate)

    v = sub.add_parser("verify", help="structural checks")
    vs = v.add_subparsers(dest="verb", required=True)

    va = vs.add_parser(
        "axioms",
        help="weighted-mean axioms",
        description="Randomized check of the four weighted-mean axioms "
                    "(nullhomogeneity, reduction under interleaving, the "
                    "mean-value property, elimination of vanishing weights) "
                    "plus any flags the mean declares.")
    va.add_argument("--mean", required=True)
    va.add_argument("--trials", type=int, default=200)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--tol", type=float, default=1e-9)
    _add_common(va)
    va.set_defaults(handler=_cmd_verify_axioms)

    vj = vs.add_parser(
        "jcin",
        help="rearrangement comparison",
        description="Prefix means never exceed those of the equal-sum "
                    "nonincreasing rearrangement (for symmetric monotone "
                    "concave means). Without those flags this runs as a "
                    "counterexample search.")
    vj.add_argument("--mean", required=True)
    vj.add_argument("--x", help="comma-separated values for a single instance")
    vj.add_argument("--w", help="comma-separated rational weights")
    vj.add_argument("--trials", type=int, default=200)
    vj.add_argument("--seed", type=int, default=0)
    vj.add_argument("--tol", type=float, default=1e-10)
    _add_common(vj)
    vj.set_defaults(handler=_cmd_verify_jcin)

    vc = vs.add_parser(
        "cut",
        help="coarsening comparison",
        description="Summing consecutive weight blocks never raises the "
                    "constant: exact partial-sum comparison at matched "
                    "truncations for the arithmetic mean, finite-section "
                    "ordering within --tol for other means.")
    vc.add_argument("--mean", default="arithmetic")
    vc.add_argument("--weights", required=True)
    vc.add_argument("--blocks", required=True,
                    help="uniform block size, or a comma list of leading sizes")
    vc.add_argument("--N", type=int, help="number of coarse truncations to check")
    vc.add_argument("--tol", type=float, default=1e-2)
    vc.add_argument("--seed", type=int, default=0)
    vc.add_argument("--starts", type=int, default=4)
    _add_common(vc)
    vc.set_defaults(handler=_cmd_verify_cut)

    vd = vs.add_parser(
        "decreasing",
        help="running means of step profiles",
        description="The running mean of a nonincreasing step profile over "
                    "(0, u] is nonincreasing in u, checked on a grid.")
    vd.add_argument("--mean", required=True)
    vd.add_argument("--x", required=True, help="step values")
    vd.add_argument("--w", required=True, help="step widths (weights)")
    vd.add_argument("--grid", required=True, help="comma-separated u values")
    vd.add_argument("--tol", type=float, default=1e-9)
    _add_common(vd)
    vd.set_defaults(handler=_cmd_verify_decreasing)

    vl = vs.add_parser(
        "lsc-example",
        help="semicontinuity example family",
        description="Constants of dyadic weights with one term bumped to 1: "
                    "they converge to baseline + 1/2 while the weights "
                    "converge to plain dyadic, the one-sided jump that lower "
                    "semicontinuity permits.")
    vl.add_argument("--kmax", type=int, default=25)
    vl.add_argument("--N", type=int, default=200)
    _add_common(vl)
    vl.set_defaults(handler=_cmd_verify_lsc)

    vm = vs.add_parser(
        "mu1-sweep",
        help="sup-at-unit-weights cap",
        description="Random rational weights never beat the unweighted "
                    "constant: every finite-section bound must stay below "
                    "the cap (closed form for power means) plus --tol.")
    vm.add_argument("--mean", required=True)
    vm.add_argument("--trials", type=int, default=50)
    vm.add_argument("--N", type=int, default=256)
    vm.add_argument("--seed", type=int, default=0)
    vm.add_argument("--cap", help="override the closed-form cap")
    vm.add_argument("--tol", type=float, default=1e-3)
    vm.add_argument("--starts", type=int, default=4)
    _add_common(vm)
    vm.set_defaults(handler=_cmd_verify_mu1)

    x = sub.add_parser("explore", help="exploratory sweeps (no pass/fail)")
    xs = x.add_subparsers(dest="verb", required=True)
    xc = xs.add_parser(
        "continuity",
        help="constants along geometric weights approaching unit weights",
        description="Finite-section bounds for geometric weight ratios "
                    "s -> 1, against the unit-weight value. Informational "
                    "only: whether the constant varies continuously here is "
                    "an open question, not a checked claim.")
    xc.add_argument("--mean", required=True)
    xc.add_argument("--s-grid", default="1/2,3/4,9/10", dest="s_grid")
    xc.add_argument("--N", type=int, default=128)
    xc.add_argument("--seed", type=int, default=0)
    xc.add_argument("--starts", type=int, default=4)
    _add_common(xc)
    xc.set_defaults(handler=_cmd_explore_continuity)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rendered = args.handler(args)
    except (HypothesisViolation, InconclusiveError, ExpansionBudgetError,
            MeanDomainError) as exc:
        print(f"hardy: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError) as exc:
        print(f"hardy: {exc}", file=sys.stderr)
        print("run 'hardy <command> --help' for usage", file=sys.stderr)
        return 2
    return _write(args, rendered)


if __name__ == "__main__":
    sys.exit(main())
