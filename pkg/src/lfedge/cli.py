"""Command-line front end.

    lfedge eval   --family zeta --sigma 1.5,2
    lfedge bound  theorem1 --family dirichlet --q 163 --index 1
    lfedge verify rankin --seeds 1000 --jobs 8
    lfedge lower  --family dirichlet --q 4 --index 1 --c0 0.1 --C0 5
    lfedge corpus --mode lemma3 --qmax 50

Exit status: 0 on success, 1 when ``verify`` finds a violation, 2 on bad input.
Reports are JSON with sorted keys (or CSV rows for bound reports) and embed
the resolved constants, their digest, and the full run configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import analytic, bounds, explicit, families, tensor
from .core import LFunctionError, LFunctionSpec, log_conductor
from .zeros import ZeroSet, load_zeros, zeta_zeros

FAMILIES = ("zeta", "dirichlet", "delta", "synthetic")
BOUND_MODES = ("lemma2", "lemma3", "theorem1", "theorem2", "sympower", "shortsum", "grh")
VERIFY_CHECKS = ("lemma1", "lemma2", "lemma5", "rankin", "chain", "maass", "monotone")
DEFAULT_LIMIT = 10**5
SEED_BATCH = 100


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("spec source (exactly one)")
    src.add_argument("--family", choices=FAMILIES)
    src.add_argument("--spec", help="spec JSON file")
    src.add_argument("--q", type=int, help="Dirichlet modulus")
    src.add_argument("--index", type=int, default=1, help="character index")
    src.add_argument("--seed", type=int, default=0)
    src.add_argument("--degree", type=int, default=2)
    src.add_argument("--theta", type=float, default=0.0)
    src.add_argument("--limit", type=int, default=None, help="prime limit of the local data")
    common.add_argument("--x", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--sigma", type=str)
    common.add_argument("--c0", type=float, default=0.1)
    common.add_argument("--C0", type=float, default=5.0)
    common.add_argument("--C1", type=float, default=1.0)
    common.add_argument("--C2", type=float, default=0.5)
    common.add_argument("--zeros", help="zeros file (gamma or beta gamma per line)")
    common.add_argument("--constants", help="key = value constants file")
    common.add_argument("--clamp-x", type=float, help="override x_max")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--strict", action="store_true")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="lfedge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="L(sigma), L'/L(sigma), Xi(sigma)")
    p = sub.add_parser("bound", parents=[common], help="upper bound reports")
    p.add_argument("mode", choices=BOUND_MODES)
    p.add_argument("--l", type=int, default=2, help="symmetric power")
    p.add_argument("--delta", type=float, default=0.0, help="GRH-mode coefficient exponent")
    p = sub.add_parser("verify", parents=[common], help="inequality / identity checks")
    p.add_argument("check", choices=VERIFY_CHECKS)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--qmax", type=int, default=50)
    sub.add_parser("lower", parents=[common], help="lower bound for |L(1)|")
    p = sub.add_parser("corpus", parents=[common], help="bound reports over Dirichlet characters")
    p.add_argument("--mode", choices=("lemma2", "lemma3", "theorem1", "shortsum"), default="lemma3")
    p.add_argument("--qmax", type=int, default=30)
    return parser


# --- helpers -----------------------------------------------------------------------

def resolve_constants(args: argparse.Namespace) -> bounds.Constants:
    C = bounds.load_constants(args.constants)
    if args.clamp_x is not None:
        C = bounds.Constants(**{**C.__dict__, "x_max": args.clamp_x})
    return C


def build_spec(args: argparse.Namespace, limit: int | None = None) -> LFunctionSpec:
    if (args.family is None) == (args.spec is None):
        raise UsageError("give exactly one of --family or --spec")
    if args.spec is not None:
        return families.load_spec(args.spec, strict=args.strict)
    lim = args.limit or limit or DEFAULT_LIMIT
    if args.family == "zeta":
        return families.zeta_spec(lim)
    if args.family == "dirichlet":
        if args.q is None:
            raise UsageError("--family dirichlet needs --q")
        return families.dirichlet_spec(args.q, args.index, lim, strict=args.strict)
    if args.family == "delta":
        return families.ramanujan_delta_spec(min(lim, 10**4) if args.limit is None else lim)
    return families.synthetic_spec(args.degree, args.seed, args.theta, lim)


def parse_sigmas(text: str | None, default: Sequence[float]) -> list[float]:
    if text is None:
        return list(default)
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--sigma expects comma-separated numbers, got {text!r}") from None


def run_parallel(fn: Callable[[Any], Any], items: Sequence[Any], jobs: int) -> list[Any]:
    """Map preserving item order; results do not depend on ``jobs``."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def config_dict(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"jobs", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def envelope(args: argparse.Namespace, C: bounds.Constants, results: Any, **extra: Any) -> dict[str, Any]:
    return {
        "command": args.command,
        "config": config_dict(args),
        "constants": C.__dict__,
        "constants_digest": C.digest,
        "results": bounds._jsonable(results),
        **extra,
    }


def _finite(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(_finite(doc), sort_keys=True, indent=1) + "\n"


def reports_csv(rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    cols = ["label", "mode", "x", "sigma0", "bound_log", *bounds.COMPONENTS, "clamped", "heuristic", "conditional"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({
            "label": r["label"], "mode": r["mode"], "x": r["params"]["x"], "sigma0": r["params"]["sigma0"],
            "bound_log": r["bound_log"], **r["components"],
            **{f: r["flags"].get(f, False) for f in ("clamped", "heuristic", "conditional")},
        })
    return buf.getvalue()


# --- commands ------------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace, C: bounds.Constants) -> tuple[dict, int]:
    spec = build_spec(args)
    out = []
    for s in parse_sigmas(args.sigma, (1.5, 2.0)):
        row: dict[str, Any] = {"sigma": s}
        lv = analytic.l_value(spec, s)
        row["L"] = lv.value
        row["L_error"] = lv.tail_bound
        row["method"] = lv.method
        if s > 1:
            ld = analytic.log_derivative(spec, s)
            row["log_derivative"] = ld.value
            row["log_derivative_error"] = ld.tail_bound
            row["abs_xi"] = abs(analytic.xi_value(spec, s).value)
        out.append(row)
    return envelope(args, C, out, label=spec.label), 0


def one_bound(spec: LFunctionSpec, mode: str, args: argparse.Namespace, C: bounds.Constants) -> dict[str, Any]:
    if mode in ("lemma2", "lemma3"):
        x = args.x or 100.0
        params = bounds.BoundParams(x, args.lam or bounds.OMEGA, C)
        rep = (bounds.lemma2_rhs if mode == "lemma2" else bounds.lemma3_rhs)(spec, params)
        return rep.to_dict()
    if mode == "theorem1":
        return bounds.theorem1_bound(spec, C).to_dict()
    if mode == "theorem2":
        return bounds.theorem2_bound(spec, tensor.rs_square(spec), C).to_dict()
    if mode == "sympower":
        return bounds.sympower_bound(spec, args.l, C).to_dict()
    if mode == "grh":
        return bounds.grh_bound(spec, args.delta, C).to_dict()
    if mode == "shortsum":
        res = bounds.short_sum_bound(spec, args.x or 100.0, C).to_dict()
        res.update(mode="shortsum", label=spec.label)
        return res
    raise UsageError(f"unknown mode {mode}")


def cmd_bound(args: argparse.Namespace, C: bounds.Constants) -> tuple[dict | str, int]:
    limit = None
    if args.mode in ("lemma2", "lemma3", "shortsum"):
        limit = max(int(args.x or 100), 10)
    elif args.mode in ("theorem2", "sympower"):
        limit = int(min(C.x_max, 10**6))
    elif args.mode == "grh":
        limit = 1000
    spec = build_spec(args, limit=limit)
    if args.mode in ("theorem2", "sympower") and args.limit is None and args.spec is None:
        # rebuild with exactly the coverage the chosen x needs
        logc = log_conductor(spec)
        need = bounds.theorem2_x(logc) if args.mode == "theorem2" or args.l == 1 else math.exp(logc)
        spec = build_spec(args, limit=max(10, int(min(need, C.x_max)) + 1))
    if args.mode == "grh" and args.limit is None and args.spec is None:
        spec = build_spec(args, limit=max(10, int(max(3.0, log_conductor(spec) ** 2)) + 1))
    report = one_bound(spec, args.mode, args, C)
    if args.format == "csv" and args.mode != "shortsum":
        return reports_csv([report]), 0
    return envelope(args, C, report, label=spec.label), 0


def _sweep(fn: Callable[[int, int], tensor.SweepResult], args: argparse.Namespace) -> tuple[list, int]:
    results = run_parallel(lambda seed: fn(seed, SEED_BATCH), list(range(args.seeds)), args.jobs)
    return [r.to_dict() for r in results], sum(r.violations for r in results)


def cmd_verify(args: argparse.Namespace, C: bounds.Constants) -> tuple[dict, int]:
    check = args.check
    violations: list[Any] = []
    summary: dict[str, Any] = {}
    if check == "rankin":
        rows, nbad = _sweep(tensor.rs_sweep, args)
        summary = {"seeds": rows, "violations": nbad}
        violations = [r for r in rows if r["violations"]]
    elif check == "chain":
        rows, nbad = _sweep(tensor.chain_sweep, args)
        summary = {"seeds": rows, "violations": nbad}
        violations = [r for r in rows if r["violations"]]
    elif check == "maass":
        rows, nbad = _sweep(tensor.maass_sweep, args)
        summary = {"seeds": rows, "violations": nbad}
        violations = [r for r in rows if r["violations"]]
    elif check == "lemma1":
        spec = build_spec(args, limit=10**4) if (args.family or args.spec) else families.zeta_spec(10**4)
        zs = load_zeros(args.zeros, critical_assumed=True) if args.zeros else zeta_zeros()
        s = parse_sigmas(args.sigma, (2.0,))[0]
        x = args.x or 100.0
        res = explicit.lemma1_rhs(spec, s, x, zs, C)
        lhs = -analytic.log_derivative(spec, s).value.real
        resid = abs(res.value - lhs)
        summary = {"lhs": lhs, "rhs": res.value, "residual": resid, "zero_tail_estimate": res.zero_tail_estimate,
                   "components": res.components}
        if resid > res.zero_tail_estimate + 1e-3:
            violations.append(summary)
    elif check == "lemma5":
        x = args.x or 1000.0
        spec = build_spec(args, limit=int(x) + 1) if (args.family or args.spec) else families.zeta_spec(int(x) + 1)
        zs = load_zeros(args.zeros, critical_assumed=True) if args.zeros else (
            zeta_zeros() if spec.label == "zeta" else ZeroSet.empty())
        s = parse_sigmas(args.sigma, (1.5,))[0]
        rep = explicit.verify_lemma5(spec, s, x, zs, C)
        summary = rep.to_dict()
        if rep.residual > rep.tail_estimate + 1e-2:
            violations.append(summary)
    elif check == "lemma2":
        xs = [args.x] if args.x else [50.0, 500.0, 5000.0]
        items = [(q, x) for q in range(3, args.qmax + 1) for x in xs]

        def run(item):
            q, x = item
            prim = families.character_group(q).primitive_indices()
            if not prim:
                return []
            sw = bounds.character_sweep(q, prim, bounds.BoundParams(x, args.lam or bounds.OMEGA, C))
            bad = []
            for j, idx in enumerate(prim):
                if sw.log_abs_L[j] > sw.lemma2[j] or sw.log_abs_L[j] > sw.lemma3[j]:
                    bad.append({"q": q, "index": idx, "x": x, "log_abs_L": sw.log_abs_L[j],
                                "lemma2": sw.lemma2[j], "lemma3": sw.lemma3[j]})
            return [len(prim), bad]

        res = run_parallel(run, items, args.jobs)
        checked = sum(r[0] for r in res if r)
        violations = [b for r in res if r for b in r[1]]
        summary = {"characters_checked": checked, "violations": len(violations)}
    elif check == "monotone":
        specs = [families.zeta_spec(100)]
        qs = [q for q in range(3, 60) if families.character_group(q).primitive_indices()]
        for q in qs:
            for idx in families.character_group(q).primitive_indices():
                if len(specs) > 20:
                    break
                specs.append(families.dirichlet_spec(q, idx, 100))
        res = run_parallel(analytic.xi_monotone_violations, specs, args.jobs)
        violations = [{"label": s.label, "drops": r} for s, r in zip(specs, res) if r]
        summary = {"specs": [s.label for s in specs]}
    return envelope(args, C, summary, check=check, violations=violations), 1 if violations else 0


def cmd_lower(args: argparse.Namespace, C: bounds.Constants) -> tuple[dict, int]:
    x_max = C.x_max
    spec = build_spec(args, limit=int(x_max) + 1)
    cfg = explicit.LowerBoundConfig(args.c0, args.C0, args.C1, args.C2, x_max)
    lb, rep = explicit.lower_bound_L1(spec, tensor.rs_square(spec), cfg)
    return envelope(args, C, rep.to_dict(), label=spec.label), 0


def cmd_corpus(args: argparse.Namespace, C: bounds.Constants) -> tuple[dict | str, int]:
    items = [(q, i) for q in range(3, args.qmax + 1) for i in families.character_group(q).primitive_indices()]
    x = args.x or 100.0
    limit = max(int(x), 10) + 1

    def run(item):
        q, i = item
        spec = families.dirichlet_spec(q, i, limit)
        return one_bound(spec, args.mode, args, C)

    rows = run_parallel(run, items, args.jobs)
    if args.format == "csv" and args.mode != "shortsum":
        return reports_csv(rows), 0
    return envelope(args, C, rows), 0


COMMANDS = {"eval": cmd_eval, "bound": cmd_bound, "verify": cmd_verify, "lower": cmd_lower, "corpus": cmd_corpus}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        C = resolve_constants(args)
        doc, code = COMMANDS[args.command](args, C)
    except (UsageError, LFunctionError, OSError, ValueError) as exc:
        print(f"lfedge: error: {exc}", file=sys.stderr)
        return 2
    text = doc if isinstance(doc, str) else dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
