"""Command-line interface.

Subcommands: classify, measure, shapley, rank, oracle.  Reports go to
standard output, diagnostics to standard error.  Exit codes: 0 on
success, 1 on input errors, 2 on refusals (intractable exact requests,
oracle size limits, exceeded budgets, unsupported modes), which are also
emitted as machine-readable JSON objects on standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .approx import ApproxParams, Mode, estimate_shapley, sample_count
from .block_tree import build_tree
from .errors import (
    BudgetExceededError,
    IncshapError,
    InputError,
    IntractableExactError,
    OracleLimitError,
    UnsupportedModeError,
)
from .exact import shapley_exact
from .fd_analysis import TractabilityKind, classify
from .io import load_instance, load_manifest
from .measures import CoalitionEvaluator, MeasureKind, measure
from .oracle import OracleLimits, shapley_bruteforce_perms, shapley_bruteforce_subsets
from .report import build_report, decimal_str, render_report

_REFUSALS = (
    IntractableExactError,
    OracleLimitError,
    BudgetExceededError,
    UnsupportedModeError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="incshap", description=__doc__)
    parser.add_argument("--manifest", required=True, help="instance manifest (JSON)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="per-relation tractability class")
    p_classify.add_argument(
        "--dump-tree",
        action="store_true",
        help="print the block/subblock tree of each chain relation",
    )

    def add_measure_arg(p):
        p.add_argument(
            "--measure",
            required=True,
            choices=[k.value for k in MeasureKind],
            help="d=drastic, mi=violating pairs, p=problematic facts, "
            "r=repair cost, mc=repair count",
        )

    p_measure = sub.add_parser("measure", help="exact measure of the database")
    add_measure_arg(p_measure)
    p_measure.add_argument("--budget", type=int, default=None)

    def add_shapley_args(p, with_method=True):
        add_measure_arg(p)
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--fact", help="fact id, e.g. Trains:0")
        group.add_argument("--all", action="store_true")
        if with_method:
            p.add_argument(
                "--method", choices=["exact", "approx", "oracle"], default="exact"
            )
        p.add_argument("--eps", type=float, default=0.1)
        p.add_argument("--delta", type=float, default=0.05)
        p.add_argument(
            "--mode", choices=[m.value for m in Mode], default=Mode.ADDITIVE.value
        )
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--budget", type=int, default=None)

    p_shapley = sub.add_parser("shapley", help="per-fact attribution report")
    add_shapley_args(p_shapley)

    p_rank = sub.add_parser("rank", help="facts ranked by attribution")
    add_measure_arg(p_rank)
    p_rank.add_argument("--top", type=int, required=True)
    p_rank.add_argument(
        "--method", choices=["exact", "approx", "oracle"], default="exact"
    )
    p_rank.add_argument("--eps", type=float, default=0.1)
    p_rank.add_argument("--delta", type=float, default=0.05)
    p_rank.add_argument(
        "--mode", choices=[m.value for m in Mode], default=Mode.ADDITIVE.value
    )
    p_rank.add_argument("--seed", type=int, default=None)
    p_rank.add_argument("--samples", type=int, default=None)
    p_rank.add_argument("--budget", type=int, default=None)

    p_oracle = sub.add_parser("oracle", help="brute-force reference values")
    group = p_oracle.add_mutually_exclusive_group(required=True)
    group.add_argument("--fact")
    group.add_argument("--all", action="store_true")
    add_measure_arg(p_oracle)
    p_oracle.add_argument("--form", choices=["subsets", "perms"], default="subsets")
    p_oracle.add_argument("--max-facts-subsets", type=int, default=18)
    p_oracle.add_argument("--max-facts-perms", type=int, default=8)
    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("INCSHAP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"INCSHAP_SEED must be an integer, got {env!r}")
    return 0


def _selected_facts(db, args):
    if getattr(args, "all", False):
        return list(db.facts)
    return [db.get(args.fact)]


def _compute_values(db, fds, facts, kind, args, out_estimates):
    method = getattr(args, "method", "exact")
    values = []
    if method == "exact":
        for fact in facts:
            values.append((fact.id, shapley_exact(db, fds, fact, kind)))
    elif method == "oracle":
        engine = CoalitionEvaluator(db, fds)
        for fact in facts:
            values.append(
                (fact.id, shapley_bruteforce_subsets(db, fds, fact, kind, engine=engine))
            )
    else:
        params = ApproxParams(
            epsilon=args.eps,
            delta=args.delta,
            mode=Mode(args.mode),
            seed=_resolve_seed(args),
            samples_override=args.samples,
        )
        engine = CoalitionEvaluator(db, fds, budget=args.budget)
        for fact in facts:
            est = estimate_shapley(db, fds, fact, kind, params, engine=engine)
            out_estimates[fact.id] = est
            values.append((fact.id, est.value))
    return values


def _approx_meta(args, kind, n):
    params = ApproxParams(
        epsilon=args.eps,
        delta=args.delta,
        mode=Mode(args.mode),
        seed=_resolve_seed(args),
        samples_override=args.samples,
    )
    return {
        "epsilon": args.eps,
        "delta": args.delta,
        "mode": args.mode,
        "seed": _resolve_seed(args),
        "samples": sample_count(params, n, kind),
    }


def _cmd_classify(args, out):
    manifest = load_manifest(args.manifest)
    db, fds = load_instance(manifest)
    classes = classify(fds)
    for relation in fds.schema.relation_names:
        cls = classes[relation]
        print(f"{relation}: {cls.kind.value}", file=out)
        if args.dump_tree and cls.kind is TractabilityKind.LHS_CHAIN:
            tree = build_tree(db.facts_of(relation), cls.chain, db.schema)
            print(tree.dump(), file=out)
    return 0


def _cmd_measure(args, out):
    manifest = load_manifest(args.manifest)
    db, fds = load_instance(manifest)
    print(measure(MeasureKind(args.measure), db, fds, budget=args.budget), file=out)
    return 0


def _cmd_shapley(args, out):
    manifest = load_manifest(args.manifest)
    db, fds = load_instance(manifest)
    kind = MeasureKind(args.measure)
    facts = _selected_facts(db, args)
    estimates = {}
    values = _compute_values(db, fds, facts, kind, args, estimates)
    meta = _approx_meta(args, kind, len(db)) if args.method == "approx" else None
    report = build_report(
        kind,
        args.method,
        values,
        total_measure=measure(kind, db, fds, budget=getattr(args, "budget", None)),
        complete=bool(getattr(args, "all", False)),
        estimates=estimates or None,
        approx_meta=meta,
    )
    print(render_report(report), file=out)
    return 0


def _cmd_rank(args, out):
    manifest = load_manifest(args.manifest)
    db, fds = load_instance(manifest)
    kind = MeasureKind(args.measure)
    estimates = {}
    values = _compute_values(db, fds, list(db.facts), kind, args, estimates)
    ranked = sorted(values, key=lambda item: (-item[1], item[0]))
    for fact_id, value in ranked[: args.top]:
        print(f"{fact_id}\t{decimal_str(Fraction(value))}", file=out)
    return 0


def _cmd_oracle(args, out):
    manifest = load_manifest(args.manifest)
    db, fds = load_instance(manifest)
    kind = MeasureKind(args.measure)
    limits = OracleLimits(args.max_facts_subsets, args.max_facts_perms)
    compute = (
        shapley_bruteforce_subsets if args.form == "subsets" else shapley_bruteforce_perms
    )
    engine = CoalitionEvaluator(db, fds)
    values = [
        (fact.id, compute(db, fds, fact, kind, limits=limits, engine=engine))
        for fact in _selected_facts(db, args)
    ]
    report = build_report(
        kind,
        "oracle",
        values,
        total_measure=measure(kind, db, fds),
        complete=bool(getattr(args, "all", False)),
    )
    print(render_report(report), file=out)
    return 0


_COMMANDS = {
    "classify": _cmd_classify,
    "measure": _cmd_measure,
    "shapley": _cmd_shapley,
    "rank": _cmd_rank,
    "oracle": _cmd_oracle,
}


def run_command(argv, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except _REFUSALS as exc:
        payload = {"error": exc.kind, "message": str(exc)}
        if isinstance(exc, IntractableExactError):
            payload["suggestion"] = exc.suggestion
        print(json.dumps(payload, indent=2, separators=(",", ": ")), file=out)
        print(f"refused: {exc}", file=err)
        return 2
    except IncshapError as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
