"""Command-line front end: solve, verify, bounds, gen, normalize, experiment.

Exit codes: 0 ok, 2 usage, 3 parse error, 4 oracle budget exhausted,
5 verification failure. All outputs are deterministic given files, flags and
seeds; rationals are rendered as "p/q" strings, with ratio columns carrying
an extra display-only 6-place decimal.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from . import io
from .algo75 import pack_75
from .core import Instance, Packing, lower_bounds, validate_packing
from .exact import BudgetExceeded, SearchBudget, exact_opt, feasible_in
from .generators import (
    DISTRIBUTIONS,
    gen_a75_worst,
    gen_from_3partition,
    gen_nf_worst,
    gen_random,
    three_partition_brute,
)
from .nextfit import check_block_inequality, next_fit
from .normalize import normalization_violations, normalize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str) -> "_CliError":
    return _CliError(code, message)


def _load_instance(path: str) -> Instance:
    try:
        return io.load_instance(path)
    except OSError as exc:
        raise _fail(EXIT_PARSE, f"cannot read instance: {exc}")
    except io.ParseError as exc:
        raise _fail(EXIT_PARSE, f"bad instance file: {exc}")


def _load_packing(path: str) -> Packing:
    try:
        return io.load_packing(path)
    except OSError as exc:
        raise _fail(EXIT_PARSE, f"cannot read packing: {exc}")
    except io.ParseError as exc:
        raise _fail(EXIT_PARSE, f"bad packing file: {exc}")


def _budget(args: argparse.Namespace) -> SearchBudget:
    base = SearchBudget.from_env()
    max_bins = getattr(args, "max_bins", None)
    nodes = getattr(args, "budget_nodes", None)
    return SearchBudget(
        max_items=base.max_items,
        max_bins=max_bins if max_bins is not None else base.max_bins,
        max_structures=nodes if nodes is not None else base.max_structures,
    )


def _decimal(value: Fraction) -> str:
    """Display-only 6-place rendering of an exact ratio."""
    scaled = value.numerator * 10**6
    q, r = divmod(scaled, value.denominator)
    if 2 * r >= value.denominator:
        q += 1
    return f"{q // 10**6}.{q % 10**6:06d}"


def _write_or_print(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance(args.input)
    if args.algo == "a75" and inst.k != 2:
        raise _fail(EXIT_USAGE, f"--algo a75 requires k=2, instance has k={inst.k}")
    if args.presort and args.algo != "nf":
        raise _fail(EXIT_USAGE, "--presort only applies to --algo nf")
    if args.trace and args.algo != "nf":
        raise _fail(EXIT_USAGE, "--trace only applies to --algo nf")
    if args.report and args.algo != "a75":
        raise _fail(EXIT_USAGE, "--report only applies to --algo a75")

    trace_doc = None
    report_doc = None
    if args.algo == "nf":
        run_inst = inst
        if args.presort:
            reverse = args.presort == "decreasing"
            order = sorted(inst.sizes, reverse=reverse)
            run_inst = Instance(k=inst.k, sizes=tuple(order))
        packing, trace = next_fit(run_inst)
        if not check_block_inequality(run_inst, trace):
            raise AssertionError("block weight inequality failed on a trace")
        trace_doc = {
            "blocks": [list(span) for span in trace.blocks],
            "close_reasons": [r.value for r in trace.close_reasons],
        }
        inst = run_inst
    elif args.algo == "a75":
        report = pack_75(inst)
        packing = report.packing
        report_doc = {
            "bins": report.n_bins,
            "label_counts": dict(sorted(report.label_counts.items())),
            "reclassified_small": report.reclassified_small,
            "fallback_triggered": report.fallback_triggered,
        }
    else:
        try:
            _, packing = exact_opt(inst, _budget(args))
        except BudgetExceeded as exc:
            raise _fail(EXIT_BUDGET, f"oracle budget exhausted: {exc}")

    assert not validate_packing(inst, packing)
    if args.output:
        io.save_packing(args.output, packing)
    if args.trace and trace_doc is not None:
        _write_or_print(args.trace, json.dumps(trace_doc, indent=2) + "\n")
    if args.report and report_doc is not None:
        _write_or_print(args.report, json.dumps(report_doc, indent=2) + "\n")
    print(f"bins={packing.n_bins} lower_bound={lower_bounds(inst).best}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    packing = _load_packing(args.packing)
    violations = validate_packing(inst, packing)
    for line in violations:
        print(line)
    if violations:
        return EXIT_VERIFY
    print(f"ok: {packing.n_bins} bins")
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    inst = _load_instance(args.input)
    report = lower_bounds(inst)
    print(
        f"size_bound={report.size_bound} weight_bound={report.weight_bound} "
        f"count_bound={report.count_bound} best={report.best}"
    )
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    certified = None
    try:
        if args.family == "nf-worst":
            inst, certified = gen_nf_worst(args.k, args.m)
        elif args.family == "a75-worst":
            inst, certified = gen_a75_worst(args.n)
        elif args.family == "reduce3p":
            numbers = [int(x) for x in args.numbers.split(",") if x.strip()]
            inst = gen_from_3partition(numbers, args.b, args.k)
        else:  # random
            inst = gen_random(args.n, args.k, args.dist, args.seed)
    except ValueError as exc:
        raise _fail(EXIT_USAGE, str(exc))
    _write_or_print(args.output, io.dumps_instance(inst))
    if args.certified_output:
        if certified is None:
            raise _fail(EXIT_USAGE, f"{args.family} has no certified packing")
        io.save_packing(args.certified_output, certified)
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    packing = _load_packing(args.input)
    if inst.k != 2:
        raise _fail(EXIT_USAGE, f"normalize requires k=2, instance has k={inst.k}")
    violations = validate_packing(inst, packing)
    if violations:
        for line in violations:
            print(line)
        return EXIT_VERIFY
    result = normalize(inst, packing)
    if args.check:
        problems = normalization_violations(inst, result)
        if problems or result.n_bins > packing.n_bins:
            for line in problems:
                print(line)
            return EXIT_VERIFY
    if args.output:
        io.save_packing(args.output, result)
    print(f"bins={result.n_bins} (from {packing.n_bins})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Experiments.


def _instance_descriptor(inst: Instance) -> str:
    return "|".join(str(s) for s in inst.sizes)


def _experiment_nf(args: argparse.Namespace, writer: "csv.writer") -> None:
    writer.writerow(
        ["trial", "n", "k", "dist", "sizes", "alg_bins", "opt_bins",
         "ratio", "ratio_decimal", "status"]
    )
    rng = random.Random(args.seed)
    budget = _budget(args)
    max_ratio = Fraction(0)
    ok = skipped = 0
    use_a75 = args.suite == "a75-ratio"
    k = 2 if use_a75 else args.k
    dist = "mixed" if use_a75 else args.dist
    for trial in range(args.trials):
        n = rng.randint(1, args.max_n)
        inst = gen_random(n, k, dist, seed=rng.randrange(2**30))
        if use_a75:
            alg_bins = pack_75(inst).n_bins
        else:
            packing, trace = next_fit(inst)
            assert check_block_inequality(inst, trace)
            alg_bins = packing.n_bins
        try:
            opt, _ = exact_opt(inst, budget)
        except BudgetExceeded:
            skipped += 1
            writer.writerow(
                [trial, n, k, dist, _instance_descriptor(inst),
                 alg_bins, "", "", "", "skipped"]
            )
            continue
        ok += 1
        ratio = Fraction(alg_bins, opt) if opt else Fraction(0)
        max_ratio = max(max_ratio, ratio)
        writer.writerow(
            [trial, n, k, dist, _instance_descriptor(inst), alg_bins, opt,
             str(ratio), _decimal(ratio), "ok"]
        )
    writer.writerow(
        ["summary", "", k, dist, "", "", "", str(max_ratio),
         _decimal(max_ratio), f"ok={ok};skipped={skipped}"]
    )


def _random_3partition(rng: random.Random, target: int) -> list[int]:
    lo, hi = target // 4 + 1, (target - 1) // 2
    while True:
        numbers = [rng.randint(lo, hi) for _ in range(5)]
        last = 2 * target - sum(numbers)
        if lo <= last <= hi:
            return numbers + [last]


def _experiment_reduction(args: argparse.Namespace, writer: "csv.writer") -> None:
    writer.writerow(
        ["trial", "k", "target", "numbers", "brute", "packed", "agree"]
    )
    rng = random.Random(args.seed)
    agree = skipped = 0
    target = 20
    for trial in range(args.trials):
        numbers = _random_3partition(rng, target)
        expected = three_partition_brute(numbers, target)
        inst = gen_from_3partition(numbers, target, args.k)
        try:
            witness = feasible_in(inst, 2, _budget(args))
        except BudgetExceeded:
            skipped += 1
            writer.writerow(
                [trial, args.k, target, " ".join(map(str, numbers)),
                 int(expected), "", "skipped"]
            )
            continue
        got = witness is not None
        agree += int(got == expected)
        writer.writerow(
            [trial, args.k, target, " ".join(map(str, numbers)),
             int(expected), int(got), int(got == expected)]
        )
    writer.writerow(
        ["summary", args.k, target, "", "", "",
         f"{agree}/{args.trials - skipped}"]
    )


def _experiment_normalize(args: argparse.Namespace, writer: "csv.writer") -> None:
    writer.writerow(
        ["trial", "n", "source", "bins_in", "bins_out", "ok"]
    )
    rng = random.Random(args.seed)
    budget = _budget(args)
    ok = 0
    for trial in range(args.trials):
        n = rng.randint(1, args.max_n)
        inst = gen_random(n, 2, args.dist, seed=rng.randrange(2**30))
        source = "nf"
        packing, _ = next_fit(inst)
        if trial % 2 == 1:
            try:
                _, packing = exact_opt(inst, budget)
                source = "exact"
            except BudgetExceeded:
                pass
        result = normalize(inst, packing)
        good = (
            not normalization_violations(inst, result)
            and result.n_bins <= packing.n_bins
            and normalize(inst, result).key() == result.key()
        )
        ok += int(good)
        writer.writerow(
            [trial, n, source, packing.n_bins, result.n_bins, int(good)]
        )
    writer.writerow(["summary", "", "", "", "", f"{ok}/{args.trials}"])


def cmd_experiment(args: argparse.Namespace) -> int:
    out = sys.stdout if args.output is None else open(
        args.output, "w", encoding="utf-8", newline=""
    )
    try:
        writer = csv.writer(out, lineterminator="\n")
        if args.suite in ("nf-ratio", "a75-ratio"):
            _experiment_nf(args, writer)
        elif args.suite == "reduction-check":
            _experiment_reduction(args, writer)
        else:
            _experiment_normalize(args, writer)
    finally:
        if args.output is not None:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitpack",
        description="Splittable-item bin packing with at most k parts per bin.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="pack an instance file")
    solve.add_argument("--algo", choices=("nf", "a75", "exact"), required=True)
    solve.add_argument("--input", required=True)
    solve.add_argument("--output", help="packing JSON destination")
    solve.add_argument("--trace", help="next-fit trace JSON (nf only)")
    solve.add_argument("--report", help="label-count report JSON (a75 only)")
    solve.add_argument("--presort", choices=("increasing", "decreasing"))
    solve.add_argument("--max-bins", type=int)
    solve.add_argument("--budget-nodes", type=int)
    solve.set_defaults(func=cmd_solve)

    verify = sub.add_parser("verify", help="check a packing against an instance")
    verify.add_argument("--instance", required=True)
    verify.add_argument("--packing", required=True)
    verify.set_defaults(func=cmd_verify)

    bounds = sub.add_parser("bounds", help="print the lower bounds")
    bounds.add_argument("--input", required=True)
    bounds.set_defaults(func=cmd_bounds)

    gen = sub.add_parser("gen", help="emit generated instances")
    gen_sub = gen.add_subparsers(dest="family", required=True)
    nf_worst = gen_sub.add_parser("nf-worst")
    nf_worst.add_argument("--k", type=int, required=True)
    nf_worst.add_argument("--m", type=int, required=True)
    a75_worst = gen_sub.add_parser("a75-worst")
    a75_worst.add_argument("--n", type=int, required=True)
    reduce3p = gen_sub.add_parser("reduce3p")
    reduce3p.add_argument("--b", type=int, required=True)
    reduce3p.add_argument("--numbers", required=True, help="comma separated")
    reduce3p.add_argument("--k", type=int, required=True)
    rand = gen_sub.add_parser("random")
    rand.add_argument("--n", type=int, required=True)
    rand.add_argument("--k", type=int, required=True)
    rand.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    rand.add_argument("--seed", type=int, default=0)
    for sp in (nf_worst, a75_worst, reduce3p, rand):
        sp.add_argument("--output", help="instance JSON (default stdout)")
        sp.add_argument("--certified-output", help="certified packing JSON")
        sp.set_defaults(func=cmd_gen)

    norm = sub.add_parser("normalize", help="apply the structural rewrites")
    norm.add_argument("--input", required=True, help="packing JSON")
    norm.add_argument("--instance", required=True)
    norm.add_argument("--output")
    norm.add_argument("--check", action="store_true")
    norm.set_defaults(func=cmd_normalize)

    exp = sub.add_parser("experiment", help="ratio sweeps with CSV reports")
    exp.add_argument(
        "--suite",
        choices=("nf-ratio", "a75-ratio", "reduction-check", "normalize-check"),
        required=True,
    )
    exp.add_argument("--trials", type=int, default=100)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--max-n", type=int, default=6)
    exp.add_argument("--k", type=int, default=2)
    exp.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    exp.add_argument("--output", help="CSV destination (default stdout)")
    exp.add_argument("--max-bins", type=int)
    exp.add_argument("--budget-nodes", type=int)
    exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except BudgetExceeded as exc:
        print(f"oracle budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
