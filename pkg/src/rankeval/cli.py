"""Command-line interface: ``rankeval {evaluate,curves,synth,sweep,oracle-check}``.

Exit codes: 0 success, 2 bad input or options, 3 hypothesis/reference id
mismatch, 4 oracle violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from rankeval import io as rio
from rankeval.baselines import Undefined, mean_average_precision
from rankeval.core import (
    HypothesisMismatch,
    InvalidInput,
    ParseError,
    RankedList,
    RankEvalError,
    TiePolicy,
)
from rankeval.datagen import (
    FAMILIES,
    AdjacentSwaps,
    Constructed,
    GenSpec,
    MajorityClass,
    PowerLaw,
    Reverse,
    SubgroupShuffle,
    TopDisplacement,
    Uniform,
    degradation_sweep,
    generate,
    perturb,
)
from rankeval.evaluate import METRICS, evaluate, parse_metrics
from rankeval.oracle import replay_table1, sweep, verify_instance
from rankeval.rankdcg import CostVariant, cost_curve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MISMATCH = 3
EXIT_VIOLATION = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise CliError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise CliError("empty rank list")
    return values


def _ranks_list(text: str) -> RankedList:
    try:
        return RankedList.from_ranks(_int_list(text))
    except InvalidInput as exc:
        raise CliError(str(exc)) from None


def _sniff_mode(path: str, fmt: str) -> str:
    with open(path, encoding="utf-8-sig") as fh:
        for raw in fh:
            if not raw.strip():
                continue
            if fmt == "jsonl":
                try:
                    return "scores" if "score" in json.loads(raw) else "order"
                except (ValueError, TypeError):
                    return "order"
            return "scores" if raw.strip().replace(" ", "").lower() == "id,score" else "order"
    return "order"


def _load_reference(path: str, fmt: str | None) -> RankedList:
    return rio.parse_reference(path, fmt or rio.guess_format(path))


def _load_hypothesis(path: str, fmt: str | None, mode: str):
    fmt = fmt or rio.guess_format(path)
    if mode == "auto":
        mode = _sniff_mode(path, fmt)
    return rio.parse_hypothesis(path, fmt, mode)


def _read_pairs(manifest: str) -> list[tuple[str, str]]:
    base = Path(manifest).parent
    pairs = []
    with open(manifest, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["reference", "hypothesis"]:
            raise ParseError("pairs manifest needs the header 'reference,hypothesis'", 1)
        for fields in reader:
            if not fields:
                continue
            if len(fields) != 2:
                raise ParseError("expected 2 fields", reader.line_num)
            pairs.append(tuple(str(base / f.strip()) for f in fields))
    if not pairs:
        raise ParseError("pairs manifest lists no pairs")
    return pairs


def cmd_evaluate(args) -> int:
    metrics = parse_metrics(args.metrics)
    policy = TiePolicy(args.tie_policy)
    if args.pairs:
        if args.files:
            raise CliError("give either --pairs or REF HYP..., not both")
        jobs = _read_pairs(args.pairs)
    else:
        if len(args.files) < 2:
            raise CliError("evaluate needs a reference file and at least one hypothesis file")
        jobs = [(args.files[0], h) for h in args.files[1:]]

    references: dict[str, RankedList] = {}
    loaded = []
    for ref_path, hyp_path in jobs:
        if ref_path not in references:
            references[ref_path] = _load_reference(ref_path, args.ref_format)
        loaded.append((ref_path, hyp_path, _load_hypothesis(hyp_path, args.hyp_format, args.mode)))

    def run(job):
        ref_path, hyp_path, hyp = job
        try:
            scores = evaluate(references[ref_path], hyp, metrics, policy, args.ap_threshold)
        except HypothesisMismatch as exc:
            raise CliError(f"{hyp_path}: {exc}", EXIT_MISMATCH) from None
        name = hyp_path if args.pairs else Path(hyp_path).name
        return rio.ReportRow(name, scores)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        rows = list(pool.map(run, loaded))

    if "map" in metrics and len(rows) > 1:
        pairs = [(references[r], h) for r, _, h in loaded]
        rows.append(rio.ReportRow("MAP", {"map": mean_average_precision(pairs, args.ap_threshold, policy)}))
    _emit(rio.write_report(rows, args.format), args.out)
    return EXIT_OK


def cmd_curves(args) -> int:
    if bool(args.reference) == bool(args.ranks):
        raise CliError("give exactly one of REF or --ranks")
    ranked = _ranks_list(args.ranks) if args.ranks else _load_reference(args.reference, args.ref_format)
    names = args.variants.split(",") if args.variants else [v.value for v in CostVariant]
    try:
        variants = [CostVariant(v.strip()) for v in names]
    except ValueError:
        raise CliError(f"unknown variant in {args.variants!r}; choose from "
                       + ", ".join(v.value for v in CostVariant)) from None
    curves = {v.value: cost_curve(ranked, v) for v in variants}
    _emit(rio.write_curves_csv(curves), args.out)
    return EXIT_OK


def _gen_spec(args) -> GenSpec:
    chosen = [a for a in (args.constructed, args.power_law, args.uniform) if a is not None]
    if len(chosen) != 1:
        raise CliError("choose exactly one of --constructed, --power-law, --uniform")
    if args.constructed is not None:
        ranks = _int_list(args.constructed)
        return GenSpec(len(ranks), Constructed(tuple(ranks)), args.seed or 0)
    if args.seed is None:
        raise CliError("random distributions need an explicit --seed")
    if args.n is None:
        raise CliError("--n is required with --power-law/--uniform")
    if args.power_law is not None:
        return GenSpec(args.n, PowerLaw(args.power_law, args.levels), args.seed)
    return GenSpec(args.n, Uniform(args.uniform), args.seed)


def _perturbation(args):
    name = args.perturb
    if name is None:
        return None
    if name in ("adjacent-swaps", "subgroup-shuffle") and args.seed is None:
        raise CliError(f"--perturb {name} needs an explicit --seed")
    if name == "reverse":
        return Reverse()
    if name == "majority-class":
        return MajorityClass()
    if name == "top-displacement":
        if args.target is None:
            raise CliError("--perturb top-displacement needs --target")
        return TopDisplacement(args.target)
    if name == "adjacent-swaps":
        return AdjacentSwaps(args.swaps, args.seed)
    return SubgroupShuffle(args.seed)


def cmd_synth(args) -> int:
    spec = _gen_spec(args)
    op = _perturbation(args)
    ranked = generate(spec)
    hyp = perturb(ranked, op) if op is not None else None
    ext = "jsonl" if args.file_format == "jsonl" else "csv"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"reference.{ext}").write_text(rio.write_reference(ranked, args.file_format),
                                             encoding="utf-8", newline="")
        if hyp is not None:
            mode = rio.hypothesis_mode(hyp)
            hyp_ext = "txt" if mode == "order" and ext == "csv" else ext
            (out / f"hypothesis.{hyp_ext}").write_text(rio.write_hypothesis(hyp, args.file_format),
                                                      encoding="utf-8", newline="")
    elif hyp is not None:
        sys.stdout.write(rio.write_hypothesis(hyp, args.file_format))
    else:
        sys.stdout.write(rio.write_reference(ranked, args.file_format))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _gen_spec(args)
    if args.family in ("adjacent-swaps", "subgroup-shuffle") and args.seed is None:
        raise CliError(f"family {args.family} needs an explicit --seed")
    rows = degradation_sweep(spec, args.family, args.steps, parse_metrics(args.metrics),
                             TiePolicy(args.tie_policy), args.ap_threshold)
    _emit(rio.write_sweep_csv(rows), args.out)
    return EXIT_OK


def _fmt(value) -> str:
    return "nan" if isinstance(value, Undefined) else rio.format_value(value)


def cmd_oracle_check(args) -> int:
    run_table = args.table1 or not (args.ranks or args.sweep)
    lines, doc, failed = [], {}, False

    if run_table:
        rows = replay_table1()
        doc["table1"] = [{"row": r.index, "hypothesis": list(r.hypothesis), "passed": r.passed,
                          "observed": {k: None if isinstance(v, Undefined) else v
                                       for k, v in r.observed.items()},
                          "expected": r.expected, "failures": list(r.failures)} for r in rows]
        for r in rows:
            failed |= not r.passed
            shown = " ".join(f"{k}={_fmt(v)}" for k, v in r.observed.items())
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} table1 row {r.index} {list(r.hypothesis)}: {shown}")
            lines.extend(f"  {f}" for f in r.failures)

    if args.ranks:
        report = verify_instance(_int_list(args.ranks))
        failed |= not report.ok
        doc["instance"] = {
            "description": report.description,
            "permutations": report.permutation_count,
            "observed_min": report.observed_min, "observed_max": report.observed_max,
            "closed_min": report.closed_min, "closed_max": report.closed_max,
            "degenerate": report.degenerate, "violations": report.violations,
        }
        status = "PASS" if report.ok else "FAIL"
        lines.append(f"{status} instance {report.description}: {report.permutation_count} permutations, "
                     f"dcg' in [{report.observed_min!r}, {report.observed_max!r}], "
                     f"closed form [{report.closed_min!r}, {report.closed_max!r}]")
        lines.extend(f"  {v}" for v in report.violations)

    if args.sweep:
        summary = sweep(_int_list(args.values), args.max_n, args.workers)
        failed |= not summary.ok
        doc["sweep"] = {"instances": summary.instances, "permutations": summary.permutations,
                        "violations": list(summary.violations)}
        status = "PASS" if summary.ok else "FAIL"
        lines.append(f"{status} sweep values {args.values} n<={args.max_n}: {summary.instances} instances, "
                     f"{summary.permutations} permutations, {len(summary.violations)} violations")
        lines.extend(f"  {v}" for v in summary.violations)

    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_VIOLATION if failed else EXIT_OK


def _add_common_metric_flags(p) -> None:
    p.add_argument("--metrics", default="rankdcg",
                   help=f"comma-separated subset of {','.join(METRICS)} (default: rankdcg)")
    p.add_argument("--tie-policy", default="pessimistic", choices=[t.value for t in TiePolicy])
    p.add_argument("--ap-threshold", type=int, default=None, metavar="N",
                   help="items with rank > N are relevant for ap/map/f1 (default: lowest rank)")


def _add_gen_flags(p) -> None:
    p.add_argument("--constructed", metavar="RANKS", help='explicit ranks, e.g. "9,4,4,2"')
    p.add_argument("--power-law", type=float, metavar="ALPHA")
    p.add_argument("--uniform", type=int, metavar="LEVELS")
    p.add_argument("--levels", type=int, default=10, help="support size for --power-law")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankeval", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score hypotheses against a reference")
    p.add_argument("files", nargs="*", metavar="FILE", help="REF HYP [HYP ...]")
    p.add_argument("--pairs", metavar="MANIFEST", help="CSV with header reference,hypothesis")
    _add_common_metric_flags(p)
    p.add_argument("--format", default="table", choices=rio.REPORT_FORMATS)
    p.add_argument("--ref-format", choices=rio.FORMATS)
    p.add_argument("--hyp-format", choices=rio.FORMATS)
    p.add_argument("--mode", default="auto", choices=("auto", *rio.MODES))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("curves", help="emit per-position cost curves of the ideal ordering")
    p.add_argument("reference", nargs="?", metavar="REF")
    p.add_argument("--ranks", metavar="RANKS")
    p.add_argument("--ref-format", choices=rio.FORMATS)
    p.add_argument("--variants", help=",".join(v.value for v in CostVariant))
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("synth", help="generate a reference and optionally a degraded hypothesis")
    _add_gen_flags(p)
    p.add_argument("--perturb", choices=FAMILIES)
    p.add_argument("--swaps", type=int, default=1)
    p.add_argument("--target", type=int)
    p.add_argument("--file-format", default="csv", choices=rio.FORMATS)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sweep", help="metrics along a degradation path, as step,metric,score CSV")
    _add_gen_flags(p)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--steps", type=int, default=10)
    _add_common_metric_flags(p)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="brute-force verification")
    p.add_argument("--table1", action="store_true", help="replay the six-row comparison (default)")
    p.add_argument("--ranks", metavar="RANKS", help="verify one rank multiset (n <= 10)")
    p.add_argument("--sweep", action="store_true", help="verify every multiset of --values up to --max-n")
    p.add_argument("--values", default="1,2,3,4")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", default="table", choices=("table", "json"))
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"rankeval: error: {exc}", file=sys.stderr)
        return exc.code
    except HypothesisMismatch as exc:
        print(f"rankeval: error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (RankEvalError, OSError, ValueError) as exc:
        print(f"rankeval: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
