"""Command-line pipeline: infer, sample, scan, transform, testlex, evaluate, report.

Stages communicate only through files in the documented formats, so each can
be rerun or swapped independently. Every invocation that writes artifacts
also writes ``run_manifest.json`` next to them, recording the tool version,
the configuration, and a sha256 per artifact. All artifact files are
byte-deterministic given the same configuration and seed; the run manifest
itself carries the (non-deterministic) timestamp.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .cogs import load_split, save_split
from .errors import LexControlError
from .evaluate import (
    EvalReport,
    PredictionFile,
    aggregate_seeds,
    evaluate_split,
    load_structural_categories,
    pearson,
    render_table,
    report_test_lex_gap,
    spearman,
)
from .lexicon import infer_controlled_items, load_controlled_items, serialize_items_manifest
from .sampler import SamplerConfig, sample_sequences
from .scan import filter_absent, scan_corpus
from .testlex import TestLexConfig, generate_test_lex, validate_test_lex
from .transform import (
    SubstitutionPlan,
    apply_plan,
    build_plan,
    count_whole_token_occurrences,
    dataset_vocabulary,
    emit_manifest,
)

__all__ = ["main"]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_run_manifest(out_dir: Path, subcommand: str, config: dict, artifacts: list[Path]):
    manifest = {
        "tool": "lexcontrol",
        "version": __version__,
        "subcommand": subcommand,
        "config": {k: v for k, v in sorted(config.items()) if k != "func"},
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "artifacts": [
            {"path": str(p.relative_to(out_dir)), "sha256": _sha256(p)}
            for p in artifacts
        ],
    }
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8"
    )


def _config_echo(args: argparse.Namespace) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


def _resolve_items(args, train, gen):
    if getattr(args, "items", None):
        return load_controlled_items(Path(args.items).read_bytes(), train)
    return infer_controlled_items(train, gen)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_infer(args) -> int:
    train = load_split(args.train, "train")
    gen = load_split(args.gen, "gen")
    items = _resolve_items(args, train, gen)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tsv = out / "controlled_items.tsv"
    tsv.write_text(serialize_items_manifest(items), encoding="utf-8")
    detail = out / "controlled_items.json"
    detail.write_text(
        json.dumps(
            [
                {
                    "lemma": it.lemma,
                    "surface_forms": list(it.surface_forms),
                    "exposure_rows": list(it.exposure_rows),
                    "exposure_role": it.exposure_role.describe(),
                }
                for it in items
            ],
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    _write_run_manifest(out, "infer", _config_echo(args), [tsv, detail])
    print(f"{len(items)} controlled item(s)")
    for it in items:
        print(f"  {it.lemma}\t{','.join(it.surface_forms)}\t{it.exposure_role.describe()}")
    return 0


def _cmd_sample(args) -> int:
    blocklist: frozenset[str] = frozenset()
    if args.blocklist:
        blocklist = frozenset(
            line.strip()
            for line in Path(args.blocklist).read_text(encoding="utf-8").splitlines()
            if line.strip()
        )
    config = SamplerConfig(
        length_bucket=args.length,
        distribution=args.dist,
        seed=args.seed,
        count=args.count,
        blocklist=blocklist,
    )
    sequences = sample_sequences(config)
    body = "".join(s + "\n" for s in sequences)
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(body, encoding="utf-8")
        _write_run_manifest(out_path.parent, "sample", _config_echo(args), [out_path])
    else:
        sys.stdout.write(body)
    return 0


def _cmd_scan(args) -> int:
    patterns = [
        line.strip()
        for line in Path(args.patterns).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    report = scan_corpus(
        patterns,
        args.corpus,
        case_fold=not args.no_case_fold,
        engine=args.engine,
    )
    absent, present = filter_absent(patterns, report)
    if args.report:
        out_path = Path(args.report)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(report.to_json() + "\n", encoding="utf-8")
        _write_run_manifest(out_path.parent, "scan", _config_echo(args), [out_path])
    print(
        f"scanned {report.bytes_scanned} bytes in {report.files_scanned} file(s) "
        f"at {report.throughput_mb_s:.1f} MB/s [{report.engine}]"
    )
    print(f"absent: {len(absent)}  present: {len(present)}")
    for p in present:
        st = report.stats_for(p)
        print(f"  PRESENT {p}  count={st.count}")
        for hit in st.samples:
            print(f"    {hit.file}:{hit.offset} ...{hit.context!r}...")
    if report.errors:
        for err in report.errors:
            print(f"  unreadable: {err['file']}: {err['error']}", file=sys.stderr)
    return 0


_SPLIT_NAMES = ("train", "dev", "test", "gen")


def _cmd_transform(args) -> int:
    splits = {}
    for name in _SPLIT_NAMES:
        path = getattr(args, name)
        if path:
            splits[name] = load_split(path, name)
    if "train" not in splits:
        raise LexControlError("transform requires at least --train")
    gen = splits.get("gen")
    items = _resolve_items(args, splits["train"], gen if gen else splits["train"])
    if not items:
        raise LexControlError("no controlled items found to substitute")

    sampler_config = None
    if args.mode == "charseq":
        sampler_config = SamplerConfig(
            length_bucket=args.length,
            distribution=args.dist,
            seed=args.seed,
            count=len(items),
            blocklist=frozenset(dataset_vocabulary(splits.values())),
        )
    plan = build_plan(
        items, args.mode, sampler_config=sampler_config, sentinel_template=args.sentinel_template
    )

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[Path] = []
    for name, split in splits.items():
        transformed = apply_plan(split, plan)
        leftovers = count_whole_token_occurrences(
            transformed, {e.item.lemma for e in plan.entries} | {
                s for e in plan.entries for s in e.item.surface_forms
            }
        )
        bad = {k: v for k, v in leftovers.items() if v}
        if bad:
            raise LexControlError(f"substitution left occurrences behind in {name}: {bad}")
        path = out / f"{name}.tsv"
        save_split(transformed, path)
        artifacts.append(path)
    plan_path = out / "plan.json"
    plan_path.write_text(plan.to_json() + "\n", encoding="utf-8")
    artifacts.append(plan_path)
    if args.mode == "sentinel":
        manifest = emit_manifest(plan, args.init_scheme)
        vocab_path = out / "vocab_manifest.txt"
        vocab_path.write_text(manifest.serialize(), encoding="utf-8")
        artifacts.append(vocab_path)
    _write_run_manifest(out, "transform", _config_echo(args), artifacts)
    print(f"transformed {', '.join(splits)} with {len(items)} item(s) [{args.mode}]")
    return 0


def _cmd_testlex(args) -> int:
    train = load_split(args.train, "train")
    gen = load_split(args.gen, "gen")
    items = _resolve_items(args, train, gen)
    if not items:
        raise LexControlError("no controlled items available for test-lex generation")
    config = TestLexConfig(total=args.total, seed=args.seed, per_item_cap=args.per_item_cap)
    split = generate_test_lex(train, items, config)
    report = validate_test_lex(split, train, items)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    split_path = out / "testlex.tsv"
    save_split(split, split_path)
    report_path = out / "testlex_report.json"
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")
    _write_run_manifest(out, "testlex", _config_echo(args), [split_path, report_path])
    print(f"test-lex: {len(split)} rows over {len(items)} item(s); audit ok={report.ok}")
    return 0 if report.ok else 1


def _cmd_evaluate(args) -> int:
    plan = None
    if args.plan:
        plan = SubstitutionPlan.from_json(Path(args.plan).read_text(encoding="utf-8"))
    structural = (
        load_structural_categories(args.structural_categories)
        if args.structural_categories
        else None
    )
    report = EvalReport()
    for name, ref_path, pred_path in args.split:
        ref = load_split(ref_path, name)
        preds = PredictionFile.load(pred_path)
        ev = evaluate_split(
            preds, ref, plan=plan, policy=args.policy, structural_categories=structural
        )
        report.add(ev)
        line = f"{name}: acc={ev.accuracy:.3f} (n={ev.n})"
        if ev.lexical_accuracy is not None:
            line += f" lex={ev.lexical_accuracy:.3f} struct={ev.structural_accuracy:.3f}"
        if ev.novel_token_rate is not None:
            line += f" novel-token-rate={ev.novel_token_rate:.3f}"
        print(line)
    metrics = report.metrics()
    if "gen_lex_only" in metrics and ("testlex" in metrics or "test_lex" in metrics):
        print(f"test-lex gap: {report_test_lex_gap(report):.3f}")
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(report.to_json() + "\n", encoding="utf-8")
    _write_run_manifest(out_path.parent, "evaluate", _config_echo(args), [out_path])
    return 0


def _cmd_report(args) -> int:
    rows = []
    for group in args.group:
        label, _, files = group.partition("=")
        if not files:
            raise LexControlError(f"--group must look like LABEL=a.json,b.json: {group!r}")
        reports = [
            EvalReport.from_json(Path(f).read_text(encoding="utf-8"))
            for f in files.split(",")
        ]
        rows.append((label, aggregate_seeds(reports)))
    table = render_table(rows)
    print(table)
    lines = [table]
    if args.sweep:
        xs = [float(v) for v in args.sweep.split(",")]
        if len(xs) != len(rows):
            raise LexControlError(
                f"--sweep has {len(xs)} values for {len(rows)} groups"
            )
        for metric in args.metric:
            ys = []
            for label, agg in rows:
                if metric not in agg.metrics:
                    raise LexControlError(f"group {label!r} lacks metric {metric!r}")
                ys.append(agg.metrics[metric].mean)
            rho, rho_p = spearman(xs, ys)
            r, r_p = pearson(xs, ys)
            line = (
                f"{metric} vs sweep: spearman rho={rho:.2f} (p={rho_p:.2f}), "
                f"pearson r={r:.2f} (p={r_p:.2f})"
            )
            print(line)
            lines.append(line)
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_run_manifest(out_path.parent, "report", _config_echo(args), [out_path])
    return 0


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexcontrol",
        description="Lexical-exposure control toolkit for COGS-format datasets.",
    )
    parser.add_argument("--version", action="version", version=f"lexcontrol {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("infer", help="identify context-controlled lexical items")
    p.add_argument("--train", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--items", help="explicit items manifest overriding inference")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("sample", help="draw novel character sequences")
    p.add_argument("--length", choices=["shorter", "longer"], default="shorter")
    p.add_argument("--dist", choices=["random", "cvcv"], default="cvcv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=21)
    p.add_argument("--blocklist", help="file of forbidden strings, one per line")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("scan", help="verify candidate sequences against a corpus")
    p.add_argument("--patterns", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--no-case-fold", action="store_true")
    p.add_argument("--engine", choices=["auto", "numba", "python"], default="auto")
    p.add_argument("--report", help="write the scan report JSON here")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("transform", help="apply consistent lexical substitution")
    p.add_argument("--train", required=True)
    p.add_argument("--dev")
    p.add_argument("--test")
    p.add_argument("--gen")
    p.add_argument("--mode", choices=["charseq", "sentinel"], required=True)
    p.add_argument("--length", choices=["shorter", "longer"], default="shorter")
    p.add_argument("--dist", choices=["random", "cvcv"], default="cvcv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sentinel-template", default="[w{n}]")
    p.add_argument("--init-scheme", choices=["random", "avgWithNoise", "unusedEmbeddings"],
                   default="random")
    p.add_argument("--items", help="explicit items manifest overriding inference")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("testlex", help="generate the Test-Lex diagnostic split")
    p.add_argument("--train", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--items", help="explicit items manifest overriding inference")
    p.add_argument("--total", type=int, default=12000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-item-cap", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_testlex)

    p = sub.add_parser("evaluate", help="score prediction files")
    p.add_argument(
        "--split",
        nargs=3,
        metavar=("NAME", "REF", "PRED"),
        action="append",
        required=True,
        help="split name, reference TSV, prediction file; repeatable",
    )
    p.add_argument("--plan", help="plan.json from the transform stage")
    p.add_argument("--policy", choices=["strict", "canonical"], default="strict")
    p.add_argument("--structural-categories", help="override the structural tag list")
    p.add_argument("--out", required=True, help="evaluation report JSON path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="aggregate seed runs and render tables")
    p.add_argument(
        "--group",
        action="append",
        required=True,
        metavar="LABEL=r1.json,r2.json",
        help="labelled group of evaluation reports; repeatable",
    )
    p.add_argument("--sweep", help="comma-separated x values aligned with the groups")
    p.add_argument(
        "--metric",
        action="append",
        default=[],
        help="metric key to correlate against the sweep; repeatable",
    )
    p.add_argument("--out", help="write the rendered report here")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LexControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
