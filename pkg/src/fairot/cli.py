"""
Command-line interface.

    fairot synth  --seed N --out DIR
    fairot fit    --input CSV --transform {barycenter,scaling} --out DIR
    fairot apply  --input CSV --transform-file JSON --out DIR
    fairot report --input CSV [--transform KIND] --out DIR
    fairot table  --transform-file JSON [...] --levels 0.05,0.10,0.20
    fairot plot   --input CSV [--mitigated CSV] --out DIR

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
import warnings
from pathlib import Path

from . import __version__
from .barycenter import ScalingTransform, fit_barycenter, fit_scaling, transform_from_dict
from .divergence import default_edges
from .empirical import partition_by_group
from .errors import NumericalError, UnknownGroupError, ValidationError
from .fairness import FairnessReport, model_entry
from .io import FAIR_SUFFIX, ScoreTable, dump_json, load_json, read_score_table, write_score_table
from .plots import density_svg, qq_svg
from .synth import SynthConfig, generate
from .tables import neutral_table, render_csv_rows, render_text

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fit(table: ScoreTable, kind: str, column: str):
    data = table.grouped(column)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if kind == "scaling":
            return fit_scaling(data, column)
        return fit_barycenter(data, column)


def _apply(transform, table: ScoreTable, column: str):
    """Fair scores for ``column``; returns ``(values, n_clamped)``."""
    groups = table.column("group")
    known = set(transform.labels)
    for line, g in enumerate(groups, start=2):
        if g not in known:
            raise UnknownGroupError(f"row {line - 1} (line {line}): group {g!r} is not in the transform")
    scores = [float(v) for v in table.column(column)]
    if isinstance(transform, ScalingTransform):
        return transform.apply(scores, groups)
    return transform.apply(scores, groups), 0


def cmd_synth(args) -> int:
    config = SynthConfig(seed=args.seed, n_a=args.n_a, n_b=args.n_b, mean_a=args.mean_a, mean_b=args.mean_b,
                         concentration_a=args.concentration_a, concentration_b=args.concentration_b)
    out = _out_dir(args.out)
    write_score_table(generate(config), out / args.name)
    dump_json({"generator": "stratified-beta/systematic-bernoulli", "version": __version__,
               "config": config.as_dict()}, out / (Path(args.name).stem + ".config.json"))
    print(out / args.name)
    return EXIT_OK


def cmd_fit(args) -> int:
    table = read_score_table(args.input)
    transform = _fit(table, args.transform, args.column)
    doc = transform.to_dict()
    if args.model:
        doc["model"] = args.model
    path = _out_dir(args.out) / args.name
    dump_json(doc, path)
    if doc.get("warning"):
        print(f"warning: {doc['warning']}; transform is the identity", file=sys.stderr)
    print(path)
    return EXIT_OK


def cmd_apply(args) -> int:
    table = read_score_table(args.input)
    transform = transform_from_dict(load_json(args.transform_file))
    column = args.column or transform.column
    if column not in table.header:
        raise ValidationError(f"input has no column {column!r}")
    values, clamped = _apply(transform, table, column)
    result = table.with_column(args.output_column or column + FAIR_SUFFIX, values)
    path = _out_dir(args.out) / args.name
    write_score_table(result, path)
    if clamped:
        print(f"warning: {clamped} scaled scores clamped to [0, 1]", file=sys.stderr)
    print(path)
    return EXIT_OK


def _report_text(report: FairnessReport) -> str:
    lines = [f"fairness report (schema {report.schema}, KL/JS in nats, {len(report.bin_edges) - 1} bins)"]
    for m in report.models:
        for stage, d in (("before", m.before), ("after", m.after)):
            if d is None:
                continue
            lines.append("")
            lines.append(f"[{m.model}] {stage} mitigation")
            lines.append(f"  overall mean      {d.overall_mean:.6f}")
            for g in d.group_means:
                lines.append(f"  mean {g:<12} {d.group_means[g]:.6f}  (n={d.counts[g]})")
            if d.weak_dp_gap is not None:
                lines.append(f"  weak DP gap       {d.weak_dp_gap:.6f}")
            for p in d.strong_dp:
                kl = "inf" if p["KL"] is None else f"{p['KL']:.6f}"
                lines.append(f"  {p['groups'][0]} vs {p['groups'][1]}: W1={p['W1']:.6f} W2={p['W2']:.6f} "
                             f"TV={p['TV']:.6f} KL={kl} JS={p['JS']:.6f}")
            if d.balance is not None:
                b = d.balance
                status = "balanced" if b.balanced else "NOT balanced"
                lines.append(f"  balance           mean prediction {b.mean_prediction:.6f}, "
                             f"mean outcome {b.mean_outcome:.6f}, gap {b.gap:.6f} ({status})")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    if args.bins < 2:
        raise ValidationError("--bins must be at least 2")
    if not args.tolerance > 0:
        raise ValidationError("--tolerance must be positive")
    table = read_score_table(args.input)
    edges = default_edges(args.bins)
    entries = []
    for column in table.score_columns:
        raw = table.grouped(column)
        mitigated = None
        if args.transform:
            values, _ = _apply(_fit(table, args.transform, column), table, column)
            mitigated = raw.with_scores(values)
        elif table.fair_column_for(column):
            mitigated = table.grouped(table.fair_column_for(column))
        name = "score" if column == "score" else column[len("score_"):]
        entries.append(model_entry(raw, mitigated, name, edges, args.tolerance, args.kl_smoothing))
    meta = {"input": Path(args.input).name, "transform": args.transform, "kl_smoothing": args.kl_smoothing}
    report = FairnessReport(entries, edges.tolist(), args.tolerance, meta)
    out = _out_dir(args.out)
    dump_json(report.to_dict(), out / "report.json")
    text = _report_text(report)
    (out / "report.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def _parse_levels(text: str) -> list:
    try:
        levels = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"--levels must be comma-separated numbers, got {text!r}") from None
    if not levels:
        raise ValidationError("--levels is empty")
    for lv in levels:
        if not 0.0 <= lv <= 1.0:
            raise ValidationError(f"level {lv} is outside [0, 1]")
    return levels


def cmd_table(args) -> int:
    levels = _parse_levels(args.levels)
    transforms = []
    for path in args.transform_file:
        doc = load_json(path)
        name = doc.get("model") or Path(path).stem
        transforms.append((name, transform_from_dict(doc)))
    groups, headers, rows = neutral_table(transforms, levels)
    text = render_text(groups, headers, rows)
    sys.stdout.write(text)
    if args.out:
        out = _out_dir(args.out)
        (out / "table.txt").write_text(text, encoding="utf-8")
        with (out / "table.csv").open("w", newline="", encoding="utf-8") as f:
            csv.writer(f, lineterminator="\n").writerows(render_csv_rows(headers, rows))
    return EXIT_OK


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def cmd_plot(args) -> int:
    table = read_score_table(args.input)
    column = args.column
    raw, _ = partition_by_group(table.grouped(column))
    fair = None
    if args.mitigated:
        mtable = read_score_table(args.mitigated)
        fcol = mtable.fair_column_for(column) or column
        fair, _ = partition_by_group(mtable.grouped(fcol))
    elif table.fair_column_for(column):
        fair, _ = partition_by_group(table.grouped(table.fair_column_for(column)))
    edges = default_edges(args.bins)
    out = _out_dir(args.out)
    written = []
    labels = list(raw)
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            p = out / f"qq_{_slug(a)}_{_slug(b)}.svg"
            p.write_text(qq_svg(raw[a], raw[b], a, b), encoding="utf-8")
            written.append(p)
            if fair is not None:
                p = out / f"qq_fair_{_slug(a)}_{_slug(b)}.svg"
                p.write_text(qq_svg(fair[a], fair[b], a, b, f"Quantile matching {a} vs {b} (fair scores)"),
                             encoding="utf-8")
                written.append(p)
    for g in labels:
        series = {f"{g} raw": raw[g]}
        if fair is not None:
            series[f"{g} fair"] = fair[g]
            p = out / f"match_{_slug(g)}.svg"
            p.write_text(qq_svg(raw[g], fair[g], "raw", "fair", f"Raw vs fair scores, group {g}"),
                         encoding="utf-8")
            written.append(p)
        p = out / f"density_{_slug(g)}.svg"
        p.write_text(density_svg(series, edges, f"Score density, group {g}"), encoding="utf-8")
        written.append(p)
    for p in written:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairot", description=__doc__.split("\n\n")[0].strip() or None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic two-group score table")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name", default="scores.csv")
    p.add_argument("--n-a", type=int, default=SynthConfig.n_a)
    p.add_argument("--n-b", type=int, default=SynthConfig.n_b)
    p.add_argument("--mean-a", type=float, default=SynthConfig.mean_a)
    p.add_argument("--mean-b", type=float, default=SynthConfig.mean_b)
    p.add_argument("--concentration-a", type=float, default=SynthConfig.concentration_a)
    p.add_argument("--concentration-b", type=float, default=SynthConfig.concentration_b)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit a mitigation transform and save it as JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--transform", choices=("barycenter", "scaling"), default="barycenter")
    p.add_argument("--column", default="score")
    p.add_argument("--model", help="model name used as the column header in tables")
    p.add_argument("--out", required=True)
    p.add_argument("--name", default="transform.json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("apply", help="append fair scores to a score table")
    p.add_argument("--input", required=True)
    p.add_argument("--transform-file", required=True)
    p.add_argument("--column", help="score column to transform (default: the fitted column)")
    p.add_argument("--output-column")
    p.add_argument("--out", required=True)
    p.add_argument("--name", default="scored.csv")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("report", help="fairness diagnostics as JSON and text")
    p.add_argument("--input", required=True)
    p.add_argument("--transform", choices=("barycenter", "scaling"),
                   help="fit and apply this transform to report before/after values")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=0.01, help="relative balance tolerance")
    p.add_argument("--kl-smoothing", action="store_true", help="add 1e-9 mass per bin before KL")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("table", help="neutral predictions at fixed score levels")
    p.add_argument("--transform-file", action="append", required=True)
    p.add_argument("--levels", default="0.05,0.10,0.20")
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("plot", help="Q-Q matching and density SVGs")
    p.add_argument("--input", required=True)
    p.add_argument("--mitigated")
    p.add_argument("--column", default="score")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KeyError as exc:
        print(f"error: malformed document, missing key {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
