"""Command-line interface.

Subcommands mirror the pipeline stages so any intermediate artifact can be
regenerated or inspected on its own:

    scribedist align    --manifest run.toml --out table.tsv
    scribedist features --table table.tsv --kind ngrams --lengths 3,4 \
                        --top 1000 --mode relative --out ngrams.csv
    scribedist zeta     --a words_A.csv --b words_B.csv --top 25 --out zeta.csv
    scribedist forest   --matrix ngrams.csv --labels labels.csv --trees 500 \
                        --seed 42 --out model.rf --importances mdi.csv
    scribedist drift    --a ngrams_A.csv --b ngrams_B.csv --subsets 500 \
                        --size 500 --seed 7 --out drift.csv
    scribedist run      --manifest run.toml
    scribedist plot     --kind drift --data drift.csv --out drift.svg

Exit codes: 0 success, 1 validation problem (bad flags, manifests, or
input files), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .alignment import align, read_table_tsv, segment, write_table_tsv
from .corpus import load_transcription, restore_word_breaks, tokenize
from .drift import (
    BootstrapConfig,
    annotate_boundaries,
    bootstrap_drift,
    classify_movements,
    read_drift_csv,
    write_drift_csv,
)
from .errors import VALIDATION_ERRORS, ScribeDistError
from .features import (
    MODE_COUNTS,
    MODE_RELATIVE,
    read_matrix_csv,
    select_mfw,
    select_top_ngrams,
    side_rows,
    vectorize,
    write_matrix_csv,
)
from .forest import (
    ForestParams,
    mdi_importances,
    rank_features,
    read_importances_csv,
    read_labels_csv,
    train,
    write_importances_csv,
    write_model,
)
from .manifest import load_manifest
from .pipeline import run_pipeline
from .svg import write_svg
from .zeta import burrows_zeta, read_zeta_csv, write_zeta_csv


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; our contract reserves 2 for runtime."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}") from exc


def _load_streams(manifest):
    streams = []
    for spec in manifest.manuscripts:
        t = load_transcription(spec.path, spec.siglum)
        t = restore_word_breaks(t, markers=spec.hyphen_markers)
        streams.append(tokenize(t))
    return streams


def _cmd_align(args) -> int:
    manifest = load_manifest(args.manifest)
    stream_a, stream_b = _load_streams(manifest)
    table = align(
        stream_a, stream_b, manifest.scoring, band=manifest.band, max_cells=manifest.max_cells
    )
    n_samples = args.samples if args.samples is not None else manifest.n_samples
    write_table_tsv(table, args.out, n_samples=n_samples)
    print(f"aligned {len(stream_a)} x {len(stream_b)} tokens -> {len(table)} rows "
          f"(score {table.score:g}) -> {args.out}")
    return 0


def _segmented(args):
    table, meta = read_table_tsv(args.table)
    n_samples = args.samples if args.samples is not None else meta.get("samples")
    if n_samples is None:
        raise ScribeDistError(
            "table carries no sample count; pass --samples"
        )
    return segment(table, n_samples)


def _cmd_features(args) -> int:
    samples = _segmented(args)
    mode = args.mode
    if mode is None:
        mode = MODE_COUNTS if args.kind == "words" else MODE_RELATIVE
    if args.kind == "words":
        voc = select_mfw(samples, args.top)
    else:
        if not args.lengths:
            raise ScribeDistError("--kind ngrams requires --lengths")
        voc = select_top_ngrams(samples, args.lengths, args.top, per_length=args.per_length)
    rows_a = side_rows(samples, "a", "A")
    rows_b = side_rows(samples, "b", "B")
    if args.per_siglum:
        stem, dot, ext = args.out.rpartition(".")
        if not dot:
            stem, ext = args.out, "csv"
        for tag, rows in (("A", rows_a), ("B", rows_b)):
            out = f"{stem}_{tag}.{ext}"
            write_matrix_csv(vectorize(rows, voc, mode), out)
            print(f"wrote {out}")
    else:
        write_matrix_csv(vectorize(rows_a + rows_b, voc, mode), args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_zeta(args) -> int:
    ma = read_matrix_csv(args.a)
    mb = read_matrix_csv(args.b)
    scores = burrows_zeta(ma, mb)
    write_zeta_csv(scores, args.out)
    print(f"wrote {args.out}")
    from .zeta import zeta_report

    rep = zeta_report(scores, args.top)
    if rep.no_contrast:
        print("no contrast: every zeta score is 0")
    else:
        head = ", ".join(s.feature for s in rep.preferred_in_a[:5])
        tail = ", ".join(s.feature for s in rep.preferred_in_b[:5])
        print(f"A prefers: {head}")
        print(f"B prefers: {tail}")
    if args.svg:
        write_svg("zeta_bars", scores, args.svg, {"top_k": args.top})
        print(f"wrote {args.svg}")
    return 0


def _cmd_forest(args) -> int:
    matrix = read_matrix_csv(args.matrix)
    by_id = read_labels_csv(args.labels)
    missing = [sid for sid in matrix.sample_ids if sid not in by_id]
    if missing:
        raise ScribeDistError(f"labels missing for: {', '.join(missing[:5])}")
    labels = [by_id[sid] for sid in matrix.sample_ids]
    params = ForestParams(
        n_trees=args.trees,
        max_features=(
            args.max_features if args.max_features in ("sqrt", "log2", "all")
            else int(args.max_features)
        ),
        max_depth=args.max_depth,
        min_samples_split=args.min_split,
        bootstrap=not args.no_bootstrap,
        seed=args.seed if args.seed is not None else 0,
    )
    model = train(matrix, labels, params)
    write_model(model, args.out)
    print(f"wrote {args.out}")
    if model.oob_accuracy is not None:
        print(f"OOB accuracy: {model.oob_accuracy:.4f}")
    if args.importances:
        report = mdi_importances(model)
        write_importances_csv(report, args.importances)
        print(f"wrote {args.importances}")
        if args.svg:
            write_svg("mdi_bars", rank_features(report, args.top), args.svg)
            print(f"wrote {args.svg}")
    return 0


def _read_boundaries_csv(path: str) -> list[tuple[int, str]]:
    import csv

    from .errors import MatrixFormatError
    from .textio import open_read, read_comment_header

    with open_read(path) as fh:
        _, body = read_comment_header(fh)
    rows = list(csv.reader(body))
    if not rows or rows[0] != ["pair", "label"]:
        raise MatrixFormatError(f"{path}: missing 'pair,label' header")
    return [(int(r[0]), r[1]) for r in rows[1:] if r]


def _cmd_drift(args) -> int:
    ma = read_matrix_csv(args.a)
    mb = read_matrix_csv(args.b)
    config = BootstrapConfig(
        n_subsets=args.subsets,
        subset_size=args.size,
        seed=args.seed if args.seed is not None else 0,
    )
    curve = bootstrap_drift(ma, mb, config, epsilon=args.epsilon)
    if args.boundaries:
        curve = annotate_boundaries(curve, _read_boundaries_csv(args.boundaries))
    write_drift_csv(curve, args.out)
    print(f"wrote {args.out} ({len(curve.points)} points, epsilon {curve.epsilon:g})")
    if args.svg:
        write_svg("drift_curve", curve, args.svg)
        print(f"wrote {args.svg}")
    return 0


def _cmd_run(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.out_dir:
        manifest = replace(manifest, output_dir=args.out_dir)
    if args.seed is not None:
        manifest = replace(
            manifest,
            forest=replace(manifest.forest, seed=args.seed),
            bootstrap=replace(manifest.bootstrap, seed=args.seed),
        )
    run_pipeline(manifest, echo=print)
    return 0


def _cmd_plot(args) -> int:
    if args.kind == "zeta":
        scores = read_zeta_csv(args.data)
        write_svg("zeta_bars", scores, args.out, {"top_k": args.top})
    elif args.kind == "mdi":
        pairs = read_importances_csv(args.data)
        write_svg("mdi_bars", pairs[: args.top], args.out)
    else:
        points, movements, epsilon = read_drift_csv(args.data)
        write_svg(
            "drift_curve",
            {"points": points, "movements": movements, "boundaries": []},
            args.out,
        )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scribedist", description="exemplar-copy stylometry toolkit")
    p.add_argument("--version", action="version", version=f"scribedist {__version__}")
    p.add_argument(
        "--threads",
        type=int,
        default=1,
        help="concurrency cap (execution is serial; results never depend on this)",
    )
    p.add_argument("--seed", type=int, default=None, help="override configured seeds")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("align", parents=[], help="align two manuscripts word-level")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--samples", type=int, default=None,
                    help="sample count to record in the table")
    sp.set_defaults(fn=_cmd_align)

    sp = sub.add_parser("features", help="build frequency matrices from a table")
    sp.add_argument("--table", required=True)
    sp.add_argument("--kind", choices=["words", "ngrams"], required=True)
    sp.add_argument("--lengths", type=_int_list, default=None)
    sp.add_argument("--top", type=int, required=True)
    sp.add_argument("--mode", choices=[MODE_COUNTS, MODE_RELATIVE], default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--per-length", action="store_true", dest="per_length")
    sp.add_argument("--per-siglum", action="store_true", dest="per_siglum",
                    help="write side A and side B matrices separately")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_features)

    sp = sub.add_parser("zeta", help="presence-based keyness between the sides")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--top", type=int, default=25)
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg", default=None)
    sp.set_defaults(fn=_cmd_zeta)

    sp = sub.add_parser("forest", help="train the random forest classifier")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--labels", required=True)
    sp.add_argument("--trees", type=int, default=500)
    sp.add_argument("--max-features", default="sqrt", dest="max_features")
    sp.add_argument("--max-depth", type=int, default=None, dest="max_depth")
    sp.add_argument("--min-split", type=int, default=2, dest="min_split")
    sp.add_argument("--no-bootstrap", action="store_true", dest="no_bootstrap")
    sp.add_argument("--out", required=True)
    sp.add_argument("--importances", default=None)
    sp.add_argument("--svg", default=None)
    sp.add_argument("--top", type=int, default=25)
    sp.set_defaults(fn=_cmd_forest)

    sp = sub.add_parser("drift", help="bootstrapped distance curve along the text")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--subsets", type=int, default=500)
    sp.add_argument("--size", type=int, default=500)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--boundaries", default=None, help="CSV of pair,label annotations")
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg", default=None)
    sp.set_defaults(fn=_cmd_drift)

    sp = sub.add_parser("run", help="full pipeline from a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out-dir", default=None, dest="out_dir")
    sp.set_defaults(fn=_cmd_run)

    sp = sub.add_parser("plot", help="re-render an SVG from an exported CSV")
    sp.add_argument("--kind", choices=["zeta", "mdi", "drift"], required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--top", type=int, default=25)
    sp.set_defaults(fn=_cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("scribedist: error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except VALIDATION_ERRORS as exc:
        print(f"scribedist: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"scribedist: {exc}", file=sys.stderr)
        return 1
    except (ScribeDistError, ValueError) as exc:
        print(f"scribedist: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
