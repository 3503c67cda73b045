"""End-to-end run: manifest in, full artifact directory out.

Stages run in a fixed order (corpus, align, segment, features, zeta,
forest, drift, render, report); each stage's wall time and output files
are recorded in report.json. A failing stage writes a ``run.partial``
marker naming itself into the output directory before the error
propagates, so a half-written directory is recognizable.

All randomness comes from the manifest's seeds; CSV and SVG artifacts are
byte-identical across repeated runs of the same manifest.
"""

from __future__ import annotations

import json
import os
import time
import warnings
from dataclasses import dataclass, field

from . import __version__
from .alignment import align, segment, write_table_tsv
from .corpus import load_transcription, restore_word_breaks, tokenize
from .drift import annotate_boundaries, bootstrap_drift, write_drift_csv
from .errors import PipelineError
from .features import (
    MODE_COUNTS,
    MODE_RELATIVE,
    select_mfw,
    select_top_ngrams,
    side_rows,
    vectorize,
    write_matrix_csv,
)
from .forest import (
    mdi_importances,
    rank_features,
    train,
    write_importances_csv,
    write_labels_csv,
    write_model,
)
from .manifest import RunManifest
from .svg import write_svg
from .zeta import burrows_zeta, write_zeta_csv, zeta_report

PARTIAL_MARKER = "run.partial"


@dataclass
class RunReport:
    """What a run produced: versions, seeds, timings, files, warnings."""

    version: str
    seeds: dict
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    files: dict = field(default_factory=dict)
    oob_accuracy: float | None = None

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "seeds": self.seeds,
            "timings": self.timings,
            "warnings": self.warnings,
            "files": self.files,
            "oob_accuracy": self.oob_accuracy,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class _StageClock:
    def __init__(self, report: RunReport, out_dir: str):
        self.report = report
        self.out_dir = out_dir
        self.stage = ""

    def run(self, stage: str, fn):
        self.stage = stage
        t0 = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:
            with open(os.path.join(self.out_dir, PARTIAL_MARKER), "w", encoding="utf-8") as fh:
                fh.write(f"failed at stage: {stage}\n{exc}\n")
            raise PipelineError(stage, exc) from exc
        self.report.timings[stage] = round(time.perf_counter() - t0, 6)
        return result

    def wrote(self, stage: str, *paths: str):
        self.report.files.setdefault(stage, []).extend(os.path.basename(p) for p in paths)


def run_pipeline(manifest: RunManifest, echo=None) -> RunReport:
    """Execute every stage of a paired-manuscript run.

    ``echo`` may be a callable taking one progress line (the CLI passes
    print). Returns the report, which is also written to report.json.
    """
    say = echo or (lambda line: None)
    out = manifest.output_dir
    os.makedirs(out, exist_ok=True)
    marker = os.path.join(out, PARTIAL_MARKER)
    if os.path.exists(marker):
        os.unlink(marker)

    report = RunReport(
        version=__version__,
        seeds={"forest": manifest.forest.seed, "bootstrap": manifest.bootstrap.seed},
    )
    clock = _StageClock(report, out)
    dst = lambda name: os.path.join(out, name)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")

        ms_a, ms_b = manifest.manuscripts

        def stage_corpus():
            streams = []
            for spec in (ms_a, ms_b):
                t = load_transcription(spec.path, spec.siglum)
                t = restore_word_breaks(t, markers=spec.hyphen_markers)
                streams.append(tokenize(t))
            return streams

        stream_a, stream_b = clock.run("corpus", stage_corpus)
        say(f"corpus: {len(stream_a)} + {len(stream_b)} tokens")

        def stage_align():
            table = align(
                stream_a,
                stream_b,
                manifest.scoring,
                band=manifest.band,
                max_cells=manifest.max_cells,
            )
            write_table_tsv(table, dst("table.tsv"), n_samples=manifest.n_samples)
            return table

        table = clock.run("align", stage_align)
        clock.wrote("align", "table.tsv")
        say(f"align: {len(table)} rows, score {table.score:g}")

        samples = clock.run("segment", lambda: segment(table, manifest.n_samples))
        say(f"segment: {len(samples)} sample pairs")

        def stage_features():
            rows_a = side_rows(samples, "a", ms_a.siglum)
            rows_b = side_rows(samples, "b", ms_b.siglum)
            mfw = select_mfw(samples, manifest.mfw_k)
            words_a = vectorize(rows_a, mfw, MODE_COUNTS)
            words_b = vectorize(rows_b, mfw, MODE_COUNTS)
            grams = select_top_ngrams(
                samples,
                manifest.ngram_lengths,
                manifest.ngram_k,
                per_length=manifest.ngram_per_length,
            )
            ngrams_a = vectorize(rows_a, grams, MODE_RELATIVE)
            ngrams_b = vectorize(rows_b, grams, MODE_RELATIVE)
            combined = vectorize(rows_a + rows_b, grams, MODE_RELATIVE)
            labels = [(sid, ms_a.siglum) for sid, _ in rows_a]
            labels += [(sid, ms_b.siglum) for sid, _ in rows_b]
            write_matrix_csv(words_a, dst("words_A.csv"))
            write_matrix_csv(words_b, dst("words_B.csv"))
            write_matrix_csv(ngrams_a, dst("ngrams_A.csv"))
            write_matrix_csv(ngrams_b, dst("ngrams_B.csv"))
            write_matrix_csv(combined, dst("ngrams.csv"))
            write_labels_csv(labels, dst("labels.csv"))
            return words_a, words_b, ngrams_a, ngrams_b, combined, labels

        words_a, words_b, ngrams_a, ngrams_b, combined, labels = clock.run(
            "features", stage_features
        )
        clock.wrote(
            "features",
            "words_A.csv", "words_B.csv", "ngrams_A.csv", "ngrams_B.csv",
            "ngrams.csv", "labels.csv",
        )
        say(
            f"features: {len(words_a.vocabulary.features)} words, "
            f"{len(combined.vocabulary.features)} n-grams"
        )

        def stage_zeta():
            scores = burrows_zeta(words_a, words_b)
            write_zeta_csv(scores, dst("zeta.csv"))
            return scores

        zeta_scores = clock.run("zeta", stage_zeta)
        clock.wrote("zeta", "zeta.csv")

        def stage_forest():
            model = train(combined, [lbl for _, lbl in labels], manifest.forest)
            write_model(model, dst("model.rf"))
            mdi = mdi_importances(model)
            write_importances_csv(mdi, dst("mdi.csv"))
            return model, mdi

        model, mdi = clock.run("forest", stage_forest)
        clock.wrote("forest", "model.rf", "mdi.csv")
        report.oob_accuracy = model.oob_accuracy
        if model.oob_accuracy is not None:
            say(f"forest: OOB accuracy {model.oob_accuracy:.4f}")

        def stage_drift():
            curve = bootstrap_drift(ngrams_a, ngrams_b, manifest.bootstrap)
            curve = annotate_boundaries(curve, manifest.boundaries)
            write_drift_csv(curve, dst("drift.csv"))
            return curve

        curve = clock.run("drift", stage_drift)
        clock.wrote("drift", "drift.csv")
        say(f"drift: {len(curve.points)} points, epsilon {curve.epsilon:g}")

        def stage_render():
            write_svg("zeta_bars", zeta_scores, dst("zeta.svg"), {"top_k": 25})
            write_svg("mdi_bars", rank_features(mdi, 25), dst("mdi.svg"))
            write_svg("drift_curve", curve, dst("drift.svg"))

        clock.run("render", stage_render)
        clock.wrote("render", "zeta.svg", "mdi.svg", "drift.svg")

        report.warnings = [str(w.message) for w in caught]

    def stage_report():
        with open(dst("report.json"), "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_json())
        missing = [
            name
            for names in report.files.values()
            for name in names
            if not os.path.isfile(dst(name))
        ]
        if missing:
            raise FileNotFoundError(f"artifacts vanished: {', '.join(missing)}")

    clock.run("report", stage_report)
    clock.wrote("report", "report.json")
    # keep the on-disk report's timing for its own stage
    with open(dst("report.json"), "w", encoding="utf-8", newline="") as fh:
        fh.write(report.to_json())
    say(f"report: {dst('report.json')}")
    return report
