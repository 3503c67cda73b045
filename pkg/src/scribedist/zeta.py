"""Burrows' Zeta keyness in its classic presence-based form.

For a feature f, zeta(f) = (fraction of manuscript-A samples containing f
at least once) - (fraction of B samples containing it). Values near +1 mark
words the first scribe keeps using where the second avoids them; near -1
the reverse. Presence ignores magnitude, so the measure is insensitive to
how often a word occurs once it occurs at all.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MatrixFormatError, ScribeDistWarning
from .features import MODE_COUNTS, FrequencyMatrix
from .textio import csv_writer, fmt_float, open_read, open_write, read_comment_header


@dataclass(frozen=True)
class ZetaScore:
    feature: str
    prop_a: float
    prop_b: float
    zeta: float


@dataclass(frozen=True)
class ZetaReport:
    """Top slices of both ends of the zeta ranking."""

    preferred_in_a: tuple[ZetaScore, ...]
    preferred_in_b: tuple[ZetaScore, ...]
    no_contrast: bool


def burrows_zeta(counts_a: FrequencyMatrix, counts_b: FrequencyMatrix) -> list[ZetaScore]:
    """Score every shared feature; returns the list sorted by descending
    zeta, ties broken lexicographically by feature.

    Both matrices must be in counts mode over the identical vocabulary.
    Sample counts may differ between the two sides.
    """
    if counts_a.mode != MODE_COUNTS or counts_b.mode != MODE_COUNTS:
        raise ValueError("zeta requires counts-mode matrices")
    if counts_a.vocabulary.features != counts_b.vocabulary.features:
        raise ValueError("matrices must share one vocabulary")
    if counts_a.n_samples == 0 or counts_b.n_samples == 0:
        raise ValueError("both sides need at least one sample")
    prop_a = (counts_a.values > 0).mean(axis=0)
    prop_b = (counts_b.values > 0).mean(axis=0)
    scores = [
        ZetaScore(feature=f, prop_a=float(pa), prop_b=float(pb), zeta=float(pa - pb))
        for f, pa, pb in zip(counts_a.vocabulary.features, prop_a, prop_b)
    ]
    scores.sort(key=lambda s: (-s.zeta, s.feature))
    return scores


def zeta_report(scores: list[ZetaScore], top_k: int) -> ZetaReport:
    """Take the k strongest features per side from a sorted score list."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if top_k > len(scores):
        warnings.warn(
            f"requested top {top_k} of {len(scores)} features; truncating",
            ScribeDistWarning,
        )
        top_k = len(scores)
    by_desc = sorted(scores, key=lambda s: (-s.zeta, s.feature))
    by_asc = sorted(scores, key=lambda s: (s.zeta, s.feature))
    return ZetaReport(
        preferred_in_a=tuple(by_desc[:top_k]),
        preferred_in_b=tuple(by_asc[:top_k]),
        no_contrast=all(s.zeta == 0.0 for s in scores),
    )


def write_zeta_csv(scores: list[ZetaScore], path: str):
    with open_write(path) as fh:
        fh.write("# scribedist-zeta v1\n")
        w = csv_writer(fh)
        w.writerow(["feature", "prop_a", "prop_b", "zeta"])
        for s in scores:
            w.writerow([s.feature, fmt_float(s.prop_a), fmt_float(s.prop_b), fmt_float(s.zeta)])


def read_zeta_csv(path: str) -> list[ZetaScore]:
    import csv as _csv

    with open_read(path) as fh:
        _, body = read_comment_header(fh)
    rows = list(_csv.reader(body))
    if not rows or rows[0] != ["feature", "prop_a", "prop_b", "zeta"]:
        raise MatrixFormatError(f"{path}: missing zeta header")
    out = []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 4:
            raise MatrixFormatError(f"{path}: malformed zeta row {r!r}")
        out.append(
            ZetaScore(feature=r[0], prop_a=float(r[1]), prop_b=float(r[2]), zeta=float(r[3]))
        )
    if not out:
        raise MatrixFormatError(f"{path}: no zeta rows")
    return out
