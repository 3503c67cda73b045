"""Bootstrapped divergence curve between two manuscripts along the text.

For each sample pair the cosine distance between the two relative n-gram
frequency rows is resampled over random feature subsets (drawn without
replacement), giving a distribution per position instead of a single
number. The median with a 5th..95th percentile band makes stretches of
genuine drift distinguishable from feature-choice noise.

Step labels summarize the trajectory: a median rising by more than epsilon
is Increasing, falling by more is Narrowing, anything else Consistent.
The default epsilon is half the median band width, so "meaningful" scales
with the curve's own uncertainty.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import MatrixFormatError
from .features import MODE_RELATIVE, FrequencyMatrix
from .textio import csv_writer, fmt_float, open_read, open_write, read_comment_header

MOVE_INCREASING = "Increasing"
MOVE_NARROWING = "Narrowing"
MOVE_CONSISTENT = "Consistent"


@dataclass(frozen=True)
class BootstrapConfig:
    n_subsets: int = 500
    subset_size: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.n_subsets < 1:
            raise ValueError("n_subsets must be >= 1")
        if self.subset_size < 1:
            raise ValueError("subset_size must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class DriftPoint:
    """Distance distribution summary at one sample pair.

    Statistics are None when every resampled distance was undefined (a
    zero vector on either side); such a point is skipped.
    """

    pair_index: int
    median: Optional[float]
    p05: Optional[float]
    p95: Optional[float]
    mean: Optional[float]
    sd: Optional[float]
    n_defined: int

    @property
    def skipped(self) -> bool:
        return self.n_defined == 0


@dataclass(frozen=True)
class DriftCurve:
    """Per-pair drift points plus step movement labels.

    ``movements[i]`` labels the step from point i to point i+1; None when
    either endpoint is skipped. ``boundaries`` carries (pair_index, label)
    annotations such as scribal hand changes.
    """

    points: tuple[DriftPoint, ...]
    config: BootstrapConfig
    movements: tuple[Optional[str], ...]
    epsilon: float
    boundaries: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if len(self.movements) != max(0, len(self.points) - 1):
            raise ValueError("movements must have one entry per step")
        for idx, _ in self.boundaries:
            if not 0 <= idx < len(self.points):
                raise ValueError(f"boundary index {idx} out of range")


def _distance_or_none(u: np.ndarray, v: np.ndarray) -> Optional[float]:
    nu = float(np.sqrt(np.dot(u, u)))
    nv = float(np.sqrt(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return None
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    # float noise can leave the unit interval by an ulp or two
    return min(1.0, max(0.0, d))


def cosine_distance(u: Sequence[float], v: Sequence[float]) -> float:
    """1 - cosine similarity, clamped to [0, 1]; zero vectors are an error."""
    ua = np.asarray(u, dtype=np.float64)
    va = np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape:
        raise ValueError("vectors must have equal length")
    d = _distance_or_none(ua, va)
    if d is None:
        raise ValueError("cosine distance undefined for a zero vector")
    return d


def _subset_rng(seed: int, subset_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(subset_index,)))
    )


def default_epsilon(points: Sequence[DriftPoint]) -> float:
    """Half the median p05..p95 band width over non-skipped points."""
    spreads = [p.p95 - p.p05 for p in points if not p.skipped]
    if not spreads:
        return 0.0
    return 0.5 * float(np.median(spreads))


def _label_steps(
    points: Sequence[DriftPoint], epsilon: float
) -> tuple[Optional[str], ...]:
    labels: list[Optional[str]] = []
    for prev, cur in zip(points, points[1:]):
        if prev.skipped or cur.skipped:
            labels.append(None)
            continue
        delta = cur.median - prev.median
        if delta > epsilon:
            labels.append(MOVE_INCREASING)
        elif delta < -epsilon:
            labels.append(MOVE_NARROWING)
        else:
            labels.append(MOVE_CONSISTENT)
    return tuple(labels)


def classify_movements(
    curve: DriftCurve, epsilon: Optional[float] = None
) -> tuple[Optional[str], ...]:
    """Relabel the curve's steps, optionally with an explicit epsilon."""
    eps = default_epsilon(curve.points) if epsilon is None else float(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be non-negative")
    return _label_steps(curve.points, eps)


def bootstrap_drift(
    ma: FrequencyMatrix,
    mb: FrequencyMatrix,
    config: Optional[BootstrapConfig] = None,
    *,
    epsilon: Optional[float] = None,
) -> DriftCurve:
    """Resample per-pair cosine distances over random feature subsets.

    Both matrices must be relative-mode over the same vocabulary with the
    same number of samples (row i of each side is sample pair i). Subset
    indices are drawn without replacement and sorted, so a subset covering
    the whole vocabulary reproduces the plain full-vector distance
    exactly. Undefined distances (zero vectors) are dropped; a pair with
    no defined distance at all is skipped.
    """
    config = config or BootstrapConfig()
    if ma.vocabulary.features != mb.vocabulary.features:
        raise ValueError("matrices must share one vocabulary")
    if ma.mode != MODE_RELATIVE or mb.mode != MODE_RELATIVE:
        raise ValueError("drift requires relative-mode matrices")
    if ma.n_samples != mb.n_samples:
        raise ValueError("matrices must pair the same number of samples")
    n_pairs = ma.n_samples
    n_features = len(ma.vocabulary.features)
    if config.subset_size > n_features:
        raise ValueError(
            f"subset_size {config.subset_size} exceeds vocabulary size {n_features}"
        )

    dists = np.full((n_pairs, config.n_subsets), np.nan)
    for s in range(config.n_subsets):
        rng = _subset_rng(config.seed, s)
        idx = np.sort(rng.choice(n_features, size=config.subset_size, replace=False))
        # column fancy-indexing yields an F-ordered copy whose strided rows
        # would push np.dot down a different accumulation path than the
        # original contiguous rows, breaking full-vocabulary exactness
        a_sub = np.ascontiguousarray(ma.values[:, idx])
        b_sub = np.ascontiguousarray(mb.values[:, idx])
        for p in range(n_pairs):
            d = _distance_or_none(a_sub[p], b_sub[p])
            if d is not None:
                dists[p, s] = d

    points: list[DriftPoint] = []
    for p in range(n_pairs):
        row = dists[p]
        defined = row[~np.isnan(row)]
        if defined.size == 0:
            points.append(
                DriftPoint(
                    pair_index=p, median=None, p05=None, p95=None,
                    mean=None, sd=None, n_defined=0,
                )
            )
            continue
        p05, med, p95 = np.percentile(defined, [5.0, 50.0, 95.0])
        points.append(
            DriftPoint(
                pair_index=p,
                median=float(med),
                p05=float(p05),
                p95=float(p95),
                mean=float(np.mean(defined)),
                sd=float(np.std(defined)),
                n_defined=int(defined.size),
            )
        )

    pts = tuple(points)
    eps = default_epsilon(pts) if epsilon is None else float(epsilon)
    return DriftCurve(
        points=pts,
        config=config,
        movements=_label_steps(pts, eps),
        epsilon=eps,
    )


def annotate_boundaries(
    curve: DriftCurve, boundaries: Sequence[tuple[int, str]]
) -> DriftCurve:
    """Attach (pair_index, label) annotations; indices must be in range."""
    return replace(curve, boundaries=tuple((int(i), str(s)) for i, s in boundaries))


def write_drift_csv(curve: DriftCurve, path: str):
    """One row per pair; the movement column describes the arriving step,
    so the first row's is blank. Skipped pairs have empty statistics."""
    with open_write(path) as fh:
        fh.write("# scribedist-drift v1\n")
        fh.write(f"# epsilon: {fmt_float(curve.epsilon)}\n")
        w = csv_writer(fh)
        w.writerow(["pair", "median", "p05", "p95", "mean", "sd", "movement"])
        for p in curve.points:
            move = ""
            if p.pair_index > 0:
                lbl = curve.movements[p.pair_index - 1]
                move = lbl if lbl is not None else ""
            if p.skipped:
                w.writerow([p.pair_index, "", "", "", "", "", move])
            else:
                w.writerow(
                    [
                        p.pair_index,
                        fmt_float(p.median),
                        fmt_float(p.p05),
                        fmt_float(p.p95),
                        fmt_float(p.mean),
                        fmt_float(p.sd),
                        move,
                    ]
                )


def read_drift_csv(path: str) -> tuple[list[DriftPoint], list[Optional[str]], float]:
    """Re-read an exported curve: points, step labels, epsilon."""
    import csv as _csv

    with open_read(path) as fh:
        comments, body = read_comment_header(fh)
    epsilon = 0.0
    for c in comments:
        if c.startswith("epsilon:"):
            epsilon = float(c.split(":", 1)[1])
    rows = list(_csv.reader(body))
    header = ["pair", "median", "p05", "p95", "mean", "sd", "movement"]
    if not rows or rows[0] != header:
        raise MatrixFormatError(f"{path}: missing drift header")
    points: list[DriftPoint] = []
    movements: list[Optional[str]] = []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 7:
            raise MatrixFormatError(f"{path}: malformed drift row {r!r}")
        idx = int(r[0])
        if r[1] == "":
            points.append(
                DriftPoint(
                    pair_index=idx, median=None, p05=None, p95=None,
                    mean=None, sd=None, n_defined=0,
                )
            )
        else:
            points.append(
                DriftPoint(
                    pair_index=idx,
                    median=float(r[1]),
                    p05=float(r[2]),
                    p95=float(r[3]),
                    mean=float(r[4]),
                    sd=float(r[5]),
                    n_defined=-1,  # count not serialized
                )
            )
        if idx > 0:
            movements.append(r[6] if r[6] else None)
    if not points:
        raise MatrixFormatError(f"{path}: no drift rows")
    return points, movements, epsilon
