"""Random forest classifier written from first principles.

Trees are CART with Gini impurity: at each node a random feature subset is
scanned, candidate thresholds are midpoints between consecutive distinct
sorted values, and the split maximizing the impurity decrease

    gini(parent) - (nL/n) * gini(left) - (nR/n) * gini(right)

wins. Ties break toward the lowest feature index, then the lowest
threshold; rows with value <= threshold go left. Feature importance is
mean decrease in impurity: per tree, each split contributes its decrease
weighted by the fraction of that tree's samples reaching the node; the
per-tree vectors are averaged and normalized to sum 1.

Every tree draws its randomness from an independent stream derived from
(seed, tree index), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import MatrixFormatError, ScribeDistWarning
from .features import KIND_NGRAMS, FrequencyMatrix, Vocabulary
from .textio import csv_writer, fmt_float, open_read, open_write

MAX_FEATURES_CHOICES = ("sqrt", "log2", "all")


def gini(class_counts: Sequence[int]) -> float:
    """Gini impurity 1 - sum(p_i^2) of a class count vector."""
    counts = [int(c) for c in class_counts]
    if any(c < 0 for c in counts):
        raise ValueError("class counts must be non-negative")
    total = sum(counts)
    if total == 0:
        raise ValueError("class counts must not all be zero")
    return 1.0 - sum((c / total) ** 2 for c in counts)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 500
    max_features: Union[str, int] = "sqrt"
    max_depth: Optional[int] = None
    min_samples_split: int = 2
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if isinstance(self.max_features, str):
            if self.max_features not in MAX_FEATURES_CHOICES:
                raise ValueError(
                    f"max_features must be one of {MAX_FEATURES_CHOICES} or an int"
                )
        elif self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class Leaf:
    class_counts: tuple[int, ...]


@dataclass(frozen=True)
class Split:
    feature_index: int
    threshold: float
    impurity_decrease: float
    n_node_samples: int
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[Node, ...]
    params: ForestParams
    vocabulary: Vocabulary
    labels: tuple[str, ...]
    oob_accuracy: Optional[float]


@dataclass(frozen=True)
class ImportanceReport:
    features: tuple[str, ...]
    values: tuple[float, ...]  # normalized, sums to 1 unless all zero


def _resolve_max_features(spec: Union[str, int], n_features: int) -> int:
    if spec == "sqrt":
        k = int(math.sqrt(n_features))
    elif spec == "log2":
        k = int(math.log2(n_features)) if n_features > 1 else 1
    elif spec == "all":
        k = n_features
    else:
        k = int(spec)
    return max(1, min(k, n_features))


def _tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    # independent stream per tree, derived from (seed, index)
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(tree_index,)))
    )


def _best_split(X, y, idx, n_classes, cand_features, parent_gini):
    """Scan candidate features for the best midpoint split.

    Returns (decrease, feature, threshold) or None. Candidates are visited
    in ascending feature order and only a strictly better decrease replaces
    the incumbent, so ties resolve to the lowest feature index; within one
    feature the first-best boundary wins, i.e. the lowest threshold.
    """
    n = len(idx)
    ysub = y[idx]
    best = None
    for f in cand_features:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = ysub[order]
        boundary = np.nonzero(sv[1:] != sv[:-1])[0]
        if boundary.size == 0:
            continue  # constant feature here: silently unsplittable
        onehot = np.zeros((n, n_classes), dtype=np.float64)
        onehot[np.arange(n), sy] = 1.0
        cum = np.cumsum(onehot, axis=0)
        n_left = (boundary + 1).astype(np.float64)
        n_right = n - n_left
        left_counts = cum[boundary]
        right_counts = cum[-1] - left_counts
        # (nL/n)*gini(L) = (nL - sum(cL^2)/nL) / n
        wl = (n_left - (left_counts**2).sum(axis=1) / n_left) / n
        wr = (n_right - (right_counts**2).sum(axis=1) / n_right) / n
        dec = parent_gini - wl - wr
        p = int(np.argmax(dec))
        d = float(dec[p])
        if best is None or d > best[0]:
            b = boundary[p]
            thr = float((sv[b] + sv[b + 1]) / 2.0)
            best = (d, int(f), thr)
    return best


def _grow(X, y, idx, depth, rng, params, n_classes) -> Node:
    counts = np.bincount(y[idx], minlength=n_classes)
    pure = counts.max() == len(idx)
    at_depth = params.max_depth is not None and depth >= params.max_depth
    if pure or at_depth or len(idx) < params.min_samples_split:
        return Leaf(class_counts=tuple(int(c) for c in counts))
    k = _resolve_max_features(params.max_features, X.shape[1])
    cand = np.sort(rng.choice(X.shape[1], size=k, replace=False))
    parent = gini(counts)
    best = _best_split(X, y, idx, n_classes, cand, parent)
    if best is None or best[0] <= 0.0:
        return Leaf(class_counts=tuple(int(c) for c in counts))
    dec, f, thr = best
    mask = X[idx, f] <= thr
    left = _grow(X, y, idx[mask], depth + 1, rng, params, n_classes)
    right = _grow(X, y, idx[~mask], depth + 1, rng, params, n_classes)
    return Split(
        feature_index=f,
        threshold=thr,
        impurity_decrease=dec,
        n_node_samples=int(len(idx)),
        left=left,
        right=right,
    )


def _route(node: Node, row: np.ndarray) -> Leaf:
    while isinstance(node, Split):
        node = node.left if row[node.feature_index] <= node.threshold else node.right
    return node


def _leaf_vote(leaf: Leaf) -> int:
    counts = leaf.class_counts
    return max(range(len(counts)), key=lambda c: (counts[c], -c))


def train(
    matrix: FrequencyMatrix, labels: Sequence[str], params: Optional[ForestParams] = None
) -> RandomForestModel:
    """Fit a forest on a frequency matrix with one label per sample row.

    The model's label order is the sorted distinct labels; prediction ties
    break toward the earlier label. With bootstrap on, out-of-bag accuracy
    is computed from majority votes of the trees that did not see each row.
    """
    params = params or ForestParams()
    if len(labels) != matrix.n_samples:
        raise ValueError("need exactly one label per sample row")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("training needs at least two distinct labels")
    if matrix.n_samples < 2:
        raise ValueError("training needs at least two samples")
    class_of = {c: i for i, c in enumerate(classes)}
    X = np.asarray(matrix.values, dtype=np.float64)
    y = np.array([class_of[l] for l in labels], dtype=np.int64)
    n, _ = X.shape

    trees: list[Node] = []
    oob_votes = np.zeros((n, len(classes)), dtype=np.int64)
    for t in range(params.n_trees):
        rng = _tree_rng(params.seed, t)
        if params.bootstrap:
            sample_idx = rng.integers(0, n, size=n)
        else:
            sample_idx = np.arange(n)
        root = _grow(X, y, sample_idx, 0, rng, params, len(classes))
        trees.append(root)
        if params.bootstrap:
            in_bag = np.zeros(n, dtype=bool)
            in_bag[sample_idx] = True
            for r in np.nonzero(~in_bag)[0]:
                oob_votes[r, _leaf_vote(_route(root, X[r]))] += 1

    oob_accuracy: Optional[float] = None
    if params.bootstrap:
        voted = oob_votes.sum(axis=1) > 0
        if voted.any():
            pred = np.argmax(oob_votes[voted], axis=1)  # first max = earlier label
            oob_accuracy = float(np.mean(pred == y[voted]))
        else:
            warnings.warn("no sample was ever out of bag", ScribeDistWarning)
    return RandomForestModel(
        trees=tuple(trees),
        params=params,
        vocabulary=matrix.vocabulary,
        labels=classes,
        oob_accuracy=oob_accuracy,
    )


def predict(model: RandomForestModel, row: Sequence[float]) -> tuple[str, dict[str, float]]:
    """Majority vote over trees; returns the label and per-label fractions."""
    x = np.asarray(row, dtype=np.float64)
    if x.shape != (len(model.vocabulary.features),):
        raise ValueError(
            f"row has {x.shape} values, model expects {len(model.vocabulary.features)}"
        )
    votes = np.zeros(len(model.labels), dtype=np.int64)
    for tree in model.trees:
        votes[_leaf_vote(_route(tree, x))] += 1
    winner = int(np.argmax(votes))
    fractions = {lbl: float(v) / len(model.trees) for lbl, v in zip(model.labels, votes)}
    return model.labels[winner], fractions


def mdi_importances(model: RandomForestModel) -> ImportanceReport:
    """Mean decrease in impurity per feature, normalized to sum 1.

    Each split adds (n_node_samples / n_root_samples) * impurity_decrease
    to its feature, per tree; tree vectors are averaged before normalizing.
    All-zero importances (all-leaf trees) normalize to zeros with a warning.
    """
    n_features = len(model.vocabulary.features)
    acc = np.zeros(n_features, dtype=np.float64)
    for tree in model.trees:
        if isinstance(tree, Leaf):
            continue
        root_n = tree.n_node_samples
        stack = [tree]
        while stack:
            node = stack.pop()
            if isinstance(node, Split):
                acc[node.feature_index] += (
                    node.n_node_samples / root_n
                ) * node.impurity_decrease
                stack.append(node.left)
                stack.append(node.right)
    mean = acc / len(model.trees)
    total = mean.sum()
    if total == 0.0:
        warnings.warn("all importances are zero; nothing was split", ScribeDistWarning)
        values = tuple(0.0 for _ in range(n_features))
    else:
        values = tuple(float(v) for v in mean / total)
    return ImportanceReport(features=model.vocabulary.features, values=values)


def rank_features(report: ImportanceReport, k: int) -> list[tuple[str, float]]:
    """Top-k features by importance; ties break lexicographically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pairs = sorted(zip(report.features, report.values), key=lambda fv: (-fv[1], fv[0]))
    return pairs[:k]


# ---------------------------------------------------------------------------
# model (de)serialization: versioned plain text, exact float round-trip


def _write_node(fh, node: Node):
    if isinstance(node, Leaf):
        fh.write("leaf " + " ".join(str(c) for c in node.class_counts) + "\n")
    else:
        fh.write(
            f"split {node.feature_index} {node.threshold!r} "
            f"{node.impurity_decrease!r} {node.n_node_samples}\n"
        )
        _write_node(fh, node.left)
        _write_node(fh, node.right)


def write_model(model: RandomForestModel, path: str):
    p, voc = model.params, model.vocabulary
    with open_write(path) as fh:
        fh.write("scribedist-forest v1\n")
        fh.write("labels " + " ".join(model.labels) + "\n")
        fh.write(f"n_trees {p.n_trees}\n")
        fh.write(f"max_features {p.max_features}\n")
        fh.write(f"max_depth {'none' if p.max_depth is None else p.max_depth}\n")
        fh.write(f"min_samples_split {p.min_samples_split}\n")
        fh.write(f"bootstrap {'true' if p.bootstrap else 'false'}\n")
        fh.write(f"seed {p.seed}\n")
        fh.write(
            "oob_accuracy "
            + ("none" if model.oob_accuracy is None else repr(model.oob_accuracy))
            + "\n"
        )
        fh.write(f"vocab_kind {voc.kind}\n")
        fh.write("vocab_lengths " + ",".join(str(n) for n in voc.ngram_lengths) + "\n")
        fh.write(f"vocab_selection {voc.selection_size}\n")
        fh.write(f"features {len(voc.features)}\n")
        for f in voc.features:
            fh.write(f + "\n")
        for tree in model.trees:
            fh.write("tree\n")
            _write_node(fh, tree)


class _Lines:
    def __init__(self, lines: list[str], path: str):
        self.lines = lines
        self.pos = 0
        self.path = path

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise MatrixFormatError(f"{self.path}: truncated model file")
        ln = self.lines[self.pos]
        self.pos += 1
        return ln


def _read_node(src: _Lines) -> Node:
    ln = src.next()
    if ln.startswith("leaf "):
        return Leaf(class_counts=tuple(int(c) for c in ln.split()[1:]))
    if ln.startswith("split "):
        _, f, thr, dec, nn = ln.split()
        left = _read_node(src)
        right = _read_node(src)
        return Split(
            feature_index=int(f),
            threshold=float(thr),
            impurity_decrease=float(dec),
            n_node_samples=int(nn),
            left=left,
            right=right,
        )
    raise MatrixFormatError(f"{src.path}: unexpected model line {ln!r}")


def read_model(path: str) -> RandomForestModel:
    with open_read(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    src = _Lines(lines, path)
    if src.next() != "scribedist-forest v1":
        raise MatrixFormatError(f"{path}: not a model file")
    labels = tuple(src.next().split()[1:])
    fields: dict[str, str] = {}
    for _ in range(11):  # n_trees .. features
        key, _, val = src.next().partition(" ")
        fields[key] = val
    mf: Union[str, int] = fields["max_features"]
    if mf not in MAX_FEATURES_CHOICES:
        mf = int(mf)
    params = ForestParams(
        n_trees=int(fields["n_trees"]),
        max_features=mf,
        max_depth=None if fields["max_depth"] == "none" else int(fields["max_depth"]),
        min_samples_split=int(fields["min_samples_split"]),
        bootstrap=fields["bootstrap"] == "true",
        seed=int(fields["seed"]),
    )
    oob = None if fields["oob_accuracy"] == "none" else float(fields["oob_accuracy"])
    lengths = tuple(
        int(x) for x in fields["vocab_lengths"].split(",") if x
    )
    n_feats = int(fields["features"])
    features = tuple(src.next() for _ in range(n_feats))
    voc = Vocabulary(
        kind=fields["vocab_kind"],
        features=features,
        ngram_lengths=lengths if fields["vocab_kind"] == KIND_NGRAMS else (),
        selection_size=int(fields["vocab_selection"]),
    )
    trees: list[Node] = []
    while src.pos < len(src.lines):
        ln = src.next()
        if not ln:
            continue
        if ln != "tree":
            raise MatrixFormatError(f"{path}: expected 'tree', got {ln!r}")
        trees.append(_read_node(src))
    if len(trees) != params.n_trees:
        raise MatrixFormatError(
            f"{path}: header promises {params.n_trees} trees, found {len(trees)}"
        )
    return RandomForestModel(
        trees=tuple(trees),
        params=params,
        vocabulary=voc,
        labels=labels,
        oob_accuracy=oob,
    )


def write_importances_csv(report: ImportanceReport, path: str):
    """All features sorted by importance, one row each."""
    with open_write(path) as fh:
        fh.write("# scribedist-mdi v1\n")
        w = csv_writer(fh)
        w.writerow(["feature", "mdi"])
        for f, v in rank_features(report, len(report.features)):
            w.writerow([f, fmt_float(v)])


def read_importances_csv(path: str) -> list[tuple[str, float]]:
    import csv as _csv

    from .textio import read_comment_header

    with open_read(path) as fh:
        _, body = read_comment_header(fh)
    rows = list(_csv.reader(body))
    if not rows or rows[0] != ["feature", "mdi"]:
        raise MatrixFormatError(f"{path}: missing importance header")
    out = []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 2:
            raise MatrixFormatError(f"{path}: malformed importance row {r!r}")
        out.append((r[0], float(r[1])))
    if not out:
        raise MatrixFormatError(f"{path}: no importance rows")
    return out


def read_labels_csv(path: str) -> dict[str, str]:
    """sample_id,label pairs used to supervise training."""
    import csv as _csv

    from .textio import read_comment_header

    with open_read(path) as fh:
        _, body = read_comment_header(fh)
    rows = list(_csv.reader(body))
    if not rows or rows[0] != ["sample_id", "label"]:
        raise MatrixFormatError(f"{path}: missing 'sample_id,label' header")
    out: dict[str, str] = {}
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 2:
            raise MatrixFormatError(f"{path}: malformed label row {r!r}")
        if r[0] in out:
            raise MatrixFormatError(f"{path}: duplicate sample id {r[0]!r}")
        out[r[0]] = r[1]
    if not out:
        raise MatrixFormatError(f"{path}: no label rows")
    return out


def write_labels_csv(pairs: Sequence[tuple[str, str]], path: str):
    with open_write(path) as fh:
        w = csv_writer(fh)
        w.writerow(["sample_id", "label"])
        for sid, lbl in pairs:
            w.writerow([sid, lbl])
