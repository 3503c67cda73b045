"""Frequency features over aligned samples: most-frequent words and
character n-grams.

Character n-grams are taken over the running text of a sample: token
grapheme clusters joined with an underscore standing in for the word
boundary (punctuation tokens included, so a 3-gram can span "t_e" or
"n_.").  Windows never cross sample boundaries. Counts divide by the
sample's own emitted unit total in relative mode, so rows are comparable
across samples of slightly different length.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .alignment import SamplePair
from .corpus import Token, segment_graphemes, word_tokens
from .errors import MatrixFormatError, ScribeDistWarning
from .textio import csv_writer, fmt_float, open_read, open_write, read_comment_header

SEPARATOR = "_"

KIND_WORDS = "words"
KIND_NGRAMS = "char_ngrams"

MODE_COUNTS = "counts"
MODE_RELATIVE = "relative"


@dataclass(frozen=True)
class Vocabulary:
    """An ordered feature list of one kind.

    ``selection_size`` records how many features were requested; the list
    may be shorter when the corpus offers fewer. Order is the column order
    of every matrix built from this vocabulary.
    """

    kind: str
    features: tuple[str, ...]
    ngram_lengths: tuple[int, ...] = ()
    selection_size: int = 0

    def __post_init__(self):
        if self.kind not in (KIND_WORDS, KIND_NGRAMS):
            raise ValueError(f"unknown vocabulary kind {self.kind!r}")
        if not self.features:
            raise ValueError("vocabulary must not be empty")
        if len(set(self.features)) != len(self.features):
            raise ValueError("vocabulary features must be unique")
        if self.kind == KIND_NGRAMS:
            if not self.ngram_lengths:
                raise ValueError("char_ngrams vocabulary needs ngram_lengths")
            if any(n < 1 for n in self.ngram_lengths):
                raise ValueError("ngram lengths must be >= 1")
            if tuple(sorted(set(self.ngram_lengths))) != self.ngram_lengths:
                raise ValueError("ngram_lengths must be sorted and unique")
            allowed = set(self.ngram_lengths)
            for f in self.features:
                if len(segment_graphemes(f)) not in allowed:
                    raise ValueError(
                        f"feature {f!r} has a cluster length outside {allowed}"
                    )
        elif self.ngram_lengths:
            raise ValueError("word vocabulary must not set ngram_lengths")


@dataclass(frozen=True, eq=False)
class FrequencyMatrix:
    """Samples x features matrix in counts or relative mode.

    ``values`` is read-only float64; counts mode holds non-negative
    integers, relative mode holds fractions of the sample's unit total
    (row sums cannot exceed 1).
    """

    sample_ids: tuple[str, ...]
    vocabulary: Vocabulary
    values: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in (MODE_COUNTS, MODE_RELATIVE):
            raise ValueError(f"unknown matrix mode {self.mode!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(self.sample_ids), len(self.vocabulary.features)):
            raise ValueError(
                f"values shape {vals.shape} does not match "
                f"{len(self.sample_ids)} samples x {len(self.vocabulary.features)} features"
            )
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ValueError("sample ids must be unique")
        if np.any(vals < 0):
            raise ValueError("frequencies must be non-negative")
        if self.mode == MODE_COUNTS and not np.all(vals == np.floor(vals)):
            raise ValueError("counts mode requires integral values")
        if self.mode == MODE_RELATIVE:
            if np.any(vals > 1.0):
                raise ValueError("relative frequencies must be <= 1")
            sums = vals.sum(axis=1)
            if np.any(sums > 1.0 + 1e-9):
                raise ValueError("relative row sums must not exceed 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)


def extract_char_ngrams(tokens: Sequence[Token], n: int) -> Counter:
    """Count n-grams of grapheme clusters over a token sequence.

    Tokens are joined by a single separator cluster; a sequence with T
    total clusters (tokens plus separators) yields max(0, T - n + 1)
    windows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    seq: list[str] = []
    for k, tok in enumerate(tokens):
        if k:
            seq.append(SEPARATOR)
        seq.extend(tok.graphemes)
    counts: Counter = Counter()
    for i in range(len(seq) - n + 1):
        counts["".join(seq[i : i + n])] += 1
    return counts


def _ranked(counter: Counter, k: int) -> list[str]:
    return [f for f, _ in sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]]


def select_mfw(samples: Iterable[SamplePair], k: int) -> Vocabulary:
    """Pick the k most frequent word forms across both sides of all samples.

    Punctuation tokens are excluded. Ranking pools the two manuscripts;
    ties break lexicographically. Warns when the corpus has fewer than k
    distinct words.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter = Counter()
    for sp in samples:
        for tok in word_tokens(sp.tokens_a):
            counts[tok.text] += 1
        for tok in word_tokens(sp.tokens_b):
            counts[tok.text] += 1
    if not counts:
        raise ValueError("no word tokens in any sample")
    feats = _ranked(counts, k)
    if len(feats) < k:
        warnings.warn(
            f"corpus has only {len(feats)} distinct words (requested {k})",
            ScribeDistWarning,
        )
    return Vocabulary(kind=KIND_WORDS, features=tuple(feats), selection_size=k)


def select_top_ngrams(
    samples: Iterable[SamplePair],
    lengths: Sequence[int],
    k: int,
    *,
    per_length: bool = False,
) -> Vocabulary:
    """Pick the k most frequent character n-grams across both sides.

    By default all requested lengths compete in one pooled ranking. With
    ``per_length`` the budget is split evenly and each length contributes
    its own top slice (grouped by length in the feature order).
    """
    lengths = tuple(sorted(set(int(n) for n in lengths)))
    if not lengths:
        raise ValueError("need at least one n-gram length")
    if k < 1:
        raise ValueError("k must be >= 1")
    per_len: dict[int, Counter] = {n: Counter() for n in lengths}
    for sp in samples:
        for n in lengths:
            per_len[n].update(extract_char_ngrams(sp.tokens_a, n))
            per_len[n].update(extract_char_ngrams(sp.tokens_b, n))
    if per_length:
        share = k // len(lengths)
        if share < 1:
            raise ValueError("k too small to split across lengths")
        feats: list[str] = []
        for n in lengths:
            feats.extend(_ranked(per_len[n], share))
    else:
        pooled: Counter = Counter()
        for c in per_len.values():
            pooled.update(c)
        feats = _ranked(pooled, k)
    if not feats:
        raise ValueError("no n-grams in any sample")
    if len(feats) < k:
        warnings.warn(
            f"corpus has only {len(feats)} distinct n-grams (requested {k})",
            ScribeDistWarning,
        )
    return Vocabulary(
        kind=KIND_NGRAMS,
        features=tuple(feats),
        ngram_lengths=lengths,
        selection_size=k,
    )


def vectorize(
    samples: Sequence[tuple[str, Sequence[Token]]],
    vocabulary: Vocabulary,
    mode: str = MODE_COUNTS,
) -> FrequencyMatrix:
    """Build a frequency matrix from (sample_id, tokens) rows.

    In relative mode each row divides by the sample's unit total: its word
    token count for a word vocabulary, or its total emitted window count
    over the vocabulary's lengths for n-grams. An empty sample produces a
    zero row and a warning.
    """
    if mode not in (MODE_COUNTS, MODE_RELATIVE):
        raise ValueError(f"unknown matrix mode {mode!r}")
    index = {f: i for i, f in enumerate(vocabulary.features)}
    ids = tuple(sid for sid, _ in samples)
    vals = np.zeros((len(samples), len(vocabulary.features)), dtype=np.float64)
    for r, (sid, tokens) in enumerate(samples):
        if vocabulary.kind == KIND_WORDS:
            words = word_tokens(tokens)
            unit = len(words)
            for tok in words:
                c = index.get(tok.text)
                if c is not None:
                    vals[r, c] += 1.0
        else:
            unit = 0
            for n in vocabulary.ngram_lengths:
                grams = extract_char_ngrams(tokens, n)
                unit += sum(grams.values())
                for g, cnt in grams.items():
                    c = index.get(g)
                    if c is not None:
                        vals[r, c] += cnt
        if mode == MODE_RELATIVE:
            if unit == 0:
                warnings.warn(f"sample {sid!r} is empty; zero row", ScribeDistWarning)
                vals[r, :] = 0.0
            else:
                vals[r, :] /= unit
    return FrequencyMatrix(sample_ids=ids, vocabulary=vocabulary, values=vals, mode=mode)


def side_rows(
    samples: Sequence[SamplePair], side: str, siglum: str
) -> list[tuple[str, tuple[Token, ...]]]:
    """Label one side of each sample pair as (``siglum-i``, tokens) rows."""
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' or 'b'")
    pick = (lambda sp: sp.tokens_a) if side == "a" else (lambda sp: sp.tokens_b)
    return [(f"{siglum}-{sp.index + 1}", pick(sp)) for sp in samples]


def write_matrix_csv(matrix: FrequencyMatrix, path: str):
    """Write a matrix with a metadata comment line and sample_id header."""
    voc = matrix.vocabulary
    parts = [f"kind={voc.kind}", f"mode={matrix.mode}"]
    if voc.kind == KIND_NGRAMS:
        parts.append("lengths=" + ",".join(str(n) for n in voc.ngram_lengths))
    parts.append(f"selection={voc.selection_size}")
    with open_write(path) as fh:
        fh.write("# scribedist-matrix v1; " + "; ".join(parts) + "\n")
        w = csv_writer(fh)
        w.writerow(["sample_id", *voc.features])
        for sid, row in zip(matrix.sample_ids, matrix.values):
            if matrix.mode == MODE_COUNTS:
                w.writerow([sid, *(str(int(v)) for v in row)])
            else:
                w.writerow([sid, *(fmt_float(v) for v in row)])


def read_matrix_csv(path: str) -> FrequencyMatrix:
    import csv as _csv

    with open_read(path) as fh:
        comments, body = read_comment_header(fh)
    meta: dict[str, str] = {}
    for c in comments:
        if not c.startswith("scribedist-matrix"):
            continue
        for part in c.split(";")[1:]:
            if "=" in part:
                key, val = part.split("=", 1)
                meta[key.strip()] = val.strip()
    if "kind" not in meta or "mode" not in meta:
        raise MatrixFormatError(f"{path}: missing matrix metadata comment")
    rows = list(_csv.reader(body))
    if not rows or not rows[0] or rows[0][0] != "sample_id":
        raise MatrixFormatError(f"{path}: missing sample_id header")
    features = tuple(rows[0][1:])
    if not features:
        raise MatrixFormatError(f"{path}: no feature columns")
    lengths: tuple[int, ...] = ()
    if meta["kind"] == KIND_NGRAMS:
        if "lengths" not in meta:
            raise MatrixFormatError(f"{path}: n-gram matrix missing lengths")
        lengths = tuple(int(x) for x in meta["lengths"].split(","))
    try:
        voc = Vocabulary(
            kind=meta["kind"],
            features=features,
            ngram_lengths=lengths,
            selection_size=int(meta.get("selection", len(features))),
        )
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    ids: list[str] = []
    data: list[list[float]] = []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 1 + len(features):
            raise MatrixFormatError(
                f"{path}: row {r[0]!r} has {len(r) - 1} values, expected {len(features)}"
            )
        ids.append(r[0])
        try:
            data.append([float(x) for x in r[1:]])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: non-numeric value in row {r[0]!r}") from exc
    if not ids:
        raise MatrixFormatError(f"{path}: matrix has no samples")
    try:
        return FrequencyMatrix(
            sample_ids=tuple(ids),
            vocabulary=voc,
            values=np.array(data, dtype=np.float64),
            mode=meta["mode"],
        )
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
