"""Global word-level alignment of two token streams.

The aligner is Needleman-Wunsch with an affine-free gap model: every gap
cell costs the same penalty. Substitution scores interpolate between the
mismatch and match scores by grapheme-level token similarity, so spelling
variants ("ghebruken" ~ "ghebrukē") align as near-matches instead of forcing
gap pairs.

Traceback prefers, on score ties, the diagonal move, then the move consuming
a token of the first stream (gap in the second), then the move consuming a
token of the second stream. Scores are symmetric in the operand order; the
tables themselves need not be exact mirrors, because the fixed move
preference is itself asymmetric. Both directions are optimal.

For long streams the full table exceeds any sane memory budget; ``band``
restricts each row to a window around the main diagonal and flags the result
as approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import Token, TokenStream, segment_graphemes
from .errors import MatrixFormatError, MemoryBudgetError, ScribeDistError
from .textio import fmt_float, open_read, open_write, read_comment_header

DEFAULT_MAX_CELLS = 100_000_000

GAP_GLYPH = "∅"  # ∅ in exported tables

_NONE, _DIAG, _UP, _LEFT = 0, 1, 2, 3


@dataclass(frozen=True)
class ScoringScheme:
    """Alignment parameters.

    With ``similarity_substitution`` enabled the substitution score is
    ``mismatch + (match - mismatch) * token_similarity(a, b)``; disabled, it
    is ``match`` for identical texts and ``mismatch`` otherwise.
    """

    match_score: float = 2.0
    mismatch_score: float = -1.0
    gap_penalty: float = -1.0
    similarity_substitution: bool = True

    def __post_init__(self):
        if not self.match_score > self.mismatch_score:
            raise ValueError("match_score must exceed mismatch_score")
        if not self.gap_penalty < 0:
            raise ValueError("gap_penalty must be negative")


@dataclass(frozen=True)
class AlignmentTable:
    """Result of aligning streams a and b.

    Each row pairs a token of a with a token of b, or a token with None
    (a gap). Rows never pair two gaps. ``approximate`` is set when the
    alignment was computed inside a band.
    """

    rows: tuple[tuple[Optional[Token], Optional[Token]], ...]
    score: float
    approximate: bool = False

    def __post_init__(self):
        for k, (ta, tb) in enumerate(self.rows):
            if ta is None and tb is None:
                raise ValueError(f"row {k} pairs two gaps")

    def __len__(self):
        return len(self.rows)

    def project(self, side: str) -> tuple[Token, ...]:
        """Recover one input stream by dropping the other side's gaps."""
        if side not in ("a", "b"):
            raise ValueError("side must be 'a' or 'b'")
        pick = 0 if side == "a" else 1
        return tuple(row[pick] for row in self.rows if row[pick] is not None)


@dataclass(frozen=True)
class SamplePair:
    """One of the parallel slices cut from an alignment table.

    ``row_range`` is the half-open [start, stop) range of table rows the
    slice covers; the token tuples are the per-side projections of those
    rows.
    """

    index: int
    tokens_a: tuple[Token, ...]
    tokens_b: tuple[Token, ...]
    row_range: tuple[int, int]

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("sample index must be >= 0")
        if self.row_range[1] <= self.row_range[0]:
            raise ValueError("sample row range must be non-empty")


_edit_cache: dict[tuple[tuple[str, ...], tuple[str, ...]], int] = {}


def _edit_distance(ga: tuple[str, ...], gb: tuple[str, ...]) -> int:
    """Levenshtein distance over grapheme clusters."""
    if ga == gb:
        return 0
    key = (ga, gb) if ga <= gb else (gb, ga)
    hit = _edit_cache.get(key)
    if hit is not None:
        return hit
    la, lb = len(ga), len(gb)
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = ga[i - 1]
        for j in range(1, lb + 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ai != gb[j - 1]))
        prev = cur
    _edit_cache[key] = prev[lb]
    return prev[lb]


def token_similarity(a: Token, b: Token) -> float:
    """1 minus normalized grapheme edit distance; 1.0 means identical."""
    if a.text == b.text:
        return 1.0
    dist = _edit_distance(a.graphemes, b.graphemes)
    return 1.0 - dist / max(len(a.graphemes), len(b.graphemes))


def _tokens_of(stream) -> tuple[Token, ...]:
    if isinstance(stream, TokenStream):
        return stream.tokens
    return tuple(stream)


class _SubstitutionLookup:
    """Vectorized substitution scores keyed by interned token texts."""

    def __init__(self, a: Sequence[Token], b: Sequence[Token], scoring: ScoringScheme):
        self.scoring = scoring
        texts: dict[str, int] = {}
        reps: list[Token] = []
        for tok in list(a) + list(b):
            if tok.text not in texts:
                texts[tok.text] = len(texts)
                reps.append(tok)
        self.a_ids = np.array([texts[t.text] for t in a], dtype=np.int64)
        self.b_ids = np.array([texts[t.text] for t in b], dtype=np.int64)
        self._reps = reps
        self._b_universe = np.unique(self.b_ids)
        self._id_to_col = {int(v): c for c, v in enumerate(self._b_universe)}
        self._b_cols = np.array(
            [self._id_to_col[int(v)] for v in self.b_ids], dtype=np.int64
        )
        self._sim_rows: dict[int, np.ndarray] = {}

    def _sim_row(self, a_id: int) -> np.ndarray:
        row = self._sim_rows.get(a_id)
        if row is None:
            ra = self._reps[a_id]
            row = np.array(
                [token_similarity(ra, self._reps[int(bid)]) for bid in self._b_universe],
                dtype=np.float64,
            )
            self._sim_rows[a_id] = row
        return row

    def row(self, i: int, b_positions: np.ndarray) -> np.ndarray:
        """Substitution scores of a-token i against the given b positions."""
        sc = self.scoring
        if sc.similarity_substitution:
            sims = self._sim_row(int(self.a_ids[i]))[self._b_cols[b_positions]]
            return sc.mismatch_score + (sc.match_score - sc.mismatch_score) * sims
        eq = self.b_ids[b_positions] == self.a_ids[i]
        return np.where(eq, sc.match_score, sc.mismatch_score)


def _window_bounds(n: int, m: int, band: Optional[int]) -> tuple[list[int], list[int], int]:
    """Per-row inclusive column windows; full table when band is None."""
    if band is None:
        return [0] * (n + 1), [m] * (n + 1), 0
    # widen so consecutive windows always overlap and the corner is reachable
    w = max(band, (m + 2 * n - 1) // (2 * n) + 1, 1)
    los, his = [], []
    for i in range(n + 1):
        center = (i * m + n // 2) // n
        los.append(max(0, center - w))
        his.append(min(m, center + w))
    return los, his, w


def _shifted(prev: np.ndarray, plo: int, lo: int, hi: int, shift: int) -> np.ndarray:
    """Previous-row values at columns [lo+shift, hi+shift], -inf outside."""
    out = np.full(hi - lo + 1, -np.inf)
    g0, g1 = lo + shift, hi + shift
    p_hi = plo + len(prev) - 1
    s0, s1 = max(g0, plo), min(g1, p_hi)
    if s0 <= s1:
        out[s0 - g0 : s1 - g0 + 1] = prev[s0 - plo : s1 - plo + 1]
    return out


def align(
    a,
    b,
    scoring: Optional[ScoringScheme] = None,
    *,
    band: Optional[int] = None,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> AlignmentTable:
    """Compute the optimal global alignment of two token streams.

    The dynamic program runs in a gap-normalized score space where the
    in-row dependency becomes a running maximum, which keeps the row sweep
    vectorized and the traceback decisions exact (every comparison is
    between identically computed floats).

    Without ``band`` the full table is computed; if it would exceed
    ``max_cells`` cells, a MemoryBudgetError asks for banded mode instead
    of thrashing. With ``band`` only a diagonal window of that half-width
    is explored and the result is flagged approximate.
    """
    toks_a, toks_b = _tokens_of(a), _tokens_of(b)
    if not toks_a or not toks_b:
        raise ValueError("cannot align an empty token stream")
    if band is not None and band <= 0:
        raise ValueError("band must be a positive half-width")
    scoring = scoring or ScoringScheme()
    n, m = len(toks_a), len(toks_b)

    if band is None and (n + 1) * (m + 1) > max_cells:
        raise MemoryBudgetError(
            f"full alignment table needs {(n + 1) * (m + 1):,} cells "
            f"(budget {max_cells:,}); rerun with banded mode (band=...)"
        )
    los, his, _ = _window_bounds(n, m, band)
    if band is not None:
        banded_cells = sum(h - l + 1 for l, h in zip(los, his))
        if banded_cells > max_cells:
            raise MemoryBudgetError(
                f"banded table needs {banded_cells:,} cells (budget {max_cells:,}); "
                "reduce band"
            )

    sub = _SubstitutionLookup(toks_a, toks_b, scoring)
    gap = scoring.gap_penalty

    # u[i][j] = M[i][j] - j*gap; row 0 is all zeros inside its window
    lo0, hi0 = los[0], his[0]
    prev = np.zeros(hi0 - lo0 + 1, dtype=np.float64)
    codes: list[np.ndarray] = []
    row0 = np.full(hi0 - lo0 + 1, _LEFT, dtype=np.uint8)
    if lo0 == 0:
        row0[0] = _NONE
    codes.append(row0)

    for i in range(1, n + 1):
        lo, hi, plo = los[i], his[i], los[i - 1]
        width = hi - lo + 1
        b_idx = np.arange(lo - 1, hi)  # b positions j-1 for j in [lo, hi]
        sub_u = sub.row(i - 1, np.maximum(b_idx, 0)) - gap
        diag_u = _shifted(prev, plo, lo, hi, -1) + sub_u
        if lo == 0:
            diag_u[0] = -np.inf  # j=0 has no b token
        up_u = _shifted(prev, plo, lo, hi, 0) + gap
        t_u = np.maximum(diag_u, up_u)
        u = np.maximum.accumulate(t_u)
        code = np.full(width, _LEFT, dtype=np.uint8)
        code[u == up_u] = _UP
        code[u == diag_u] = _DIAG
        code[np.isneginf(u)] = _NONE
        codes.append(code)
        prev = u

    lo_n = los[n]
    final_u = prev[m - lo_n]
    if np.isneginf(final_u):
        raise ScribeDistError("alignment band excluded every path; widen band")
    score = float(final_u + m * gap)

    rows: list[tuple[Optional[Token], Optional[Token]]] = []
    i, j = n, m
    while (i, j) != (0, 0):
        lo, hi = los[i], his[i]
        if not (lo <= j <= hi):
            raise ScribeDistError("traceback left the band; widen band")
        c = int(codes[i][j - lo])
        if c == _DIAG:
            rows.append((toks_a[i - 1], toks_b[j - 1]))
            i, j = i - 1, j - 1
        elif c == _UP:
            rows.append((toks_a[i - 1], None))
            i -= 1
        elif c == _LEFT:
            rows.append((None, toks_b[j - 1]))
            j -= 1
        else:
            raise ScribeDistError("traceback reached an unreachable cell")
    rows.reverse()
    return AlignmentTable(rows=tuple(rows), score=score, approximate=band is not None)


def segment(table: AlignmentTable, n_samples: int) -> list[SamplePair]:
    """Cut an alignment table into consecutive parallel samples.

    The row sequence is divided into ``n_samples`` contiguous chunks whose
    sizes differ by at most one (earlier chunks take the remainder). Each
    sample carries the per-side token projections of its rows.
    """
    total = len(table.rows)
    if not 1 <= n_samples <= total:
        raise ValueError(
            f"n_samples must be in [1, {total}] for a {total}-row table, got {n_samples}"
        )
    base, rem = divmod(total, n_samples)
    out: list[SamplePair] = []
    start = 0
    for k in range(n_samples):
        size = base + (1 if k < rem else 0)
        stop = start + size
        chunk = table.rows[start:stop]
        out.append(
            SamplePair(
                index=k,
                tokens_a=tuple(r[0] for r in chunk if r[0] is not None),
                tokens_b=tuple(r[1] for r in chunk if r[1] is not None),
                row_range=(start, stop),
            )
        )
        start = stop
    return out


def write_table_tsv(table: AlignmentTable, path: str, *, n_samples: Optional[int] = None):
    """Serialize an alignment table; gaps become the ∅ glyph.

    A token whose text is literally ∅ would be ambiguous on re-import, so
    the exporter refuses it. ``n_samples`` is recorded as metadata when
    given so later stages can re-segment identically.
    """
    for ta, tb in table.rows:
        for tok in (ta, tb):
            if tok is not None and tok.text == GAP_GLYPH:
                raise ValueError(f"token text equals the gap glyph {GAP_GLYPH!r}")
    with open_write(path) as fh:
        fh.write("# scribedist-table v1\n")
        fh.write(f"# score: {fmt_float(table.score)}\n")
        fh.write(f"# approximate: {'true' if table.approximate else 'false'}\n")
        if n_samples is not None:
            fh.write(f"# samples: {n_samples}\n")
        fh.write("row\ta\tb\n")
        for k, (ta, tb) in enumerate(table.rows):
            ca = GAP_GLYPH if ta is None else ta.text
            cb = GAP_GLYPH if tb is None else tb.text
            fh.write(f"{k}\t{ca}\t{cb}\n")


def read_table_tsv(path: str) -> tuple[AlignmentTable, dict]:
    """Re-import an exported table.

    The reconstruction is text-level: token texts and gap structure are
    exact, while provenance (origins, join flags) is not serialized and
    comes back empty. Returns the table plus a metadata dict with any of
    score / approximate / samples that the file carried.
    """
    with open_read(path) as fh:
        comments, body = read_comment_header(fh)
    meta: dict = {}
    for c in comments:
        if ":" not in c:
            continue
        key, val = c.split(":", 1)
        key, val = key.strip(), val.strip()
        if key == "score":
            meta["score"] = float(val)
        elif key == "approximate":
            meta["approximate"] = val == "true"
        elif key == "samples":
            meta["samples"] = int(val)

    rows: list[tuple[Optional[Token], Optional[Token]]] = []
    lines = [ln.rstrip("\n") for ln in body if ln.strip()]
    if not lines or lines[0].split("\t") != ["row", "a", "b"]:
        raise MatrixFormatError(f"{path}: missing 'row\\ta\\tb' header")
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 3:
            raise MatrixFormatError(f"{path}: expected 3 tab-separated fields: {ln!r}")
        idx_s, ca, cb = parts
        try:
            idx = int(idx_s)
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: bad row index {idx_s!r}") from exc
        if idx != len(rows):
            raise MatrixFormatError(f"{path}: row indices not consecutive at {idx}")
        ta = None if ca == GAP_GLYPH else Token(text=ca, graphemes=segment_graphemes(ca))
        tb = None if cb == GAP_GLYPH else Token(text=cb, graphemes=segment_graphemes(cb))
        if ta is None and tb is None:
            raise MatrixFormatError(f"{path}: row {idx} pairs two gaps")
        rows.append((ta, tb))
    if not rows:
        raise MatrixFormatError(f"{path}: table has no rows")
    return (
        AlignmentTable(
            rows=tuple(rows),
            score=meta.get("score", 0.0),
            approximate=meta.get("approximate", False),
        ),
        meta,
    )
