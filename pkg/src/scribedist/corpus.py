"""Load diplomatic transcriptions and turn them into token streams.

Input files are plain UTF-8 text with one manuscript line per file line and
page headers of the form ``#PAGE <folio>``. Scribal line breaks inside words
are marked by a trailing hyphenation character (``-`` or ``¬`` by default);
``restore_word_breaks`` fuses the fragments back together and remembers which
words it rebuilt, so downstream statistics can tell reassembled words apart
from ordinary ones.

Tokenization is grapheme-aware: combining marks (macron abbreviations such as
``ē``) stay glued to their base letter, and the two-character superscript
notation ``^x`` counts as a single cluster. A small set of historical
punctuation marks becomes standalone tokens; apostrophes never split a word.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field, replace

import regex

from .errors import DanglingWordBreakError, TranscriptionFormatError

# Characters that become standalone tokens when they form their own grapheme
# cluster. U+2E4E is the punctus elevatus; U+F161 is the same mark in the
# MUFI private-use area, common in diplomatic transcriptions.
PUNCTUATION_TOKENS = frozenset({".", ";", ",", "¶", "⹎", ""})

DEFAULT_HYPHEN_MARKERS = ("-", "¬")

PAGE_HEADER_PREFIX = "#PAGE"

_GRAPHEME = regex.compile(r"\X")


@dataclass(frozen=True)
class Page:
    """One manuscript page: a folio label plus its transcription lines."""

    folio_label: str
    lines: tuple[str, ...]

    def __post_init__(self):
        if not self.folio_label:
            raise ValueError("page folio label must be non-empty")
        for ln in self.lines:
            if "\n" in ln or "\r" in ln:
                raise ValueError("page lines must not contain newlines")


@dataclass(frozen=True)
class Transcription:
    """A whole manuscript as loaded from disk.

    ``joins`` records which whitespace-separated words were fused across a
    line break: each entry is (page index, line index, word index) pointing at
    the receiving line after restoration. Empty until word breaks are
    restored.
    """

    siglum: str
    pages: tuple[Page, ...]
    source_path: str = ""
    joins: frozenset[tuple[int, int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.siglum:
            raise ValueError("transcription siglum must be non-empty")

    def iter_lines(self):
        for p_idx, page in enumerate(self.pages):
            for l_idx, line in enumerate(page.lines):
                yield p_idx, l_idx, line


@dataclass(frozen=True)
class Token:
    """A single token with its grapheme-cluster decomposition.

    ``origin`` is (page, line, token-in-line) for tokens produced from a
    transcription, or None for tokens rebuilt from an exported table.
    ``joined`` marks the word as reassembled across a scribal line break.
    """

    text: str
    graphemes: tuple[str, ...]
    joined: bool = False
    origin: tuple[int, int, int] | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")
        if any(ch.isspace() for ch in self.text):
            raise ValueError(f"token text contains whitespace: {self.text!r}")
        if "".join(self.graphemes) != self.text:
            raise ValueError("token graphemes do not concatenate to its text")

    @property
    def is_punctuation(self) -> bool:
        return self.text in PUNCTUATION_TOKENS


@dataclass(frozen=True)
class TokenStream:
    """An ordered token sequence tagged with its manuscript siglum."""

    siglum: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.siglum:
            raise ValueError("token stream siglum must be non-empty")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def segment_graphemes(text: str) -> tuple[str, ...]:
    """Split text into extended grapheme clusters, collapsing ``^x`` pairs.

    A caret followed by another cluster denotes a superscript letter written
    above the line; the pair counts as one cluster so that n-gram windows and
    edit distances treat it as a single glyph.
    """
    clusters = _GRAPHEME.findall(text)
    out: list[str] = []
    i = 0
    while i < len(clusters):
        if clusters[i] == "^" and i + 1 < len(clusters):
            out.append(clusters[i] + clusters[i + 1])
            i += 2
        else:
            out.append(clusters[i])
            i += 1
    return tuple(out)


def load_transcription(path: str, siglum: str) -> Transcription:
    """Read a transcription file into pages of lines.

    The byte stream must decode as UTF-8; decode failures are reported with
    their byte offset. Text is NFC-normalized and trailing whitespace is
    trimmed from every line. Content is only legal after a ``#PAGE`` header.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TranscriptionFormatError(
            f"not valid UTF-8 at byte {exc.start}: {exc.reason}", path=path
        ) from exc
    text = unicodedata.normalize("NFC", text)

    pages: list[tuple[str, list[str]]] = []
    for line_no, rawline in enumerate(text.split("\n"), start=1):
        line = rawline.rstrip()
        if line.startswith(PAGE_HEADER_PREFIX):
            label = line[len(PAGE_HEADER_PREFIX):].strip()
            if not label:
                raise TranscriptionFormatError(
                    "page header missing folio label", path=path, line_no=line_no
                )
            pages.append((label, []))
        elif line:
            if not pages:
                raise TranscriptionFormatError(
                    "content before first page header", path=path, line_no=line_no
                )
            pages[-1][1].append(line)
        else:
            # blank lines inside a page are kept so line indices stay stable
            if pages:
                pages[-1][1].append("")
    if not pages:
        raise TranscriptionFormatError("no page headers found", path=path)

    # drop trailing blank lines per page; they carry no content
    cleaned = []
    for label, lines in pages:
        while lines and lines[-1] == "":
            lines.pop()
        cleaned.append(Page(folio_label=label, lines=tuple(lines)))
    return Transcription(siglum=siglum, pages=tuple(cleaned), source_path=path)


def restore_word_breaks(
    t: Transcription, markers: tuple[str, ...] = DEFAULT_HYPHEN_MARKERS
) -> Transcription:
    """Fuse word fragments split across line ends by a hyphenation marker.

    A line whose last character is a marker loses that marker and gains the
    first word of the next non-empty line (which loses it). Chains are
    followed: if the absorbed fragment itself ends in a marker, fusion
    continues on the same line. The fused word's position is recorded in the
    result's ``joins`` set. A marker with no following word anywhere in the
    manuscript raises ``DanglingWordBreakError``.

    No character is altered apart from the removed markers and the collapsed
    line boundary; running the operation again is a no-op.
    """
    for m in markers:
        if len(m) != 1:
            raise ValueError(f"hyphenation markers must be single characters: {m!r}")
    marker_set = set(markers)

    flat: list[list[str]] = []  # [page_idx, line_idx, text]
    for p_idx, l_idx, line in t.iter_lines():
        flat.append([p_idx, l_idx, line])

    joins = set(t.joins)
    i = 0
    while i < len(flat):
        line = flat[i][2]
        if not line or line[-1] not in marker_set:
            i += 1
            continue
        # locate the donor line
        j = i + 1
        while j < len(flat) and not flat[j][2].strip():
            j += 1
        if j == len(flat):
            raise DanglingWordBreakError(
                "hyphenation marker at end of text has nothing to fuse",
                path=t.source_path,
                line_no=None,
            )
        stripped = line[:-1]
        donor = flat[j][2].lstrip()
        cut = 0
        while cut < len(donor) and not donor[cut].isspace():
            cut += 1
        first_word, rest = donor[:cut], donor[cut:].lstrip()
        flat[i][2] = stripped + first_word
        flat[j][2] = rest
        joins.add((flat[i][0], flat[i][1], len(flat[i][2].split()) - 1))
        # the absorbed fragment may end in a marker itself: recheck this line

    rebuilt: list[Page] = []
    cursor = 0
    for page in t.pages:
        n = len(page.lines)
        lines = tuple(item[2] for item in flat[cursor:cursor + n])
        cursor += n
        rebuilt.append(Page(folio_label=page.folio_label, lines=lines))
    return replace(t, pages=tuple(rebuilt), joins=frozenset(joins))


def _split_word(word: str, punctuation: frozenset[str]) -> list[tuple[str, tuple[str, ...]]]:
    """Split one whitespace word into subtokens at punctuation clusters."""
    clusters = segment_graphemes(word)
    pieces: list[tuple[str, tuple[str, ...]]] = []
    run: list[str] = []
    for cl in clusters:
        if cl in punctuation:
            if run:
                pieces.append(("".join(run), tuple(run)))
                run = []
            pieces.append((cl, (cl,)))
        else:
            run.append(cl)
    if run:
        pieces.append(("".join(run), tuple(run)))
    return pieces


def tokenize(
    t: Transcription, punctuation: frozenset[str] = PUNCTUATION_TOKENS
) -> TokenStream:
    """Convert a restored transcription into an ordered token stream.

    Words are whitespace-separated; listed punctuation marks split off as
    their own tokens when they occupy a full grapheme cluster (so a mark with
    a combining character attached stays inside the word, and apostrophes are
    never separators). For a word fused across a line break, the first
    non-punctuation subtoken carries the ``joined`` flag.
    """
    tokens: list[Token] = []
    for p_idx, l_idx, line in t.iter_lines():
        tok_in_line = 0
        for w_idx, word in enumerate(line.split()):
            pieces = _split_word(word, punctuation)
            was_joined = (p_idx, l_idx, w_idx) in t.joins
            flag_at = 0
            if was_joined:
                for k, (text, _) in enumerate(pieces):
                    if text not in punctuation:
                        flag_at = k
                        break
            for k, (text, graphemes) in enumerate(pieces):
                tokens.append(
                    Token(
                        text=text,
                        graphemes=graphemes,
                        joined=was_joined and k == flag_at,
                        origin=(p_idx, l_idx, tok_in_line),
                    )
                )
                tok_in_line += 1
    return TokenStream(siglum=t.siglum, tokens=tuple(tokens))


def word_tokens(tokens) -> list[Token]:
    """Filter a token iterable down to non-punctuation word tokens."""
    return [tok for tok in tokens if not tok.is_punctuation]
