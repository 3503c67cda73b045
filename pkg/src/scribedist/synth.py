"""Deterministic synthetic exemplar/copy pairs for experiments and tests.

An invented Middle-Dutch-flavored lexicon is sampled with Zipf-ish weights
to produce an exemplar; the copy applies configurable scribal habits:

* every letter s independently becomes z with probability ``z_prob``
  (active over the whole text);
* a word-final -en is contracted to the nasal-bar abbreviation -ē with
  probability ``abbrev_prob``, but only from a takeover point onward,
  imitating a change of scribe partway through the copy;
* tokens are occasionally dropped or doubled (``indel_prob``) so the two
  streams do not align trivially.

The mid-frequency s-heavy words exist because presence-based keyness
saturates for very common words: a word occurring a handful of times per
sample can actually go missing from copy samples once its spelling
shifts, which is what makes the planted contrast measurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# (word, weight) pairs; weights are relative sampling odds.
_HIGH_FREQ = (
    ("die", 40), ("ende", 36), ("dat", 30), ("van", 26), ("in", 23),
    ("es", 21), ("hi", 18), ("een", 17), ("si", 15), ("niet", 14),
    ("met", 13), ("te", 12), ("so", 11), ("daer", 10), ("om", 9),
    ("al", 9), ("mi", 8), ("hem", 8), ("ic", 7), ("was", 7),
    ("doe", 6), ("oec", 6), ("har", 5), ("wel", 5), ("ware", 4),
)

# Mid-frequency words carrying a letter s: the planted side-A signal.
_S_WORDS = (
    ("susters", 11), ("visschen", 10), ("sassen", 9), ("messes", 9),
    ("swesters", 8), ("huus", 11), ("saken", 10), ("sorghe", 9),
    ("spise", 9), ("slach", 8), ("steen", 8), ("stat", 7),
    ("sinne", 7), ("sunde", 7), ("side", 6), ("sone", 6),
)

# Mid-frequency -en verbs: fodder for the abbreviation habit.
_EN_WORDS = (
    ("comen", 12), ("gheven", 10), ("nemen", 10), ("spreken", 9),
    ("minnen", 9), ("weten", 8), ("segghen", 8), ("maken", 8),
    ("horen", 7), ("varen", 7), ("houden", 7), ("draghen", 6),
    ("vinden", 6), ("bliven", 5), ("gheren", 5),
)

_FILLER = (
    ("wijf", 7), ("man", 7), ("kint", 6), ("vrouwe", 6), ("herte", 6),
    ("minne", 6), ("lief", 5), ("leet", 5), ("goet", 5), ("quaet", 5),
    ("groet", 5), ("clein", 4), ("out", 4), ("jonc", 4), ("lanc", 4),
    ("cort", 4), ("hoghe", 4), ("rike", 4), ("arme", 4), ("blide", 3),
    ("droeve", 3), ("claer", 3), ("licht", 3), ("doncker", 3), ("vri", 3),
    ("bloet", 3), ("vier", 3), ("water", 3), ("erde", 3), ("hemel", 3),
    ("helle", 3), ("duvel", 2), ("inghel", 2), ("pape", 2), ("clerc", 2),
    ("ridder", 2), ("cnape", 2), ("joncfrouwe", 2), ("coninc", 2),
    ("grave", 2), ("borch", 2), ("dorp", 2), ("velt", 2), ("bome", 2),
    ("crude", 2), ("dier", 2), ("voghel", 2), ("peert", 2), ("hont", 2),
    ("wolf", 2), ("beer", 1), ("leeu", 1), ("winter", 1),
    ("lenten", 1), ("herfst", 1), ("nacht", 2), ("dach", 2), ("morghen", 1),
    ("avont", 1), ("middach", 1), ("jaer", 2), ("maent", 1), ("weke", 1),
)

LEXICON: tuple[tuple[str, int], ...] = tuple(
    (w, wt) for w, wt in (_HIGH_FREQ + _S_WORDS + _EN_WORDS + _FILLER) if wt > 0
)

PUNCT_MARK = "."


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for one synthetic pair; all randomness flows from ``seed``."""

    n_words: int = 48000
    seed: int = 1234
    z_prob: float = 0.6
    abbrev_prob: float = 0.5
    takeover_frac: float = 40.0 / 75.0
    indel_prob: float = 0.003
    punct_prob: float = 0.07

    def __post_init__(self):
        if self.n_words < 1:
            raise ValueError("n_words must be >= 1")
        for name in ("z_prob", "abbrev_prob", "takeover_frac", "indel_prob", "punct_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]")


@dataclass(frozen=True)
class PlantedForms:
    """What the generator changed, for checking that analyses find it."""

    a_side_words: tuple[str, ...]  # s-carrying lexicon words
    b_side_forms: tuple[str, ...]  # distinct altered forms that appeared
    takeover_index: int  # exemplar stream position where -ē begins


def make_scribal_pair(config: SynthConfig) -> tuple[list[str], list[str], PlantedForms]:
    """Generate (exemplar tokens, copy tokens, planted metadata)."""
    rng = np.random.default_rng(config.seed)
    words = [w for w, _ in LEXICON]
    weights = np.array([wt for _, wt in LEXICON], dtype=np.float64)
    probs = weights / weights.sum()

    draws = rng.choice(len(words), size=config.n_words, p=probs)
    puncts = rng.random(config.n_words) < config.punct_prob
    exemplar: list[str] = []
    for d, punct_after in zip(draws, puncts):
        exemplar.append(words[d])
        if punct_after:
            exemplar.append(PUNCT_MARK)

    takeover = int(len(exemplar) * config.takeover_frac)
    copy: list[str] = []
    b_forms: set[str] = set()
    for pos, w in enumerate(exemplar):
        if rng.random() < config.indel_prob:
            continue  # haplography: token dropped
        out = w
        if w != PUNCT_MARK:
            if "s" in out:
                out = "".join(
                    "z" if ch == "s" and rng.random() < config.z_prob else ch
                    for ch in out
                )
            if pos >= takeover and out.endswith("en") and rng.random() < config.abbrev_prob:
                out = out[:-2] + "ē"  # ē
        copy.append(out)
        if out != w:
            b_forms.add(out)
        if rng.random() < config.indel_prob:
            copy.append(out)  # dittography: token doubled
    return (
        exemplar,
        copy,
        PlantedForms(
            a_side_words=tuple(w for w, _ in _S_WORDS),
            b_side_forms=tuple(sorted(b_forms)),
            takeover_index=takeover,
        ),
    )


def format_transcription(
    tokens: list[str],
    *,
    words_per_line: int = 8,
    lines_per_page: int = 24,
    break_every: int = 0,
    seed: int = 0,
) -> str:
    """Lay tokens out as a transcription file with #PAGE folio headers.

    ``break_every`` > 0 plants a scribal word break at the end of every
    k-th line by splitting its last sufficiently long word and carrying
    the tail to the next line with a hyphen marker.
    """
    lines: list[str] = []
    for i in range(0, len(tokens), words_per_line):
        lines.append(" ".join(tokens[i : i + words_per_line]))

    if break_every > 0:
        rng = np.random.default_rng(seed)
        k = break_every - 1
        while k < len(lines) - 1:
            parts = lines[k].split()
            last = parts[-1] if parts else ""
            if len(last) >= 4 and last != PUNCT_MARK:
                cut = 2 + int(rng.integers(0, len(last) - 3))
                parts[-1] = last[:cut] + "-"
                lines[k] = " ".join(parts)
                lines[k + 1] = last[cut:] + " " + lines[k + 1]
            k += break_every

    out: list[str] = []
    for p, i in enumerate(range(0, len(lines), lines_per_page)):
        folio = f"{p // 2 + 1}{'rv'[p % 2]}"
        out.append(f"#PAGE {folio}")
        out.extend(lines[i : i + lines_per_page])
    return "\n".join(out) + "\n"
