"""Run manifests: one TOML file describing a complete paired-manuscript run.

Example:

    output_dir = "out"
    n_samples = 75
    mfw_k = 150
    ngram_lengths = [3, 4]
    ngram_k = 1000

    [[manuscripts]]
    siglum = "A"
    path = "ms_A.txt"
    hyphen_markers = ["-", "¬"]

    [[manuscripts]]
    siglum = "B"
    path = "ms_B.txt"

    [alignment]
    band = 160                        # omit for the full table
    similarity_substitution = true

    [forest]
    n_trees = 500
    seed = 42

    [bootstrap]
    n_subsets = 500
    subset_size = 500
    seed = 7

    [[boundaries]]
    pair = 40
    label = "change of hand"

Relative paths are resolved against the manifest's own directory. Unknown
keys are rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .alignment import DEFAULT_MAX_CELLS, ScoringScheme
from .corpus import DEFAULT_HYPHEN_MARKERS
from .drift import BootstrapConfig
from .errors import ManifestError
from .forest import ForestParams


@dataclass(frozen=True)
class ManuscriptSpec:
    siglum: str
    path: str
    hyphen_markers: tuple[str, ...] = DEFAULT_HYPHEN_MARKERS


@dataclass(frozen=True)
class RunManifest:
    manuscripts: tuple[ManuscriptSpec, ManuscriptSpec]
    output_dir: str
    n_samples: int = 75
    mfw_k: int = 150
    ngram_lengths: tuple[int, ...] = (3, 4)
    ngram_k: int = 1000
    ngram_per_length: bool = False
    scoring: ScoringScheme = field(default_factory=ScoringScheme)
    band: Optional[int] = None
    max_cells: int = DEFAULT_MAX_CELLS
    forest: ForestParams = field(default_factory=ForestParams)
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    boundaries: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if len(self.manuscripts) != 2:
            raise ManifestError("a run needs exactly two manuscripts")
        if self.manuscripts[0].siglum == self.manuscripts[1].siglum:
            raise ManifestError("manuscript sigla must differ")
        if self.n_samples < 1:
            raise ManifestError("n_samples must be >= 1")
        if self.mfw_k < 1 or self.ngram_k < 1:
            raise ManifestError("mfw_k and ngram_k must be >= 1")
        if not self.ngram_lengths or any(n < 1 for n in self.ngram_lengths):
            raise ManifestError("ngram_lengths must be positive")


def _take(table: dict, allowed: set[str], where: str) -> dict:
    unknown = set(table) - allowed
    if unknown:
        raise ManifestError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    return table


def _expect(table: dict, key: str, where: str):
    if key not in table:
        raise ManifestError(f"{where} is missing required key {key!r}")
    return table[key]


def load_manifest(path: str) -> RunManifest:
    """Parse and validate a manifest file into a RunManifest."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ManifestError(f"manifest not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: invalid TOML: {exc}") from exc

    base = os.path.dirname(os.path.abspath(path))
    _take(
        doc,
        {
            "manuscripts", "output_dir", "n_samples", "mfw_k", "ngram_lengths",
            "ngram_k", "ngram_per_length", "alignment", "forest", "bootstrap",
            "boundaries",
        },
        "manifest",
    )

    raw_mss = _expect(doc, "manuscripts", "manifest")
    if not isinstance(raw_mss, list) or len(raw_mss) != 2:
        raise ManifestError("manifest needs exactly two [[manuscripts]] entries")
    mss = []
    for k, entry in enumerate(raw_mss):
        where = f"manuscripts[{k}]"
        _take(entry, {"siglum", "path", "hyphen_markers"}, where)
        siglum = str(_expect(entry, "siglum", where))
        ms_path = os.path.join(base, str(_expect(entry, "path", where)))
        if not os.path.isfile(ms_path):
            raise ManifestError(f"{where}: file not found: {ms_path}")
        markers = tuple(str(m) for m in entry.get("hyphen_markers", DEFAULT_HYPHEN_MARKERS))
        for m in markers:
            if len(m) != 1:
                raise ManifestError(f"{where}: markers must be single characters: {m!r}")
        mss.append(ManuscriptSpec(siglum=siglum, path=ms_path, hyphen_markers=markers))

    out_dir = os.path.join(base, str(_expect(doc, "output_dir", "manifest")))

    align_tab = _take(
        doc.get("alignment", {}),
        {"band", "max_cells", "match_score", "mismatch_score", "gap_penalty",
         "similarity_substitution"},
        "[alignment]",
    )
    try:
        scoring = ScoringScheme(
            match_score=float(align_tab.get("match_score", 2.0)),
            mismatch_score=float(align_tab.get("mismatch_score", -1.0)),
            gap_penalty=float(align_tab.get("gap_penalty", -1.0)),
            similarity_substitution=bool(align_tab.get("similarity_substitution", True)),
        )
    except ValueError as exc:
        raise ManifestError(f"[alignment]: {exc}") from exc
    band = align_tab.get("band")
    if band is not None:
        band = int(band)
        if band < 1:
            raise ManifestError("[alignment]: band must be >= 1")

    forest_tab = _take(
        doc.get("forest", {}),
        {"n_trees", "max_features", "max_depth", "min_samples_split", "bootstrap", "seed"},
        "[forest]",
    )
    try:
        forest = ForestParams(
            n_trees=int(forest_tab.get("n_trees", 500)),
            max_features=forest_tab.get("max_features", "sqrt"),
            max_depth=forest_tab.get("max_depth"),
            min_samples_split=int(forest_tab.get("min_samples_split", 2)),
            bootstrap=bool(forest_tab.get("bootstrap", True)),
            seed=int(forest_tab.get("seed", 0)),
        )
    except ValueError as exc:
        raise ManifestError(f"[forest]: {exc}") from exc

    boot_tab = _take(
        doc.get("bootstrap", {}), {"n_subsets", "subset_size", "seed"}, "[bootstrap]"
    )
    try:
        bootstrap = BootstrapConfig(
            n_subsets=int(boot_tab.get("n_subsets", 500)),
            subset_size=int(boot_tab.get("subset_size", 500)),
            seed=int(boot_tab.get("seed", 0)),
        )
    except ValueError as exc:
        raise ManifestError(f"[bootstrap]: {exc}") from exc

    bounds = []
    for k, b in enumerate(doc.get("boundaries", [])):
        where = f"boundaries[{k}]"
        _take(b, {"pair", "label"}, where)
        bounds.append((int(_expect(b, "pair", where)), str(_expect(b, "label", where))))

    try:
        lengths = tuple(int(n) for n in doc.get("ngram_lengths", (3, 4)))
        return RunManifest(
            manuscripts=(mss[0], mss[1]),
            output_dir=out_dir,
            n_samples=int(doc.get("n_samples", 75)),
            mfw_k=int(doc.get("mfw_k", 150)),
            ngram_lengths=lengths,
            ngram_k=int(doc.get("ngram_k", 1000)),
            ngram_per_length=bool(doc.get("ngram_per_length", False)),
            scoring=scoring,
            band=band,
            max_cells=int(align_tab.get("max_cells", DEFAULT_MAX_CELLS)),
            forest=forest,
            bootstrap=bootstrap,
            boundaries=tuple(bounds),
        )
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
