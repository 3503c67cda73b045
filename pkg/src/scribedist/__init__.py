"""scribedist: how faithfully did a scribe copy the exemplar?

The package aligns two diplomatic transcriptions word by word, slices the
alignment into parallel samples, and measures scribal appropriation three
ways: presence-based keyness over frequent words, a random-forest
classifier with impurity-based feature importance over character n-grams,
and a bootstrapped cosine-distance curve that tracks drift along the text.
"""

__version__ = "0.1.0"

from .alignment import (
    AlignmentTable,
    SamplePair,
    ScoringScheme,
    align,
    read_table_tsv,
    segment,
    token_similarity,
    write_table_tsv,
)
from .corpus import (
    DEFAULT_HYPHEN_MARKERS,
    PUNCTUATION_TOKENS,
    Page,
    Token,
    TokenStream,
    Transcription,
    load_transcription,
    restore_word_breaks,
    segment_graphemes,
    tokenize,
)
from .drift import (
    BootstrapConfig,
    DriftCurve,
    DriftPoint,
    annotate_boundaries,
    bootstrap_drift,
    classify_movements,
    cosine_distance,
)
from .errors import (
    DanglingWordBreakError,
    ManifestError,
    MatrixFormatError,
    MemoryBudgetError,
    PipelineError,
    ScribeDistError,
    ScribeDistWarning,
    TranscriptionFormatError,
)
from .features import (
    FrequencyMatrix,
    Vocabulary,
    extract_char_ngrams,
    read_matrix_csv,
    select_mfw,
    select_top_ngrams,
    vectorize,
    write_matrix_csv,
)
from .forest import (
    ForestParams,
    ImportanceReport,
    Leaf,
    RandomForestModel,
    Split,
    gini,
    mdi_importances,
    predict,
    rank_features,
    read_model,
    train,
    write_model,
)
from .manifest import ManuscriptSpec, RunManifest, load_manifest
from .pipeline import RunReport, run_pipeline
from .svg import render_svg, write_svg
from .zeta import ZetaReport, ZetaScore, burrows_zeta, zeta_report

__all__ = [name for name in dir() if not name.startswith("_")]
