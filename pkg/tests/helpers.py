"""Small builders shared by the test modules."""

from __future__ import annotations

import numpy as np

from scribedist.corpus import Token, TokenStream, segment_graphemes
from scribedist.features import (
    KIND_NGRAMS,
    KIND_WORDS,
    MODE_COUNTS,
    MODE_RELATIVE,
    FrequencyMatrix,
    Vocabulary,
)


def tok(text, joined=False, origin=None):
    return Token(text=text, graphemes=segment_graphemes(text), joined=joined,
                 origin=origin)


def toks(*texts):
    return tuple(tok(t) for t in texts)


def stream(siglum, *texts):
    return TokenStream(siglum=siglum, tokens=toks(*texts))


def word_vocab(*features):
    return Vocabulary(kind=KIND_WORDS, features=tuple(features),
                      selection_size=len(features))


def ngram_vocab(features, lengths=(3,)):
    return Vocabulary(kind=KIND_NGRAMS, features=tuple(features),
                      ngram_lengths=tuple(lengths),
                      selection_size=len(features))


def matrix(vocab, rows, ids=None, mode=MODE_COUNTS):
    """rows: list of per-sample value lists in vocabulary order."""
    vals = np.asarray(rows, dtype=np.float64)
    if ids is None:
        ids = tuple(f"s{i}" for i in range(vals.shape[0]))
    return FrequencyMatrix(sample_ids=tuple(ids), vocabulary=vocab,
                           values=vals, mode=mode)


def rel_matrix(vocab, rows, ids=None):
    return matrix(vocab, rows, ids=ids, mode=MODE_RELATIVE)
