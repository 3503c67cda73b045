import os
import sys
from types import SimpleNamespace

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from scribedist.alignment import ScoringScheme, align, segment
from scribedist.corpus import Token, TokenStream, segment_graphemes
from scribedist.drift import BootstrapConfig, bootstrap_drift
from scribedist.features import (
    MODE_COUNTS,
    MODE_RELATIVE,
    select_mfw,
    select_top_ngrams,
    side_rows,
    vectorize,
)
from scribedist.forest import ForestParams, mdi_importances, train
from scribedist.synth import SynthConfig, make_scribal_pair
from scribedist.zeta import burrows_zeta

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return os.path.abspath(FIXTURE_DIR)


def _stream(siglum, words):
    return TokenStream(
        siglum=siglum,
        tokens=tuple(
            Token(text=w, graphemes=segment_graphemes(w)) for w in words
        ),
    )


@pytest.fixture(scope="session")
def synth_run():
    """One large synthetic exemplar/copy analysis, shared across tests.

    Roughly 50k tokens per side with an s/z substitution habit active
    throughout the copy and an en/ē abbreviation habit switched on at
    sample pair 40 of 75. Built once because the banded alignment over
    100k tokens is the expensive part.
    """
    import time

    t0 = time.monotonic()
    cfg = SynthConfig(n_words=48000, seed=4242)
    exemplar, copy, planted = make_scribal_pair(cfg)
    sa = _stream("A", exemplar)
    sb = _stream("B", copy)
    scheme = ScoringScheme(similarity_substitution=False)
    table = align(sa, sb, scheme, band=160)
    samples = segment(table, 75)
    vocab = select_top_ngrams(samples, (3, 4), 1000)
    counts_a = vectorize(side_rows(samples, "a", "A"), vocab, MODE_COUNTS)
    counts_b = vectorize(side_rows(samples, "b", "B"), vocab, MODE_COUNTS)
    rel_a = vectorize(side_rows(samples, "a", "A"), vocab, MODE_RELATIVE)
    rel_b = vectorize(side_rows(samples, "b", "B"), vocab, MODE_RELATIVE)
    zeta = burrows_zeta(counts_a, counts_b)

    word_vocab = select_mfw(samples, 150)
    words_a = vectorize(side_rows(samples, "a", "A"), word_vocab, MODE_COUNTS)
    words_b = vectorize(side_rows(samples, "b", "B"), word_vocab, MODE_COUNTS)
    word_zeta = burrows_zeta(words_a, words_b)

    import numpy as np

    both = np.vstack([rel_a.values, rel_b.values])
    from scribedist.features import FrequencyMatrix

    combined = FrequencyMatrix(
        sample_ids=rel_a.sample_ids + rel_b.sample_ids,
        vocabulary=vocab,
        values=both,
        mode=MODE_RELATIVE,
    )
    labels = ["A"] * rel_a.n_samples + ["B"] * rel_b.n_samples
    model = train(
        combined, labels, ForestParams(n_trees=200, seed=42)
    )
    mdi = mdi_importances(model)
    curve = bootstrap_drift(
        rel_a, rel_b, BootstrapConfig(n_subsets=100, subset_size=500, seed=7),
        epsilon=0.02,
    )
    elapsed = time.monotonic() - t0
    return SimpleNamespace(
        config=cfg,
        planted=planted,
        stream_a=sa,
        stream_b=sb,
        table=table,
        samples=samples,
        vocab=vocab,
        counts_a=counts_a,
        counts_b=counts_b,
        rel_a=rel_a,
        rel_b=rel_b,
        zeta=zeta,
        word_vocab=word_vocab,
        words_a=words_a,
        words_b=words_b,
        word_zeta=word_zeta,
        model=model,
        mdi=mdi,
        curve=curve,
        elapsed=elapsed,
    )
