import warnings

import numpy as np
import pytest

from helpers import matrix, ngram_vocab, rel_matrix, stream, tok, toks, word_vocab
from scribedist.alignment import SamplePair
from scribedist.errors import MatrixFormatError, ScribeDistWarning
from scribedist.features import (
    KIND_NGRAMS,
    KIND_WORDS,
    MODE_COUNTS,
    MODE_RELATIVE,
    FrequencyMatrix,
    Vocabulary,
    extract_char_ngrams,
    read_matrix_csv,
    select_mfw,
    select_top_ngrams,
    side_rows,
    vectorize,
    write_matrix_csv,
)


def pair(idx, a_texts, b_texts):
    return SamplePair(
        index=idx,
        tokens_a=toks(*a_texts),
        tokens_b=toks(*b_texts),
        row_range=(idx * 10, idx * 10 + 10),
    )


# ----------------------------------------------------------------- n-grams

def test_ngrams_worked_example_trigrams():
    got = extract_char_ngrams(toks("het", "es"), 3)
    assert dict(got) == {"het": 1, "et_": 1, "t_e": 1, "_es": 1}


def test_ngrams_worked_example_bigrams():
    got = extract_char_ngrams(toks("het", "es"), 2)
    assert dict(got) == {"he": 1, "et": 1, "t_": 1, "_e": 1, "es": 1}


def test_ngrams_count_repetitions():
    assert extract_char_ngrams(toks("aaaa"), 2) == {"aa": 3}


def test_ngrams_single_short_token():
    assert extract_char_ngrams(toks("es"), 3) == {}
    assert extract_char_ngrams(toks("het"), 3) == {"het": 1}


def test_ngrams_treat_clusters_as_single_positions():
    # e-with-macron is one position, as is a caret digraph
    assert dict(extract_char_ngrams(toks("hē"), 2)) == {"hē": 1}
    assert dict(extract_char_ngrams(toks("d^te"), 2)) == {"d^t": 1, "^te": 1}


def test_ngrams_span_punctuation_tokens():
    got = extract_char_ngrams(toks("he", ".", "es"), 3)
    assert dict(got) == {"he_": 1, "e_.": 1, "_._": 1, "._e": 1, "_es": 1}


def test_ngrams_reject_bad_n():
    with pytest.raises(ValueError):
        extract_char_ngrams(toks("het"), 0)


# -------------------------------------------------------------- selection

def test_select_mfw_ranks_pooled_counts():
    samples = [
        pair(0, ["die", "die", "es", "."], ["die", "wa"]),
        pair(1, ["es", "wa"], ["es", "die"]),
    ]
    vocab = select_mfw(samples, 3)
    assert vocab.kind == KIND_WORDS
    # die: 4, es: 3, wa: 2; the period is not a word
    assert vocab.features == ("die", "es", "wa")


def test_select_mfw_breaks_ties_lexicographically():
    samples = [pair(0, ["b", "a"], ["d", "c"])]
    vocab = select_mfw(samples, 4)
    assert vocab.features == ("a", "b", "c", "d")


def test_select_mfw_warns_when_short():
    samples = [pair(0, ["die"], ["es"])]
    with pytest.warns(ScribeDistWarning):
        vocab = select_mfw(samples, 10)
    assert vocab.features == ("die", "es")
    assert vocab.selection_size == 10


def test_select_top_ngrams_pooled():
    samples = [pair(0, ["aab"], ["aab", "aac"])]
    vocab = select_top_ngrams(samples, (2,), 2)
    # aa appears 3 times, ab twice, ac once
    assert vocab.features == ("aa", "ab")
    assert vocab.ngram_lengths == (2,)


def test_select_top_ngrams_per_length_groups_by_length():
    samples = [pair(0, ["aab", "aab"], ["aab"])]
    vocab = select_top_ngrams(samples, (3, 2), 4, per_length=True)
    # two per length, shorter length first after sorting
    assert vocab.features[:2] == ("aa", "ab")
    assert all(len(f) == 3 for f in vocab.features[2:])


def test_select_top_ngrams_rejects_empty_lengths():
    with pytest.raises(ValueError):
        select_top_ngrams([pair(0, ["ab"], ["ab"])], (), 5)


# ------------------------------------------------------------- vectorize

def test_vectorize_word_counts_and_relative():
    vocab = word_vocab("die", "es")
    rows = [("s1", toks("die", "die", "es", ".", "wa"))]
    counts = vectorize(rows, vocab, MODE_COUNTS)
    assert counts.values.tolist() == [[2.0, 1.0]]
    rel = vectorize(rows, vocab, MODE_RELATIVE)
    # unit is the word-token count: 4 words, the period does not count
    assert rel.values.tolist() == [[0.5, 0.25]]


def test_vectorize_ngram_unit_counts_all_windows():
    vocab = ngram_vocab(("he",), lengths=(2,))
    rows = [("s1", toks("het"))]
    rel = vectorize(rows, vocab, MODE_RELATIVE)
    # windows he, et; only he is in the vocabulary
    assert rel.values.tolist() == [[0.5]]


def test_vectorize_empty_sample_warns_and_zeroes():
    vocab = word_vocab("die")
    with pytest.warns(ScribeDistWarning):
        m = vectorize([("s1", toks("."))], vocab, MODE_RELATIVE)
    assert m.values.tolist() == [[0.0]]


def test_vectorize_rejects_unknown_mode():
    with pytest.raises(ValueError):
        vectorize([("s1", toks("die"))], word_vocab("die"), "absolute")


def test_side_rows_are_one_based_per_siglum():
    samples = [pair(0, ["die"], ["es"]), pair(1, ["wa"], ["so"])]
    rows = side_rows(samples, "a", "A")
    assert [sid for sid, _ in rows] == ["A-1", "A-2"]
    assert [t.text for t in rows[0][1]] == ["die"]
    rows_b = side_rows(samples, "b", "B")
    assert [sid for sid, _ in rows_b] == ["B-1", "B-2"]
    assert [t.text for t in rows_b[1][1]] == ["so"]


# ------------------------------------------------------------- validation

def test_vocabulary_validation():
    with pytest.raises(ValueError):
        Vocabulary(kind="chars", features=("a",), selection_size=1)
    with pytest.raises(ValueError):
        Vocabulary(kind=KIND_WORDS, features=("a", "a"), selection_size=2)
    with pytest.raises(ValueError):
        # cluster length 2 with no such ngram length declared
        Vocabulary(
            kind=KIND_NGRAMS, features=("ab",), ngram_lengths=(3,),
            selection_size=1,
        )


def test_matrix_counts_mode_requires_integers():
    vocab = word_vocab("die")
    with pytest.raises(ValueError):
        matrix(vocab, [[0.5]])


def test_matrix_relative_mode_bounds():
    vocab = word_vocab("die")
    with pytest.raises(ValueError):
        rel_matrix(vocab, [[-0.1]])
    with pytest.raises(ValueError):
        rel_matrix(vocab, [[1.5]])


def test_matrix_values_are_read_only():
    m = matrix(word_vocab("die"), [[1.0]])
    with pytest.raises(ValueError):
        m.values[0, 0] = 5.0


def test_matrix_shape_must_match():
    vocab = word_vocab("die", "es")
    with pytest.raises(ValueError):
        FrequencyMatrix(
            sample_ids=("s1",),
            vocabulary=vocab,
            values=np.zeros((1, 3)),
            mode=MODE_COUNTS,
        )


# -------------------------------------------------------------------- csv

def test_matrix_csv_round_trip_counts(tmp_path):
    vocab = ngram_vocab(("he", "et", "ēn"), lengths=(2,))
    m = matrix(vocab, [[3, 0, 1], [0, 2, 5]], ids=("A-1", "A-2"))
    path = str(tmp_path / "m.csv")
    write_matrix_csv(m, path)
    back = read_matrix_csv(path)
    assert back.sample_ids == m.sample_ids
    assert back.vocabulary.features == m.vocabulary.features
    assert back.vocabulary.kind == m.vocabulary.kind
    assert back.vocabulary.ngram_lengths == (2,)
    assert back.mode == MODE_COUNTS
    assert np.array_equal(back.values, m.values)


def test_matrix_csv_round_trip_relative_12_digits(tmp_path):
    vocab = word_vocab("die", "es")
    m = rel_matrix(vocab, [[1 / 3, 1 / 7], [2 / 3, 0.0]])
    path = str(tmp_path / "m.csv")
    write_matrix_csv(m, path)
    back = read_matrix_csv(path)
    assert np.allclose(back.values, m.values, rtol=1e-11, atol=0)
    assert back.mode == MODE_RELATIVE


def test_matrix_csv_refuses_garbage(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("sample_id,a\nrow1,1\n", encoding="utf-8")
    with pytest.raises(MatrixFormatError):
        read_matrix_csv(str(path))
