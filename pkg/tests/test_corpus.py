import string

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coclust.corpus import (
    CorrelationMatrix,
    Document,
    Vocabulary,
    build_correlation_matrix,
    default_stopwords,
    load_stopwords,
    normalize,
    remove_stopwords,
    tokenize,
)
from coclust.errors import DimensionMismatch, InvalidMatrix

from oracles import count_matrix


class TestTokenize:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("Education System!", ["education", "system"]),
            ("", []),
            ("we deal in all type of education", ["we", "deal", "in", "all", "type", "of", "education"]),
            ("www.education.ac.in", ["www", "education", "ac", "in"]),
            ("  tabs\tand\nnewlines ", ["tabs", "and", "newlines"]),
        ],
    )
    def test_examples(self, text, expected):
        assert tokenize(text) == expected

    @given(st.text())
    def test_idempotent_on_own_output(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens

    @given(st.text(alphabet=string.ascii_letters + string.punctuation + " "))
    def test_output_is_clean(self, text):
        for tok in tokenize(text):
            assert tok == tok.lower()
            assert not set(tok) & set(string.punctuation)
            assert tok.strip() == tok != ""


class TestStopwords:
    def test_examples(self):
        toks = ["we", "deal", "in", "all", "type", "of", "education"]
        assert remove_stopwords(toks, {"we", "in", "all", "of"}) == ["deal", "type", "education"]
        assert remove_stopwords([], {"the"}) == []
        assert remove_stopwords(["education"], {"the"}) == ["education"]

    @given(st.lists(st.sampled_from(["a", "the", "education", "system", "of"])), st.sets(st.sampled_from(["a", "the", "of"])))
    def test_properties(self, tokens, stoplist):
        assert remove_stopwords(tokens, set()) == tokens
        once = remove_stopwords(tokens, stoplist)
        assert remove_stopwords(once, stoplist) == once

    def test_default_list_keeps_domain_words(self):
        stop = default_stopwords()
        assert {"we", "in", "all", "of", "the"} <= stop
        assert not {"education", "system", "parameter", "type", "deal"} & stop
        assert normalize("we deal in all type of education") == ["deal", "type", "education"]

    def test_file_format(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("# header comment\nthe\n\nAnd  # trailing comment\n", encoding="utf-8")
        assert load_stopwords(path) == {"the", "and"}


class TestCorrelationMatrix:
    def test_tf_direct_count(self):
        m = build_correlation_matrix([Document(0, "a a b")], Vocabulary(("a", "b")), stoplist=set())
        assert m.values.tolist() == [[2.0, 1.0]]

    def test_no_vocabulary_terms_gives_zero_row(self):
        docs = [Document(0, "x y"), Document(1, "a")]
        m = build_correlation_matrix(docs, Vocabulary(("a", "b")), stoplist=set())
        assert m.values.tolist() == [[0.0, 0.0], [1.0, 0.0]]

    def test_tfidf_against_hand_count(self):
        texts = ["a b a", "b c", "c d d a"]
        vocab = ["a", "b", "c", "d"]
        docs = [Document(i, t) for i, t in enumerate(texts)]
        m = build_correlation_matrix(docs, Vocabulary(tuple(vocab)), "tfidf", stoplist=set())
        expected = count_matrix([t.split() for t in texts], vocab, tfidf=True)
        np.testing.assert_allclose(m.values, expected, rtol=0, atol=1e-15)
        # frozen from the hand count: ln(3/2) and 2 ln 3
        assert m.values[0, 0] == pytest.approx(2 * 0.4054651081081644, abs=1e-15)
        assert m.values[2, 3] == pytest.approx(2.1972245773362196, abs=1e-15)

    def test_strict_rejects_out_of_vocabulary(self):
        docs = [Document(0, "a zzz")]
        vocab = Vocabulary(("a",))
        assert build_correlation_matrix(docs, vocab, stoplist=set()).values.tolist() == [[1.0]]
        with pytest.raises(DimensionMismatch):
            build_correlation_matrix(docs, vocab, stoplist=set(), strict=True)

    def test_rejects_bad_weighting_and_duplicate_ids(self):
        vocab = Vocabulary(("a",))
        with pytest.raises(ValueError):
            build_correlation_matrix([Document(0, "a")], vocab, "bm25")
        with pytest.raises(ValueError):
            build_correlation_matrix([Document(0, "a"), Document(0, "a")], vocab)

    def test_vocabulary_is_bijection(self):
        vocab = Vocabulary.from_documents([Document(0, "the system, the parameter"), Document(1, "education system")])
        assert vocab.terms == ("education", "parameter", "system")
        assert [vocab.index[t] for t in vocab.terms] == [0, 1, 2]
        with pytest.raises(ValueError):
            Vocabulary(("a", "a"))

    def test_invariants(self):
        with pytest.raises(InvalidMatrix):
            CorrelationMatrix([[1.0, -0.5]])
        with pytest.raises(InvalidMatrix):
            CorrelationMatrix([[np.inf]])
        with pytest.raises(DimensionMismatch):
            CorrelationMatrix(np.zeros((0, 3)))

    @given(st.lists(st.text(alphabet="abcde ,.!", max_size=40), min_size=1, max_size=6))
    def test_row_sums_and_determinism(self, texts):
        docs = [Document(i, t) for i, t in enumerate(texts)]
        stop = {"a"}
        vocab = Vocabulary.from_documents(docs, stop)
        if not len(vocab):
            return
        m1 = build_correlation_matrix(docs, vocab, stoplist=stop)
        m2 = build_correlation_matrix(docs, vocab, stoplist=stop)
        assert m1.values.tobytes() == m2.values.tobytes()
        for i, t in enumerate(texts):
            kept = [tok for tok in normalize(t, stop) if tok in vocab]
            assert m1.values[i].sum() == len(kept)
