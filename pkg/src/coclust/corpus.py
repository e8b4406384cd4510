"""Text normalization and document-term correlation matrices.

Documents and queries go through the same pipeline: lowercase, replace ASCII
punctuation with whitespace, split on whitespace, then drop stop words.
"""

from __future__ import annotations

import math
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidMatrix

_PUNCT_RE = re.compile(f"[{re.escape(string.punctuation)}]")

WEIGHTINGS = ("tf", "tfidf")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into lowercase tokens with ASCII punctuation removed.

    >>> tokenize("Education System!")
    ['education', 'system']
    """
    return _PUNCT_RE.sub(" ", text.lower()).split()


def parse_stopwords(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.update(tokenize(line))
    return frozenset(words)


def load_stopwords(path) -> frozenset[str]:
    """Read a stop-word file: UTF-8, one token per line, ``#`` starts a comment."""
    with open(path, encoding="utf-8") as fh:
        return parse_stopwords(fh)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("coclust").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return parse_stopwords(text.splitlines())


def remove_stopwords(tokens: Sequence[str], stoplist: Iterable[str] | None = None) -> list[str]:
    if stoplist is None:
        stoplist = default_stopwords()
    elif not isinstance(stoplist, (set, frozenset)):
        stoplist = frozenset(stoplist)
    return [t for t in tokens if t not in stoplist]


def normalize(text: str, stoplist: Iterable[str] | None = None) -> list[str]:
    """Full pipeline: tokenize then remove stop words."""
    return remove_stopwords(tokenize(text), stoplist)


@dataclass(frozen=True)
class Document:
    id: int
    text: str


@dataclass(frozen=True)
class Vocabulary:
    """Ordered distinct terms with a term -> column index map."""

    terms: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        index = {t: j for j, t in enumerate(terms)}
        if len(index) != len(terms):
            raise ValueError("vocabulary terms must be distinct")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    @classmethod
    def from_documents(cls, docs: Sequence[Document], stoplist=None) -> "Vocabulary":
        """Sorted vocabulary of every normalized token in ``docs``."""
        terms = set()
        for doc in docs:
            terms.update(normalize(doc.text, stoplist))
        return cls(tuple(sorted(terms)))


@dataclass(frozen=True)
class CorrelationMatrix:
    """N x K grid of nonnegative document-word correlation degrees."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"correlation matrix must be 2-D and non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidMatrix("correlation matrix contains non-finite values")
        if np.any(arr < 0):
            i, j = np.argwhere(arr < 0)[0]
            raise InvalidMatrix(f"negative correlation d[{i},{j}] = {arr[i, j]!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n_docs(self) -> int:
        return self.values.shape[0]

    @property
    def n_terms(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, CorrelationMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


def build_correlation_matrix(
    docs: Sequence[Document],
    vocab: Vocabulary,
    weighting: str = "tf",
    stoplist=None,
    strict: bool = False,
) -> CorrelationMatrix:
    """Build the document-term matrix ``d_ij``.

    Parameters
    ----------
    docs : sequence of Document
        Row order of the result follows this sequence.
    vocab : Vocabulary
        Column order of the result.
    weighting : {"tf", "tfidf"}
        ``tf`` counts occurrences of term j in document i. ``tfidf`` multiplies
        the count by ``ln(N / df_j)``; terms that occur in no document get a
        zero column.
    stoplist : set of str, optional
        Stop words to drop; defaults to the shipped English list.
    strict : bool
        Raise DimensionMismatch when a document contains a token outside
        ``vocab`` instead of ignoring it.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    if not docs:
        raise DimensionMismatch("at least one document is required")
    if len(vocab) == 0:
        raise DimensionMismatch("vocabulary is empty")
    ids = [d.id for d in docs]
    if len(set(ids)) != len(ids):
        raise ValueError("document ids must be unique")

    counts = np.zeros((len(docs), len(vocab)), dtype=float)
    for i, doc in enumerate(docs):
        for term, n in Counter(normalize(doc.text, stoplist)).items():
            j = vocab.index.get(term)
            if j is None:
                if strict:
                    raise DimensionMismatch(f"document {doc.id}: token {term!r} not in vocabulary")
                continue
            counts[i, j] = n

    if weighting == "tfidf":
        n_docs = len(docs)
        df = np.count_nonzero(counts, axis=0)
        idf = np.array([math.log(n_docs / k) if k else 0.0 for k in df])
        counts = counts * idf
    return CorrelationMatrix(counts)
