import numpy as np
import pytest

from coclust import SearchIndex

# (name, description, keywords, visits); 18 of these match "education system parameter"
EDUCATION_LINKS = [
    ("www.education.ac.in", "we deal in all type of education", "education,system,parameter", 9),
    ("www.schoolsystem.org", "school system reviews", "education,system", 14),
    ("www.params.net", "tuning parameter guides", "parameter", 3),
    ("www.edu-board.gov", "state education board", "education,board", 0),
    ("www.systems.io", "operating system notes", "system,kernel", 21),
    ("www.learn.com", "online learning", "education,online", 5),
    ("www.metrics.edu", "education parameter metrics", "education,parameter", 7),
    ("www.sysparam.dev", "system parameter tuning", "system,parameter", 0),
    ("www.college.ac.in", "college admissions", "education,college", 2),
    ("www.exam.org", "exam results", "exam,education", 0),
    ("www.infra.net", "infrastructure system", "system,infrastructure", 11),
    ("www.config.dev", "configuration parameter reference", "parameter,config", 1),
    ("www.tutor.in", "home tutoring", "education,tutor", 0),
    ("www.edusys.ac.in", "education system research", "education,system,research", 6),
    ("www.policy.gov", "education policy", "education,policy", 4),
    ("www.control.io", "control system design", "system,control", 0),
    ("www.grants.org", "research grants", "parameter,grant", 8),
    ("www.library.edu", "digital library", "education,library", 0),
    # non-matching
    ("www.cricket.com", "cricket scores", "cricket,sports", 30),
    ("www.recipes.net", "cooking recipes", "food,cooking", 12),
    ("www.travel.org", "travel deals", "travel,holiday", 0),
]


def build_index(links=EDUCATION_LINKS):
    index = SearchIndex()
    for name, desc, kws, visits in links:
        link_id = index.register_link(name, desc, kws)
        for _ in range(visits):
            index.record_visit(link_id)
    return index


@pytest.fixture
def education_index():
    return build_index()


def synthetic_tf(rng, n_docs, n_terms, rate=1.0):
    """Poisson term counts with every document non-empty."""
    D = rng.poisson(rate, size=(n_docs, n_terms)).astype(float)
    for i in np.flatnonzero(D.sum(axis=1) == 0):
        D[i, rng.integers(n_terms)] = 1.0
    return D


def block_corpus(docs_per_block=5, words_per_block=5):
    """Two topics over disjoint vocabularies, as raw texts."""
    topic_a = [f"alpha{k}" for k in range(words_per_block)]
    topic_b = [f"beta{k}" for k in range(words_per_block)]
    texts = []
    for words in (topic_a, topic_b):
        for d in range(docs_per_block):
            texts.append(" ".join(w for k, w in enumerate(words) for _ in range(1 + (d + k) % 3)))
    return texts


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")


class criterion:
    """Context manager recording one acceptance criterion's outcome."""

    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok else f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''} {self.detail}".strip()
        ACCEPTANCE[self.number] = (ok, self.title, detail)
        return False
