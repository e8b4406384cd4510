"""Fuzzy co-clustering (FCC_STF) and a priority-frame keyword search engine."""

from .coclustering import (
    CoClusterResult,
    FccStfConfig,
    IterationRecord,
    IterationTrace,
    clip_renormalize,
    compute_doc_update_terms,
    compute_word_update_terms,
    export_trace,
    init_memberships,
    objective,
    parse_trace,
    run_fcc_stf,
    update_doc_memberships,
    update_word_memberships,
)
from .corpus import (
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
from .errors import (
    AllClipped,
    CoclustError,
    CorruptStore,
    DegenerateCluster,
    DimensionMismatch,
    EmptyKeywords,
    FieldTooLong,
    InvalidMatrix,
    LimitViolation,
    NonFinite,
    UnknownLink,
)
from .search_index import (
    LinkRecord,
    QueryFrameSet,
    ReplacementPolicy,
    SearchIndex,
    apply_replacement,
)
from .store import load_matrix, load_store, save_matrix, save_store

__version__ = "0.1.0"
