"""Hierarchical topic modeling and Boolean + logistic link prediction
for topic-material association matrices, with a masked-link evaluation
harness, bundle persistence, and a read-only exploration service."""

from .corpus import Document, Vocabulary, build_tfidf, load_corpus, tokenize
from .errors import (
    ArgumentError,
    BundleLockedError,
    ChecksumError,
    DataError,
    DependencyError,
    SchemaError,
    TopicLinkError,
)
from .evaluate import (
    EvalReport,
    MaskSpec,
    RankingTable,
    SeparationStats,
    cross_validate,
    hit_at_k,
    mask_links,
    rank_candidates,
    separation_stats,
)
from .factor import FactorPair, RankSelectionReport, frobenius_error, nmf, select_rank
from .hierarchy import (
    HNMFkConfig,
    StopReason,
    TopicNode,
    TopicTree,
    assign_clusters,
    build_hierarchy,
    child_candidate_ranks,
    stopping_test,
    top_tokens,
)
from .linkmodels import (
    BNMFkModel,
    EnsembleConfig,
    EnsembleModel,
    LMFModel,
    LMFParams,
    bnmf,
    bnmfk_fit,
    boolean_product,
    ensemble_fit,
    fit_with_config,
    lmf_fit,
    lmf_loss,
    lmf_predict,
    sigmoid,
)
from .masked import ONE, UNKNOWN, ZERO, MaskedBinaryMatrix
from .propmatrix import (
    MaterialsPropertyMatrix,
    build_property_matrix,
    facet_distribution,
)
from .store import ModelBundle, SearchQuery, load_bundle, save_bundle, search
from .synth import generate_corpus, write_corpus

__version__ = "0.1.0"
