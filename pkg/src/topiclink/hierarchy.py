"""Recursive hierarchical factorization producing a topic tree.

Each node factorizes its document-by-term submatrix at an automatically
selected rank, assigns every document to its strongest factor, and
recurses into the resulting clusters until a stopping condition fires.
Child submatrices keep only the columns that still have support, and
child seeds are derived from the parent seed plus the cluster index, so
sibling subtrees are independent and the whole construction is
deterministic for a fixed seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .factor import _as_matrix, _require_nonnegative, nmf, select_rank
from .seeding import derive_seed

ROOT_PATH_ID = "root"


class StopReason(str, enum.Enum):
    MIN_DIM = "min_dim"
    MIN_SIZE = "min_size"
    RANK_ONE = "rank_one"
    UNIFORM_LABELS = "uniform_labels"
    MAX_DEPTH = "max_depth"
    NONE = "none"


@dataclass(frozen=True)
class HNMFkConfig:
    """Tunables for tree construction.

    k_min/k_max bound candidate ranks, s_min is the smallest cluster
    still worth splitting, d_max the maximum depth. The remaining fields
    control the rank-selection ensemble and the per-node factorizations.
    """

    k_min: int = 1
    k_max: int = 8
    s_min: int = 5
    d_max: int = 3
    ensemble_size: int = 8
    seed: int = 0
    noise: float = 0.03
    stability_threshold: float = 0.7
    stability_max_iters: int = 300
    stability_tol: float = 1e-5
    nmf_max_iters: int = 500
    nmf_tol: float = 1e-6
    tokens_per_node: int = 20

    def __post_init__(self):
        if not (1 <= self.k_min <= self.k_max):
            raise ArgumentError("need 1 <= k_min <= k_max")
        if self.s_min < 1:
            raise ArgumentError("s_min must be >= 1")
        if self.d_max < 1:
            raise ArgumentError("d_max must be >= 1")
        if self.ensemble_size < 2:
            raise ArgumentError("ensemble_size must be >= 2")


@dataclass
class TopicNode:
    """One cluster in the hierarchy.

    ``path_id`` joins the cluster indices from the root ("root" for the
    root itself, then e.g. "2_0_1"). ``member_ids`` are the corpus row
    identifiers covered by this node; children partition them.
    ``zero_row_ids`` records documents that had no token support at this
    node and were routed to the largest sibling cluster.
    """

    path_id: str
    depth: int
    member_ids: tuple
    local_rank: int
    top_tokens: tuple
    stop_reason: StopReason
    children: list = field(default_factory=list)
    zero_row_ids: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return self.stop_reason != StopReason.NONE

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass
class TopicTree:
    root: TopicNode
    node_index: dict

    @property
    def total_topics(self) -> int:
        return len(self.node_index)

    def node(self, path_id: str) -> TopicNode:
        try:
            return self.node_index[path_id]
        except KeyError:
            raise ArgumentError(f"unknown node path_id {path_id!r}") from None

    def walk(self):
        """Yield nodes in depth-first pre-order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self):
        return [node for node in self.walk() if node.is_leaf]


def assign_clusters(W) -> np.ndarray:
    """Assign each row of W to its largest-weight column.

    Ties break toward the lowest column index.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.size == 0:
        raise ArgumentError("W must be a non-empty 2-D matrix")
    _require_nonnegative(W, "W")
    return np.argmax(W, axis=1)


def stopping_test(
    node_rows: int,
    node_cols: int,
    member_count: int,
    k_d: int,
    labels,
    depth: int,
    config: HNMFkConfig,
) -> StopReason:
    """First matching halt condition, in fixed order."""
    if min(node_rows, node_cols) <= 1:
        return StopReason.MIN_DIM
    if member_count <= config.s_min:
        return StopReason.MIN_SIZE
    if k_d == 1:
        return StopReason.RANK_ONE
    labels = np.asarray(labels)
    if labels.size > 0 and (labels == labels[0]).all():
        return StopReason.UNIFORM_LABELS
    if depth == config.d_max:
        return StopReason.MAX_DEPTH
    return StopReason.NONE


def child_candidate_ranks(k_d: int, config: HNMFkConfig):
    """Candidate ranks {k_min, ..., min(k_max, k_d + 1)} for a child node.

    Empty when k_min exceeds the upper bound; the caller must stop.
    """
    if k_d < 1:
        raise ArgumentError("k_d must be >= 1")
    upper = min(config.k_max, k_d + 1)
    return tuple(range(config.k_min, upper + 1))


def top_tokens(weights, vocabulary, n: int):
    """The n highest-weight tokens, descending; ties break lexicographically."""
    weights = np.asarray(weights, dtype=np.float64).ravel()
    vocabulary = list(vocabulary)
    if len(weights) != len(vocabulary):
        raise ArgumentError("weight vector and vocabulary lengths differ")
    if n <= 0:
        return []
    order = sorted(range(len(vocabulary)), key=lambda i: (-weights[i], vocabulary[i]))
    return [(vocabulary[i], float(weights[i])) for i in order[:n]]


def _route_zero_rows(sub: np.ndarray, labels: np.ndarray, k: int):
    """Send rows without any support to the largest cluster.

    Returns the possibly-updated labels and the indices (into sub) of
    the rerouted rows.
    """
    zero_rows = np.flatnonzero(~sub.any(axis=1))
    if zero_rows.size == 0:
        return labels, zero_rows
    nonzero = np.ones(len(labels), dtype=bool)
    nonzero[zero_rows] = False
    counts = np.bincount(labels[nonzero], minlength=k)
    labels = labels.copy()
    labels[zero_rows] = int(np.argmax(counts))
    return labels, zero_rows


def build_hierarchy(X, row_ids, config: HNMFkConfig, col_ids=None) -> TopicTree:
    """Recursively factorize X into a topic tree.

    ``row_ids`` name the rows (documents); ``col_ids`` name the columns
    (terms) and default to positional names. A node's displayed tokens
    come from the factor row of the parent factorization that spawned
    it; the root uses global column weight sums.
    """
    X = _as_matrix(X)
    _require_nonnegative(X)
    row_ids = tuple(row_ids)
    if len(row_ids) != X.shape[0]:
        raise ArgumentError("row_ids length must equal the number of rows")
    if col_ids is None:
        col_ids = tuple(f"term{j}" for j in range(X.shape[1]))
    else:
        col_ids = tuple(col_ids)
        if len(col_ids) != X.shape[1]:
            raise ArgumentError("col_ids length must equal the number of columns")

    vocab = np.asarray(col_ids, dtype=object)

    def make_node(row_idx, col_idx, depth, path, seed, signature, candidates):
        path_id = "_".join(str(p) for p in path) if path else ROOT_PATH_ID
        member_ids = tuple(row_ids[i] for i in row_idx)
        sub = X[np.ix_(row_idx, col_idx)]
        rows, cols = sub.shape
        tokens = tuple(top_tokens(signature, vocab, config.tokens_per_node))

        def leaf(reason, local_rank=1, zero_ids=()):
            return TopicNode(
                path_id=path_id,
                depth=depth,
                member_ids=member_ids,
                local_rank=local_rank,
                top_tokens=tokens,
                stop_reason=reason,
                zero_row_ids=tuple(zero_ids),
            )

        # conditions that precede the rank-dependent ones in the fixed
        # stopping order can be decided without factorizing
        if min(rows, cols) <= 1:
            return leaf(StopReason.MIN_DIM)
        if rows <= config.s_min:
            return leaf(StopReason.MIN_SIZE)
        candidates = tuple(k for k in candidates if 1 <= k <= min(rows, cols))
        if not candidates:
            # allowed ranks ran out: the cluster cannot be subdivided
            return leaf(StopReason.RANK_ONE)

        if len(candidates) == 1:
            k_d = candidates[0]
        else:
            report = select_rank(
                sub,
                candidates,
                config.ensemble_size,
                seed=derive_seed(seed, "rank"),
                noise=config.noise,
                stability_threshold=config.stability_threshold,
                max_iters=config.stability_max_iters,
                tol=config.stability_tol,
            )
            k_d = report.selected_rank

        fit = nmf(
            sub,
            k_d,
            seed=derive_seed(seed, "fit"),
            max_iters=config.nmf_max_iters,
            tol=config.nmf_tol,
        )
        labels = assign_clusters(fit.W)
        labels, zero_rows = _route_zero_rows(sub, labels, k_d)
        zero_ids = tuple(row_ids[row_idx[i]] for i in zero_rows)

        reason = stopping_test(rows, cols, len(row_idx), k_d, labels, depth, config)
        node = leaf(reason, local_rank=k_d, zero_ids=zero_ids)
        if reason != StopReason.NONE:
            return node

        child_cands = child_candidate_ranks(k_d, config)
        for c in range(k_d):
            members = np.flatnonzero(labels == c)
            if members.size == 0:
                continue
            child_rows = row_idx[members]
            support = sub[members].any(axis=0)
            child_cols = col_idx[support]
            child_signature = np.zeros(len(vocab))
            child_signature[col_idx] = fit.H[c]
            node.children.append(
                make_node(
                    child_rows,
                    child_cols,
                    depth + 1,
                    path + (c,),
                    derive_seed(seed, "child", c),
                    child_signature,
                    child_cands,
                )
            )
        return node

    root = make_node(
        np.arange(X.shape[0]),
        np.arange(X.shape[1]),
        depth=0,
        path=(),
        seed=config.seed,
        signature=X.sum(axis=0),
        candidates=tuple(range(config.k_min, config.k_max + 1)),
    )

    index = {}
    stack = [root]
    while stack:
        node = stack.pop()
        index[node.path_id] = node
        stack.extend(node.children)
    return TopicTree(root=root, node_index=index)
