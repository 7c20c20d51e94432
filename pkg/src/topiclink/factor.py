"""Dense NMF primitives and automatic rank selection.

Plain nonnegative matrix factorization uses Lee-Seung multiplicative
updates for the Frobenius objective, which are monotone and preserve
nonnegativity. Rank selection runs an ensemble of factorizations of
noise-perturbed copies of the input, matches factor columns across the
ensemble by cosine similarity, and scores each candidate rank by the
mean silhouette of the matched column clusters: ranks whose factors
survive perturbation are stable, overfitted ranks are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ArgumentError, DataError
from .seeding import derive_seed, rng_for

_EPS = 1e-12

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITERS = 1000
DEFAULT_NOISE = 0.03
DEFAULT_STABILITY_THRESHOLD = 0.7


@dataclass(frozen=True)
class FactorPair:
    """Nonnegative factors W (n x k) and H (k x m) with fit diagnostics.

    ``reconstruction_error`` is the Frobenius norm of X - W @ H at
    termination and ``error_trace`` holds the per-iteration norms.
    """

    W: np.ndarray
    H: np.ndarray
    rank: int
    reconstruction_error: float
    iterations_run: int
    seed: int
    error_trace: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class RankSelectionReport:
    """Stability and reconstruction error per candidate rank."""

    candidate_ranks: tuple
    stability_scores: dict
    reconstruction_errors: dict
    selected_rank: int
    ensemble_size: int


def _as_matrix(X, name: str = "X") -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ArgumentError(f"{name} must be a 2-D matrix with at least one row and column")
    if not np.isfinite(X).all():
        raise ArgumentError(f"{name} must contain only finite values")
    return X


def _require_nonnegative(X: np.ndarray, name: str = "X") -> None:
    if (X < 0).any():
        raise DataError(f"{name} must be elementwise nonnegative")


def frobenius_error(X, W, H) -> float:
    """Frobenius norm of the residual X - W @ H."""
    X = _as_matrix(X, "X")
    W = _as_matrix(W, "W")
    H = _as_matrix(H, "H")
    if W.shape[0] != X.shape[0] or H.shape[1] != X.shape[1] or W.shape[1] != H.shape[0]:
        raise ArgumentError(
            f"incompatible shapes X{X.shape}, W{W.shape}, H{H.shape}"
        )
    return float(np.linalg.norm(X - W @ H))


def _initial_factors(X: np.ndarray, k: int, rng: np.random.Generator):
    # uniform[0,1) entries scaled so the initial product matches X's magnitude
    scale = np.sqrt(max(X.mean(), _EPS) / k)
    W = rng.random((X.shape[0], k)) * scale
    H = rng.random((k, X.shape[1])) * scale
    return W, H


def nmf(
    X,
    k: int,
    seed: int,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> FactorPair:
    """Factorize X ~ W @ H with nonnegative factors.

    Multiplicative updates minimize the Frobenius reconstruction error;
    iteration stops at ``max_iters`` or when the relative error
    improvement drops below ``tol``. Deterministic for a fixed seed.
    """
    X = _as_matrix(X)
    _require_nonnegative(X)
    if not (1 <= int(k) <= min(X.shape)):
        raise ArgumentError(f"k={k} out of range [1, {min(X.shape)}]")
    if max_iters < 1:
        raise ArgumentError("max_iters must be >= 1")
    if tol <= 0:
        raise ArgumentError("tol must be > 0")
    k = int(k)

    rng = np.random.default_rng(seed)
    W, H = _initial_factors(X, k, rng)

    trace = []
    prev_err = float(np.linalg.norm(X - W @ H))
    iters = 0
    for _ in range(max_iters):
        H *= (W.T @ X) / (W.T @ W @ H + _EPS)
        W *= (X @ H.T) / (W @ (H @ H.T) + _EPS)
        iters += 1
        err = float(np.linalg.norm(X - W @ H))
        trace.append(err)
        if prev_err > 0 and (prev_err - err) / prev_err < tol:
            prev_err = err
            break
        prev_err = err

    return FactorPair(
        W=W,
        H=H,
        rank=k,
        reconstruction_error=prev_err,
        iterations_run=iters,
        seed=int(seed),
        error_trace=np.asarray(trace),
    )


def _match_columns(reference: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Labels assigning each column of ``columns`` to a reference column,
    maximizing total cosine similarity (one-to-one)."""
    sim = reference.T @ columns
    row_ind, col_ind = linear_sum_assignment(-sim)
    labels = np.empty(columns.shape[1], dtype=np.int64)
    labels[col_ind] = row_ind
    return labels


def _normalize_columns(W: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(W, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return W / safe


def _silhouette_cosine(points: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Mean silhouette over unit columns with cosine distance.

    For k = 1 there is no separation term; the score degrades to
    cohesion only (1 - mean distance to the other cluster members).
    """
    n_pts = points.shape[1]
    sim = np.clip(points.T @ points, -1.0, 1.0)
    dist = 1.0 - sim
    np.fill_diagonal(dist, 0.0)
    if k == 1:
        if n_pts < 2:
            return 1.0
        per_point = dist.sum(axis=1) / (n_pts - 1)
        return float(np.mean(1.0 - per_point))

    cluster_masks = [labels == c for c in range(k)]
    scores = np.zeros(n_pts)
    for i in range(n_pts):
        own = cluster_masks[labels[i]]
        own_size = own.sum()
        if own_size <= 1:
            scores[i] = 0.0
            continue
        a = dist[i, own].sum() / (own_size - 1)
        b = min(
            dist[i, mask].mean()
            for c, mask in enumerate(cluster_masks)
            if c != labels[i] and mask.any()
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(np.mean(scores))


def select_rank(
    X,
    candidates,
    ensemble_size: int,
    seed: int,
    noise: float = DEFAULT_NOISE,
    stability_threshold: float = DEFAULT_STABILITY_THRESHOLD,
    max_iters: int = 300,
    tol: float = 1e-5,
) -> RankSelectionReport:
    """Choose a factorization rank by perturbation stability.

    For each candidate rank, ``ensemble_size`` factorizations of
    elementwise uniform[1-noise, 1+noise]-perturbed copies of X are
    matched column-to-column against the first member and scored by mean
    cosine silhouette. The selected rank is the largest candidate whose
    stability reaches ``stability_threshold``; if none does, the
    candidate with maximal stability wins (ties prefer the smaller rank).
    """
    X = _as_matrix(X)
    _require_nonnegative(X)
    if not (X > 0).any():
        raise DataError("cannot select a rank for an all-zero matrix")
    candidates = sorted({int(k) for k in candidates})
    if not candidates:
        raise ArgumentError("candidates must be non-empty")
    limit = min(X.shape)
    for k in candidates:
        if not (1 <= k <= limit):
            raise ArgumentError(f"candidate rank {k} out of range [1, {limit}]")
    if ensemble_size < 2:
        raise ArgumentError("ensemble_size must be >= 2")

    stability = {}
    errors = {}
    for k in candidates:
        member_cols = []
        member_errors = []
        for member in range(ensemble_size):
            perturb = rng_for(seed, "perturb", k, member).uniform(
                1.0 - noise, 1.0 + noise, size=X.shape
            )
            fit = nmf(
                X * perturb,
                k,
                seed=derive_seed(seed, "nmf", k, member),
                max_iters=max_iters,
                tol=tol,
            )
            member_cols.append(_normalize_columns(fit.W))
            member_errors.append(fit.reconstruction_error)

        reference = member_cols[0]
        labels = np.concatenate([_match_columns(reference, cols) for cols in member_cols])
        points = np.hstack(member_cols)
        stability[k] = _silhouette_cosine(points, labels, k)
        errors[k] = float(np.mean(member_errors))

    eligible = [k for k in candidates if stability[k] >= stability_threshold]
    if eligible:
        selected = max(eligible)
    else:
        # ties prefer the smaller rank
        selected = max(candidates, key=lambda k: (stability[k], -k))

    return RankSelectionReport(
        candidate_ranks=tuple(candidates),
        stability_scores=stability,
        reconstruction_errors=errors,
        selected_rank=selected,
        ensemble_size=int(ensemble_size),
    )
