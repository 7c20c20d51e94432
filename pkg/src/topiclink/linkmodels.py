"""Boolean matrix factorization, logistic matrix factorization, and
their probabilistic ensemble for masked binary link matrices.

The Boolean side fits a real-valued NMF to the 0-imputed matrix and
binarizes the factors with a grid-searched threshold pair, minimizing
Hamming error on the observed cells under the OR-of-ANDs product. The
logistic side fits latent factors plus row/column bias vectors by
full-batch gradient descent on the masked Bernoulli log-likelihood.
The ensemble passes (Boolean reconstruction + biases) through the
sigmoid, so every cell scores in {sigmoid(b), sigmoid(1 + b)} with
b the summed biases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DataError
from .factor import nmf, select_rank
from .masked import MaskedBinaryMatrix
from .seeding import derive_seed

_CLAMP = 1e-12
_LOGIT_LIMIT = 700.0  # keeps exp() finite on the negative branch
_BELOW_ONE = float(np.nextafter(1.0, 0.0))

DEFAULT_THRESHOLD_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


def sigmoid(x):
    """Numerically stable logistic function.

    Branches on sign so neither exp() overflows; inputs are clamped to
    +-700 and the output to the largest double below 1, so the result
    stays strictly inside (0, 1) for any finite input.
    """
    arr = np.clip(np.asarray(x, dtype=np.float64), -_LOGIT_LIMIT, _LOGIT_LIMIT)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    out = np.minimum(out, _BELOW_ONE)
    return float(out[0]) if scalar else out.reshape(np.shape(x))


@dataclass(frozen=True)
class LMFParams:
    """Hyperparameters for the logistic factorization."""

    lam: float = 0.01
    learning_rate: float = 0.05
    epochs: int = 500


@dataclass(frozen=True)
class LMFModel:
    """Latent factors with row/column biases and their regularization."""

    W: np.ndarray
    H: np.ndarray
    b_r: np.ndarray
    b_c: np.ndarray
    lam: float
    rank: int
    loss_trace: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class BNMFkModel:
    """Binary factors with the thresholds that produced them.

    ``hamming_error`` counts observed cells where the Boolean product
    of the factors disagrees with the training matrix.
    """

    W_bool: np.ndarray
    H_bool: np.ndarray
    rank: int
    threshold_w: float
    threshold_h: float
    hamming_error: int
    rank_report: object = field(repr=False, default=None)


@dataclass(frozen=True)
class EnsembleModel:
    """Boolean reconstruction fused with logistic biases."""

    bnmfk: BNMFkModel
    b_r: np.ndarray
    b_c: np.ndarray
    scores: np.ndarray

    @property
    def rank(self) -> int:
        return self.bnmfk.rank

    def reconstruction(self) -> np.ndarray:
        return boolean_product(self.bnmfk.W_bool, self.bnmfk.H_bool)


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything needed to fit the ensemble on a masked matrix."""

    candidates: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    ensemble_size: int = 10
    lmf: LMFParams = LMFParams()
    restarts: int = 4
    thresholds: tuple = DEFAULT_THRESHOLD_GRID


def lmf_predict(model: LMFModel) -> np.ndarray:
    """Elementwise link probabilities sigmoid(W @ H + b_r + b_c)."""
    logits = model.W @ model.H + model.b_r[:, None] + model.b_c[None, :]
    return sigmoid(logits)


def lmf_loss(model: LMFModel, X: MaskedBinaryMatrix) -> float:
    """Masked negative Bernoulli log-likelihood plus L2 regularization."""
    if X.shape != (model.W.shape[0], model.H.shape[1]):
        raise ArgumentError(
            f"matrix shape {X.shape} does not match model "
            f"({model.W.shape[0]}, {model.H.shape[1]})"
        )
    mask = X.known_mask()
    values = X.values_filled(0.0)
    probs = np.clip(lmf_predict(model), _CLAMP, 1.0 - _CLAMP)
    data_term = -(
        values[mask] * np.log(probs[mask])
        + (1.0 - values[mask]) * np.log(1.0 - probs[mask])
    ).sum()
    reg = model.lam * (
        np.sum(model.W**2)
        + np.sum(model.H**2)
        + np.sum(model.b_r**2)
        + np.sum(model.b_c**2)
    )
    return float(data_term + reg)


def _lmf_gradients(W, H, b_r, b_c, values, mask, lam):
    probs = sigmoid(W @ H + b_r[:, None] + b_c[None, :])
    G = (probs - values) * mask
    return (
        G @ H.T + 2.0 * lam * W,
        W.T @ G + 2.0 * lam * H,
        G.sum(axis=1) + 2.0 * lam * b_r,
        G.sum(axis=0) + 2.0 * lam * b_c,
    )


def lmf_fit(
    X: MaskedBinaryMatrix,
    k: int,
    lam: float = 0.01,
    learning_rate: float = 0.05,
    epochs: int = 500,
    seed: int = 0,
) -> LMFModel:
    """Full-batch gradient descent on the masked logistic loss."""
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if learning_rate <= 0:
        raise ArgumentError("learning_rate must be > 0")
    if epochs < 1:
        raise ArgumentError("epochs must be >= 1")
    mask = X.known_mask()
    if not mask.any():
        raise DataError("nothing to fit: every cell is unknown")
    maskf = mask.astype(np.float64)
    values = X.values_filled(0.0)

    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 0.1, (X.rows, k))
    H = rng.normal(0.0, 0.1, (k, X.cols))
    b_r = np.zeros(X.rows)
    b_c = np.zeros(X.cols)

    def current_loss():
        return lmf_loss(
            LMFModel(W=W, H=H, b_r=b_r, b_c=b_c, lam=lam, rank=k), X
        )

    trace = [current_loss()]
    for _ in range(epochs):
        gW, gH, gbr, gbc = _lmf_gradients(W, H, b_r, b_c, values, maskf, lam)
        W = W - learning_rate * gW
        H = H - learning_rate * gH
        b_r = b_r - learning_rate * gbr
        b_c = b_c - learning_rate * gbc
        trace.append(current_loss())

    return LMFModel(
        W=W, H=H, b_r=b_r, b_c=b_c, lam=lam, rank=k, loss_trace=np.asarray(trace)
    )


def _as_binary(A, name: str) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ArgumentError(f"{name} must be 2-D")
    if not np.isin(A, (0, 1)).all():
        raise ArgumentError(f"{name} must be strictly binary")
    return A.astype(np.uint8)


def boolean_product(W_bool, H_bool) -> np.ndarray:
    """OR over r of (W[i, r] AND H[r, j]); multiplicity does not add."""
    W = _as_binary(W_bool, "W_bool")
    H = _as_binary(H_bool, "H_bool")
    if W.shape[1] != H.shape[0]:
        raise ArgumentError(f"incompatible shapes {W.shape} x {H.shape}")
    return np.minimum(W.astype(np.int32) @ H.astype(np.int32), 1).astype(np.uint8)


def _normalize_for_thresholding(W, H):
    w_max = W.max(axis=0)
    h_max = H.max(axis=1)
    Wn = W / np.where(w_max > 0, w_max, 1.0)
    Hn = H / np.where(h_max > 0, h_max, 1.0)[:, None]
    return Wn, Hn


def bnmf(
    T: MaskedBinaryMatrix,
    k: int,
    seed: int,
    restarts: int = 4,
    thresholds=DEFAULT_THRESHOLD_GRID,
    max_iters: int = 400,
    tol: float = 1e-7,
) -> BNMFkModel:
    """Boolean factorization at a fixed rank.

    Runs real-valued NMF on the 0-imputed matrix (several seeded
    restarts), rescales each factor column/row to peak 1, and scans the
    threshold grid for the binarization minimizing Hamming error on the
    observed cells. Ties prefer the smaller (t_w, t_h) pair, then the
    earlier restart.
    """
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if restarts < 1:
        raise ArgumentError("restarts must be >= 1")
    observed = T.known_mask()
    if not observed.any():
        raise DataError("cannot factorize a matrix with no observed cells")
    grid = np.asarray(sorted(thresholds), dtype=np.float64)
    if grid.size == 0 or (grid <= 0).any() or (grid >= 1).any():
        raise ArgumentError("thresholds must lie strictly inside (0, 1)")

    X0 = T.values_filled(0.0)
    target = T.cells.astype(np.int32)

    best = None  # (hamming, t_w_idx, t_h_idx, restart, W_bool, H_bool)
    for restart in range(restarts):
        fit = nmf(
            X0,
            min(k, min(X0.shape)),
            seed=derive_seed(seed, "restart", restart),
            max_iters=max_iters,
            tol=tol,
        )
        W = fit.W
        H = fit.H
        if fit.rank < k:  # pad so the model always carries rank k factors
            W = np.hstack([W, np.zeros((W.shape[0], k - fit.rank))])
            H = np.vstack([H, np.zeros((k - fit.rank, H.shape[1]))])
        Wn, Hn = _normalize_for_thresholding(W, H)

        W_bins = (Wn[None, :, :] >= grid[:, None, None]).astype(np.int32)
        H_bins = (Hn[None, :, :] >= grid[:, None, None]).astype(np.int32)
        products = np.minimum(np.einsum("ank,bkm->abnm", W_bins, H_bins), 1)
        hammings = ((products != target) & observed).sum(axis=(2, 3))

        flat = int(np.argmin(hammings))  # row-major: lexicographic in (t_w, t_h)
        a, b = divmod(flat, grid.size)
        ham = int(hammings[a, b])
        if best is None or (ham, a, b, restart) < best[:4]:
            best = (
                ham,
                a,
                b,
                restart,
                W_bins[a].astype(np.uint8),
                H_bins[b].astype(np.uint8),
            )
        if best[0] == 0 and best[1] == 0 and best[2] == 0:
            break  # nothing can beat a zero-error fit at the smallest thresholds

    ham, a, b, _, W_bool, H_bool = best
    return BNMFkModel(
        W_bool=W_bool,
        H_bool=H_bool,
        rank=k,
        threshold_w=float(grid[a]),
        threshold_h=float(grid[b]),
        hamming_error=ham,
    )


def bnmfk_fit(
    T: MaskedBinaryMatrix,
    candidates,
    ensemble_size: int,
    seed: int,
    restarts: int = 4,
    thresholds=DEFAULT_THRESHOLD_GRID,
) -> BNMFkModel:
    """Boolean factorization with the rank chosen by perturbation stability
    of the 0-imputed real-valued factorization."""
    report = select_rank(
        T.values_filled(0.0),
        candidates,
        ensemble_size,
        seed=derive_seed(seed, "rank"),
    )
    model = bnmf(
        T,
        report.selected_rank,
        seed=derive_seed(seed, "bnmf"),
        restarts=restarts,
        thresholds=thresholds,
    )
    return BNMFkModel(
        W_bool=model.W_bool,
        H_bool=model.H_bool,
        rank=model.rank,
        threshold_w=model.threshold_w,
        threshold_h=model.threshold_h,
        hamming_error=model.hamming_error,
        rank_report=report,
    )


def ensemble_fit(
    T: MaskedBinaryMatrix,
    candidates,
    lmf_params: LMFParams,
    seed: int,
    ensemble_size: int = 10,
    restarts: int = 4,
    thresholds=DEFAULT_THRESHOLD_GRID,
) -> EnsembleModel:
    """Fit the Boolean + logistic ensemble.

    The Boolean model provides the rank and the {0,1} reconstruction;
    a logistic fit at the same rank provides row/column biases; scores
    are sigmoid(reconstruction + b_r + b_c).
    """
    bool_model = bnmfk_fit(
        T,
        candidates,
        ensemble_size,
        seed=derive_seed(seed, "bool"),
        restarts=restarts,
        thresholds=thresholds,
    )
    reconstruction = boolean_product(bool_model.W_bool, bool_model.H_bool)
    lmf_model = lmf_fit(
        T,
        bool_model.rank,
        lam=lmf_params.lam,
        learning_rate=lmf_params.learning_rate,
        epochs=lmf_params.epochs,
        seed=derive_seed(seed, "lmf"),
    )
    scores = sigmoid(
        reconstruction.astype(np.float64)
        + lmf_model.b_r[:, None]
        + lmf_model.b_c[None, :]
    )
    return EnsembleModel(
        bnmfk=bool_model,
        b_r=lmf_model.b_r,
        b_c=lmf_model.b_c,
        scores=scores,
    )


def fit_with_config(T: MaskedBinaryMatrix, config: EnsembleConfig, seed: int) -> EnsembleModel:
    """ensemble_fit with every knob taken from an EnsembleConfig."""
    candidates = tuple(k for k in config.candidates if k <= min(T.shape))
    if not candidates:
        candidates = (1,)
    return ensemble_fit(
        T,
        candidates,
        config.lmf,
        seed,
        ensemble_size=config.ensemble_size,
        restarts=config.restarts,
        thresholds=config.thresholds,
    )
