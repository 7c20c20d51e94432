"""Masked-link evaluation: hold out known links, refit, and measure how
highly the model ranks them against sampled absent links.

Positives are all one-cells in the chosen target columns (optionally
restricted to target rows, e.g. a topic cluster picked by token query);
an equal number of zero-cells (configurable ratio) is sampled as
negatives. Both are hidden from training. Each positive is ranked
against the negatives by score, with ties broken by (row, col), and
hit@k is the fraction of positives ranked within the top k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DataError
from .linkmodels import EnsembleConfig, fit_with_config
from .masked import ONE, UNKNOWN, ZERO, MaskedBinaryMatrix
from .seeding import derive_seed

DEFAULT_KS = (1, 3)


@dataclass(frozen=True)
class MaskSpec:
    """Cells hidden for one evaluation round."""

    positives: tuple
    negatives: tuple
    seed: int

    def __post_init__(self):
        cells = list(self.positives) + list(self.negatives)
        if len(set(cells)) != len(cells):
            raise ArgumentError("masked cells must be distinct")


@dataclass(frozen=True)
class EvalReport:
    """hit@k means over folds with normal-approximation 95% intervals."""

    hit_at: dict
    ci95: dict
    per_fold: dict
    folds: int

    def to_dict(self) -> dict:
        return {
            "hit_at": {str(k): v for k, v in self.hit_at.items()},
            "ci95": {str(k): list(v) for k, v in self.ci95.items()},
            "per_fold": {str(k): list(v) for k, v in self.per_fold.items()},
            "folds": self.folds,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            hit_at={int(k): float(v) for k, v in data["hit_at"].items()},
            ci95={int(k): tuple(v) for k, v in data["ci95"].items()},
            per_fold={int(k): tuple(v) for k, v in data["per_fold"].items()},
            folds=int(data["folds"]),
        )


@dataclass(frozen=True)
class SeparationStats:
    """Per-class score quartiles with cumulative counts at each boundary."""

    positive_scores: tuple
    negative_scores: tuple
    positive_quartiles: tuple  # (q25, median, q75)
    negative_quartiles: tuple
    positive_counts: tuple  # scores <= each quartile boundary
    negative_counts: tuple

    def to_dict(self) -> dict:
        return {
            "positive_scores": list(self.positive_scores),
            "negative_scores": list(self.negative_scores),
            "positive_quartiles": list(self.positive_quartiles),
            "negative_quartiles": list(self.negative_quartiles),
            "positive_counts": list(self.positive_counts),
            "negative_counts": list(self.negative_counts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SeparationStats":
        return cls(
            positive_scores=tuple(data["positive_scores"]),
            negative_scores=tuple(data["negative_scores"]),
            positive_quartiles=tuple(data["positive_quartiles"]),
            negative_quartiles=tuple(data["negative_quartiles"]),
            positive_counts=tuple(data["positive_counts"]),
            negative_counts=tuple(data["negative_counts"]),
        )


@dataclass(frozen=True)
class RankingTable:
    """(label, designated set, mean predicted score), score-descending."""

    rows: tuple

    def to_dict(self) -> dict:
        return {"rows": [[label, set_label, score] for label, set_label, score in self.rows]}

    @classmethod
    def from_dict(cls, data: dict) -> "RankingTable":
        return cls(rows=tuple((r[0], r[1], float(r[2])) for r in data["rows"]))


def _col_indices(T: MaskedBinaryMatrix, labels) -> list:
    return [T.col_index(label) for label in labels]


def _row_indices(T: MaskedBinaryMatrix, labels) -> list:
    return [T.row_index(label) for label in labels]


def mask_links(
    T: MaskedBinaryMatrix,
    target_cols,
    seed: int,
    target_rows=None,
    negative_ratio: float = 1.0,
):
    """Hide every one-cell in the target columns plus sampled zero-cells.

    ``target_rows`` (labels) restricts the hidden links to a row subset,
    mirroring an evaluation scoped to one topic cluster; by default the
    whole column is masked. Negatives are sampled uniformly without
    replacement from all zero-cells of the matrix. Returns the masked
    copy and the MaskSpec; T itself is unmodified.
    """
    col_idx = _col_indices(T, target_cols)
    if not col_idx:
        raise ArgumentError("target_cols must not be empty")
    if negative_ratio <= 0:
        raise ArgumentError("negative_ratio must be > 0")
    row_idx = None if target_rows is None else set(_row_indices(T, target_rows))

    positives = [
        (int(i), int(j))
        for j in col_idx
        for i in np.flatnonzero(T.cells[:, j] == ONE)
        if row_idx is None or i in row_idx
    ]
    positives.sort()
    if not positives:
        raise DataError("target columns contain no one-cells to mask")

    zero_cells = np.argwhere(T.cells == ZERO)
    n_negatives = int(round(len(positives) * negative_ratio))
    if len(zero_cells) < n_negatives:
        raise DataError(
            f"need {n_negatives} zero-cells for negatives, only {len(zero_cells)} exist"
        )
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(zero_cells), size=n_negatives, replace=False)
    negatives = sorted((int(i), int(j)) for i, j in zero_cells[picked])

    cells = T.cells.copy()
    for i, j in positives + negatives:
        cells[i, j] = UNKNOWN
    spec = MaskSpec(positives=tuple(positives), negatives=tuple(negatives), seed=int(seed))
    return T.with_cells(cells), spec


def hit_at_k(scores, spec: MaskSpec, k: int) -> float:
    """Fraction of positives ranked within the top k against the negatives.

    A positive's rank is its 1-based position when inserted into the
    negatives sorted by score descending, ties broken by (row, col)
    ascending.
    """
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if not spec.positives:
        raise DataError("mask spec contains no positives")
    scores = np.asarray(scores, dtype=np.float64)
    neg_scores = np.array([scores[c] for c in spec.negatives])
    hits = 0
    for cell in spec.positives:
        s = scores[cell]
        ahead = int((neg_scores > s).sum())
        for other, s_other in zip(spec.negatives, neg_scores):
            if s_other == s and other < cell:
                ahead += 1
        if ahead + 1 <= k:
            hits += 1
    return hits / len(spec.positives)


def cross_validate(
    T: MaskedBinaryMatrix,
    target_cols,
    model_config: EnsembleConfig,
    folds: int,
    seed: int,
    target_rows=None,
    ks=DEFAULT_KS,
    negative_ratio: float = 1.0,
    scorer=None,
) -> EvalReport:
    """hit@k across folds; positives are fixed by the data, negatives
    are resampled per fold.

    ``scorer`` maps (masked matrix, fold seed) to a score matrix and
    defaults to fitting the Boolean + logistic ensemble.
    """
    if folds < 2:
        raise ArgumentError("folds must be >= 2")
    if scorer is None:
        def scorer(masked, fold_seed):
            return fit_with_config(masked, model_config, fold_seed).scores

    per_fold = {k: [] for k in ks}
    for fold in range(folds):
        fold_seed = derive_seed(seed, "fold", fold)
        masked, spec = mask_links(
            T, target_cols, fold_seed, target_rows=target_rows, negative_ratio=negative_ratio
        )
        scores = scorer(masked, fold_seed)
        for k in ks:
            per_fold[k].append(hit_at_k(scores, spec, k))

    hit_at = {k: float(np.mean(vals)) for k, vals in per_fold.items()}
    ci95 = {}
    for k, vals in per_fold.items():
        sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        half = 1.96 * sd / np.sqrt(len(vals))
        ci95[k] = (hit_at[k] - half, hit_at[k] + half)
    return EvalReport(
        hit_at=hit_at,
        ci95=ci95,
        per_fold={k: tuple(v) for k, v in per_fold.items()},
        folds=folds,
    )


def separation_stats(scores, spec: MaskSpec) -> SeparationStats:
    """Quartiles (linear interpolation) and cumulative boundary counts
    for positive vs negative scores."""
    if not spec.positives or not spec.negatives:
        raise ArgumentError("need both positives and negatives for separation stats")
    scores = np.asarray(scores, dtype=np.float64)
    pos = np.array([scores[c] for c in spec.positives])
    neg = np.array([scores[c] for c in spec.negatives])

    def describe(values):
        quartiles = tuple(float(q) for q in np.percentile(values, [25, 50, 75]))
        counts = tuple(int((values <= q).sum()) for q in quartiles)
        return quartiles, counts

    pos_q, pos_c = describe(pos)
    neg_q, neg_c = describe(neg)
    return SeparationStats(
        positive_scores=tuple(float(v) for v in pos),
        negative_scores=tuple(float(v) for v in neg),
        positive_quartiles=pos_q,
        negative_quartiles=neg_q,
        positive_counts=pos_c,
        negative_counts=neg_c,
    )


def plot_data_text(report: EvalReport = None, stats: SeparationStats = None,
                   ranking: RankingTable = None) -> str:
    """Tabular export of the evaluation results for external plotting
    tools: one (kind, label, value...) row per datum, tab-separated."""
    lines = ["kind\tlabel\tvalue\tlow\thigh"]
    if report is not None:
        for k in sorted(report.hit_at):
            lo, hi = report.ci95[k]
            lines.append(f"hit_at\t{k}\t{report.hit_at[k]:.6f}\t{lo:.6f}\t{hi:.6f}")
        for k in sorted(report.per_fold):
            for fold, value in enumerate(report.per_fold[k]):
                lines.append(f"fold_hit_at\t{k}.{fold}\t{value:.6f}\t\t")
    if stats is not None:
        for cls, quartiles in (
            ("positive", stats.positive_quartiles),
            ("negative", stats.negative_quartiles),
        ):
            for name, q in zip(("q25", "median", "q75"), quartiles):
                lines.append(f"quartile\t{cls}.{name}\t{q:.6f}\t\t")
    if ranking is not None:
        for label, set_label, score in ranking.rows:
            lines.append(f"ranking\t{label}\t{score:.6f}\t\t{set_label}")
    return "\n".join(lines) + "\n"


def rank_candidates(
    T: MaskedBinaryMatrix,
    held_out_cols,
    target_rows,
    model_config: EnsembleConfig,
    seed: int,
    set_labels=None,
) -> RankingTable:
    """Fully mask the held-out materials' links inside the target rows,
    refit, and rank the materials by mean predicted score over those
    rows. The rows and columns themselves stay in the matrix.
    """
    held_out_cols = list(held_out_cols)
    col_idx = _col_indices(T, held_out_cols)
    row_idx = _row_indices(T, target_rows)
    if not row_idx:
        raise ArgumentError("target_rows must not be empty")
    set_labels = dict(set_labels or {})

    cells = T.cells.copy()
    for i in row_idx:
        for j in col_idx:
            if cells[i, j] == ONE:
                cells[i, j] = UNKNOWN
    masked = T.with_cells(cells)

    model = fit_with_config(masked, model_config, seed)
    rows = []
    for label, j in zip(held_out_cols, col_idx):
        mean_score = float(np.mean([model.scores[i, j] for i in row_idx]))
        rows.append((label, set_labels.get(label, ""), mean_score))
    rows.sort(key=lambda r: (-r[2], r[0]))
    return RankingTable(rows=tuple(rows))
