"""Fully-resolved run configuration for the pipeline CLI.

Every tunable of every stage lives here so a run can be reproduced from
the config echo in the bundle manifest. Precedence when building from
the command line: flags > config file > defaults. Unknown keys in a
config file are rejected.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .errors import ArgumentError
from .hierarchy import HNMFkConfig
from .linkmodels import EnsembleConfig, LMFParams


@dataclass(frozen=True)
class RunConfig:
    seed: int = 7
    # hierarchy
    k_min: int = 1
    k_max: int = 6
    s_min: int = 5
    d_max: int = 3
    ensemble_size: int = 8
    noise: float = 0.03
    stability_threshold: float = 0.7
    # ingestion
    min_df: int = 2
    max_df_fraction: float = 1.0
    # property matrix
    facet: str = "material"
    assoc_min: int = 2
    coverage_floor: int = 5
    # link models
    candidates: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    ensemble_size_eval: int = 10
    restarts: int = 4
    threshold_step: float = 0.05
    lmf_lambda: float = 0.01
    lmf_learning_rate: float = 0.05
    lmf_epochs: int = 500
    # evaluation
    folds: int = 3
    negative_ratio: float = 1.0
    query_top_n: int = 10

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(int(k) for k in self.candidates))
        if not (1 <= self.k_min <= self.k_max):
            raise ArgumentError("need 1 <= k_min <= k_max")
        if self.folds < 2:
            raise ArgumentError("folds must be >= 2")
        if not (0 < self.threshold_step < 1):
            raise ArgumentError("threshold_step must be in (0, 1)")
        if self.lmf_lambda < 0 or self.lmf_learning_rate <= 0 or self.lmf_epochs < 1:
            raise ArgumentError("bad logistic-fit hyperparameters")
        if self.negative_ratio <= 0:
            raise ArgumentError("negative_ratio must be > 0")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["candidates"] = list(self.candidates)
        return data

    def hierarchy_config(self) -> HNMFkConfig:
        return HNMFkConfig(
            k_min=self.k_min,
            k_max=self.k_max,
            s_min=self.s_min,
            d_max=self.d_max,
            ensemble_size=self.ensemble_size,
            seed=self.seed,
            noise=self.noise,
            stability_threshold=self.stability_threshold,
        )

    def ensemble_config(self) -> EnsembleConfig:
        steps = int(round(1.0 / self.threshold_step)) - 1
        grid = tuple(round(self.threshold_step * i, 6) for i in range(1, steps + 1))
        return EnsembleConfig(
            candidates=self.candidates,
            ensemble_size=self.ensemble_size_eval,
            lmf=LMFParams(
                lam=self.lmf_lambda,
                learning_rate=self.lmf_learning_rate,
                epochs=self.lmf_epochs,
            ),
            restarts=self.restarts,
            thresholds=grid,
        )


def load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ArgumentError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ArgumentError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(file_path=None, overrides=None) -> RunConfig:
    """defaults < config file < explicit overrides (non-None values)."""
    merged = {}
    if file_path:
        merged.update(load_config_file(file_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in {f.name for f in fields(RunConfig)}:
            raise ArgumentError(f"unknown config key {key!r}")
        merged[key] = value
    return RunConfig(**merged)
