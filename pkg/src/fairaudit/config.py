"""Declarative audit configuration: one versioned JSON file drives a run.

Defaults encode the canonical German Credit audit (sensitive features
gender / age_group / foreign, conditioning on Attribute1, 3, 6, 10, 12,
14, rigour high, JS with max aggregation), so `audit` with no overrides
reproduces it.  Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .detection import DetectionConfig
from .divergence import DEFAULT_CLASS_REFERENCE, HIGH, LOW
from .revenue import RevenueConfig
from .scorecard import BinningConfig, ScorecardConfig, ScoreScaling

CONFIG_VERSION = 1

DEFAULT_SENSITIVE = ("gender", "age_group", "foreign")
DEFAULT_CONDITIONING = ("Attribute1", "Attribute3", "Attribute6",
                        "Attribute10", "Attribute12", "Attribute14")
# Violation-threshold bands per rigour level, calibrated on German Credit.
DEFAULT_INTERVALS = {HIGH: (0.005, 0.025), LOW: (0.02, 0.10)}

GERMAN_FORMAT = "german"
CSV_FORMAT = "csv"


class ConfigError(ValueError):
    """Invalid or unreadable audit configuration."""


@dataclass(frozen=True)
class DatasetConfig:
    path: str = "data/german.data"
    format: str = GERMAN_FORMAT
    outcome_column: str = "outcome"
    good_value: str = "good"
    bad_value: str = "bad"

    def __post_init__(self):
        if self.format not in (GERMAN_FORMAT, CSV_FORMAT):
            raise ConfigError(f"unknown dataset format {self.format!r}")


@dataclass(frozen=True)
class SweepGrid:
    start: int = 300
    stop: int = 800
    step: int = 10

    def thresholds(self) -> list[int]:
        if self.step <= 0:
            raise ConfigError("sweep step must be positive")
        grid = list(range(self.start, self.stop + 1, self.step))
        if not grid:
            raise ConfigError("sweep threshold grid is empty")
        return grid


@dataclass(frozen=True)
class AuditConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    sensitive_features: tuple[str, ...] = DEFAULT_SENSITIVE
    conditioning_columns: tuple[str, ...] = DEFAULT_CONDITIONING
    detection: DetectionConfig = field(
        default_factory=lambda: DetectionConfig(intervals=dict(DEFAULT_INTERVALS)))
    fairness_modes: tuple[str, ...] = ("group", "individual")
    scorecard: ScorecardConfig = field(default_factory=ScorecardConfig)
    revenue: RevenueConfig = field(default_factory=RevenueConfig)
    sweep_grid: SweepGrid = field(default_factory=SweepGrid)
    output_dir: str = "out"

    def with_overrides(self, dataset_path=None, output_dir=None, modes=None):
        cfg = self
        if dataset_path is not None:
            cfg = replace(cfg, dataset=replace(cfg.dataset, path=dataset_path))
        if output_dir is not None:
            cfg = replace(cfg, output_dir=output_dir)
        if modes is not None:
            cfg = replace(cfg, fairness_modes=tuple(modes))
        return cfg


def _require_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def _dataset_from_dict(doc: dict) -> DatasetConfig:
    _require_keys(doc, {"path", "format", "outcome_column", "good_value", "bad_value"},
                  "dataset")
    return DatasetConfig(**{**DatasetConfig().__dict__, **doc})


def _detection_from_dict(doc: dict) -> DetectionConfig:
    _require_keys(doc, {"r", "aggregation", "depth", "min_support", "intervals", "c_ref"},
                  "detection")
    intervals = dict(DEFAULT_INTERVALS)
    if "intervals" in doc:
        for level, pair in doc["intervals"].items():
            if level not in (HIGH, LOW):
                raise ConfigError(f"unknown rigour level {level!r} in intervals")
            if len(pair) != 2:
                raise ConfigError(f"interval for {level!r} must be [lower, upper]")
            intervals[level] = (float(pair[0]), float(pair[1]))
    base = DetectionConfig(intervals=intervals)
    return DetectionConfig(
        r=doc.get("r", base.r),
        aggregation=doc.get("aggregation", base.aggregation),
        depth=doc.get("depth", base.depth),
        min_support=doc.get("min_support", base.min_support),
        intervals=intervals,
        c_ref=doc.get("c_ref", DEFAULT_CLASS_REFERENCE),
    )


def _scorecard_from_dict(doc: dict) -> ScorecardConfig:
    _require_keys(doc, {"columns", "max_prebins", "min_bin_fraction", "learning_rate",
                        "iterations", "pdo", "base_score", "base_odds",
                        "score_threshold"}, "scorecard")
    base = ScorecardConfig()
    binning = BinningConfig(
        max_prebins=doc.get("max_prebins", base.binning.max_prebins),
        min_bin_fraction=doc.get("min_bin_fraction", base.binning.min_bin_fraction))
    scaling = ScoreScaling(
        pdo=doc.get("pdo", base.scaling.pdo),
        base_score=doc.get("base_score", base.scaling.base_score),
        base_odds=doc.get("base_odds", base.scaling.base_odds))
    columns = doc.get("columns")
    return ScorecardConfig(
        columns=tuple(columns) if columns is not None else None,
        binning=binning,
        learning_rate=doc.get("learning_rate", base.learning_rate),
        iterations=doc.get("iterations", base.iterations),
        scaling=scaling,
        score_threshold=doc.get("score_threshold", base.score_threshold))


def _revenue_from_dict(doc: dict) -> tuple[RevenueConfig, SweepGrid]:
    _require_keys(doc, {"provision_factor", "interest_rate", "amount_column",
                        "interest_rate_column", "thresholds"}, "revenue")
    base = RevenueConfig()
    rev = RevenueConfig(
        provision_factor=doc.get("provision_factor", base.provision_factor),
        interest_rate=doc.get("interest_rate", base.interest_rate),
        amount_column=doc.get("amount_column", base.amount_column),
        interest_rate_column=doc.get("interest_rate_column", base.interest_rate_column))
    grid_doc = doc.get("thresholds", {})
    _require_keys(grid_doc, {"start", "stop", "step"}, "revenue.thresholds")
    grid = SweepGrid(**{**SweepGrid().__dict__, **grid_doc})
    return rev, grid


def config_from_dict(doc: dict) -> AuditConfig:
    _require_keys(doc, {"version", "dataset", "sensitive_features",
                        "conditioning_columns", "detection", "fairness_modes",
                        "scorecard", "revenue", "output_dir"}, "config")
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}")
    try:
        base = AuditConfig()
        revenue, grid = _revenue_from_dict(doc.get("revenue", {}))
        return AuditConfig(
            dataset=_dataset_from_dict(doc.get("dataset", {})),
            sensitive_features=tuple(doc.get("sensitive_features", base.sensitive_features)),
            conditioning_columns=tuple(doc.get("conditioning_columns",
                                               base.conditioning_columns)),
            detection=_detection_from_dict(doc.get("detection", {})),
            fairness_modes=tuple(doc.get("fairness_modes", base.fairness_modes)),
            scorecard=_scorecard_from_dict(doc.get("scorecard", {})),
            revenue=revenue,
            sweep_grid=grid,
            output_dir=doc.get("output_dir", base.output_dir),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | None) -> AuditConfig:
    """Load a config file; None gives the built-in defaults."""
    if path is None:
        return AuditConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return config_from_dict(doc)
