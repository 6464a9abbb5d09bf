"""Experiment configuration: typed sections, YAML round-trip, and hashing.

Every knob has a dataclass default, so a loaded config is always fully
populated; unknown keys are rejected instead of silently ignored.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .backbone import BackboneConfig, desk_backbone_config, paper_backbone_config
from .data.samples import ARTIFACT_KINDS


class ConfigError(ValueError):
    """Raised for malformed or unknown configuration content."""


@dataclass
class DataConfig:
    """Where the dataset lives and how the generator builds it."""

    root: str = "data"
    n_train: int = 200
    n_val: int = 50
    n_eval: int = 50
    artifact_kinds: object = "mixed"  # "mixed" or explicit list of kinds
    severity: float = 1.0
    frame_size: tuple[int, int] = (64, 64)
    frames_per_video: int = 8
    fake_fraction: float = 0.5

    def __post_init__(self):
        if isinstance(self.artifact_kinds, str):
            if self.artifact_kinds != "mixed":
                raise ConfigError(f"artifact_kinds must be 'mixed' or a list, got {self.artifact_kinds!r}")
        else:
            kinds = tuple(self.artifact_kinds)
            unknown = set(kinds) - set(ARTIFACT_KINDS)
            if unknown:
                raise ConfigError(f"unknown artifact kinds {sorted(unknown)}")
            self.artifact_kinds = kinds
        self.frame_size = (int(self.frame_size[0]), int(self.frame_size[1]))
        for name in ("n_train", "n_val", "n_eval", "frames_per_video"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 < self.severity <= 1.0:
            raise ConfigError("severity must be in (0, 1]")
        if not 0.0 <= self.fake_fraction <= 1.0:
            raise ConfigError("fake_fraction must be in [0, 1]")

    def split_dir(self, split: str) -> Path:
        if split not in ("train", "val", "eval"):
            raise ConfigError(f"unknown split {split!r}")
        return Path(self.root) / split


@dataclass
class ModelConfig:
    """Dimension knobs for every module plus the two ablation switches."""

    backbone: object = "desk"  # "desk", "paper", or a mapping of plan fields
    cmt_heads: int = 4
    cmt_ffn_factor: int = 4
    landmark_d_in: int = 32
    landmark_d_out: int = 64
    landmark_layers: int = 2
    landmark_channels: int = 64
    temporal_heads: int = 5
    temporal_layers: int = 5
    temporal_ffn_hidden: int | None = None
    mask_init: str = "zeros"  # "zeros" or "random"
    use_frequency: bool = True
    use_temporal: bool = True

    def __post_init__(self):
        if self.mask_init not in ("zeros", "random"):
            raise ConfigError(f"mask_init must be 'zeros' or 'random', got {self.mask_init!r}")
        for name in (
            "cmt_heads",
            "cmt_ffn_factor",
            "landmark_d_in",
            "landmark_d_out",
            "landmark_layers",
            "landmark_channels",
            "temporal_heads",
            "temporal_layers",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    def backbone_config(self) -> BackboneConfig:
        if self.backbone == "desk":
            return desk_backbone_config()
        if self.backbone == "paper":
            return paper_backbone_config()
        if isinstance(self.backbone, dict):
            try:
                plan = [tuple(entry) for entry in self.backbone["stage_channel_plan"]]
                return BackboneConfig(
                    stage_channel_plan=plan,
                    shallow_tap=self.backbone["shallow_tap"],
                    deep_tap=self.backbone["deep_tap"],
                    fused_channels=self.backbone["fused_channels"],
                    output_grid=tuple(self.backbone["output_grid"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad backbone mapping: {exc}") from exc
        raise ConfigError(f"backbone must be 'desk', 'paper', or a mapping, got {self.backbone!r}")


@dataclass
class TrainConfig:
    """Optimizer and loop settings."""

    learning_rate: float = 8e-5
    weight_decay: float = 0.01
    batch_size: int = 8
    epochs: int = 50
    early_stop_patience: int = 10
    checkpoint: str = "checkpoint.pt"
    augment: bool = False

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be >= 0")
        if self.batch_size < 1 or self.epochs < 1 or self.early_stop_patience < 1:
            raise ConfigError("batch_size, epochs, early_stop_patience must be >= 1")


@dataclass
class ExperimentConfig:
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0


def paper_experiment_config() -> ExperimentConfig:
    """Full-scale defaults: 320x320 frames, 32 per video, 512-dim graph."""
    cfg = ExperimentConfig()
    cfg.data.frame_size = (320, 320)
    cfg.data.frames_per_video = 32
    cfg.model.backbone = "paper"
    cfg.model.temporal_ffn_hidden = 512
    return cfg


def _build_section(cls, payload, where: str):
    if payload is None:
        payload = {}
    if not isinstance(payload, dict):
        raise ConfigError(f"section {where!r} must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown keys in {where!r}: {sorted(unknown)}")
    try:
        return cls(**payload)
    except TypeError as exc:
        raise ConfigError(f"bad values in {where!r}: {exc}") from exc


def config_from_dict(payload: dict) -> ExperimentConfig:
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(payload) - {"data", "model", "train", "seed"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    seed = payload.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    return ExperimentConfig(
        data=_build_section(DataConfig, payload.get("data"), "data"),
        model=_build_section(ModelConfig, payload.get("model"), "model"),
        train=_build_section(TrainConfig, payload.get("train"), "train"),
        seed=seed,
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    payload = dataclasses.asdict(cfg)
    for section in payload.values():
        if isinstance(section, dict):
            for key, value in section.items():
                if isinstance(value, tuple):
                    section[key] = list(value)
    return payload


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        payload = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(payload if payload is not None else {})


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=True))


def config_hash(cfg: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()
