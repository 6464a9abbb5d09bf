"""Multimodal graph learning pipeline for deepfake video detection."""

from .backbone import (
    BackboneConfig,
    MultiScaleBackbone,
    desk_backbone_config,
    paper_backbone_config,
)
from .config import (
    ConfigError,
    DataConfig,
    ExperimentConfig,
    ModelConfig,
    TrainConfig,
    config_hash,
    load_config,
    paper_experiment_config,
    save_config,
)
from .data import (
    ARTIFACT_KINDS,
    DatasetError,
    SyntheticArtifactConfig,
    VideoSample,
    generate_dataset,
    generate_synthetic_video,
    landmark_template,
    load_dataset,
    save_dataset,
)
from .frequency import (
    BAND_NAMES,
    BandMixer,
    FrequencyDecomposer,
    FrequencyPathway,
    band_energies,
    build_band_masks,
    dct2,
    idct2,
)
from .fusion import (
    CrossModalTransformer,
    GatedFusion,
    LandmarkGAT,
    MultiHeadAttention,
    MultimodalFusion,
    SFFState,
    landmark_edge_weights,
)
from .head import ClassificationHead, Prediction, cross_entropy_loss
from .metrics import EvalReport, UndefinedMetricError, acc, auc, eer, video_level_aggregate
from .model import DeepfakeDetector
from .temporal import TemporalEncoder, TemporalGraphLayer, VideoReadout, edge_features
from .training import (
    TrainingError,
    TrainResult,
    evaluate,
    infer,
    load_checkpoint,
    save_checkpoint,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ARTIFACT_KINDS",
    "BAND_NAMES",
    "BackboneConfig",
    "BandMixer",
    "ClassificationHead",
    "ConfigError",
    "CrossModalTransformer",
    "DataConfig",
    "DatasetError",
    "DeepfakeDetector",
    "EvalReport",
    "ExperimentConfig",
    "FrequencyDecomposer",
    "FrequencyPathway",
    "GatedFusion",
    "LandmarkGAT",
    "ModelConfig",
    "MultiHeadAttention",
    "MultiScaleBackbone",
    "MultimodalFusion",
    "Prediction",
    "SFFState",
    "SyntheticArtifactConfig",
    "TemporalEncoder",
    "TemporalGraphLayer",
    "TrainConfig",
    "TrainResult",
    "TrainingError",
    "UndefinedMetricError",
    "VideoReadout",
    "VideoSample",
    "acc",
    "auc",
    "band_energies",
    "build_band_masks",
    "config_hash",
    "cross_entropy_loss",
    "dct2",
    "desk_backbone_config",
    "eer",
    "evaluate",
    "generate_dataset",
    "generate_synthetic_video",
    "idct2",
    "infer",
    "landmark_edge_weights",
    "landmark_template",
    "load_checkpoint",
    "load_config",
    "load_dataset",
    "paper_backbone_config",
    "paper_experiment_config",
    "save_checkpoint",
    "save_config",
    "save_dataset",
    "train",
    "video_level_aggregate",
]
