"""Dataset containers, synthetic generation, and on-disk IO."""

from .io import DatasetError, load_dataset, save_dataset
from .samples import ARTIFACT_KINDS, SyntheticArtifactConfig, VideoSample
from .synthetic import generate_dataset, generate_synthetic_video, landmark_template

__all__ = [
    "ARTIFACT_KINDS",
    "DatasetError",
    "SyntheticArtifactConfig",
    "VideoSample",
    "generate_dataset",
    "generate_synthetic_video",
    "landmark_template",
    "load_dataset",
    "save_dataset",
]
