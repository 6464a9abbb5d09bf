"""Sample containers and generator settings for the synthetic corpus."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

ARTIFACT_KINDS = ("spatial", "frequency", "temporal", "landmark")

_SAMPLE_ID_RE = re.compile(r"[A-Za-z0-9._-]+")


@dataclass
class VideoSample:
    """One labeled video: frames (T, 3, H, W) in [0, 1] and landmarks (T, 68, 2).

    Landmark columns are (x, y) pixel coordinates with origin at the top-left
    corner, so x in [0, W) and y in [0, H).
    """

    frames: np.ndarray
    landmarks: np.ndarray
    label: int
    sample_id: str

    def validate(self) -> "VideoSample":
        sid = self.sample_id
        if not isinstance(sid, str) or not _SAMPLE_ID_RE.fullmatch(sid):
            raise ValueError(f"bad sample_id {sid!r}")
        f, l = self.frames, self.landmarks
        if f.ndim != 4 or f.shape[1] != 3 or f.shape[0] < 1:
            raise ValueError(f"[{sid}] frames must be (T>=1, 3, H, W), got {f.shape}")
        t, _, h, w = f.shape
        if l.shape != (t, 68, 2):
            raise ValueError(f"[{sid}] landmarks must be ({t}, 68, 2), got {l.shape}")
        if not np.isfinite(f).all():
            raise ValueError(f"[{sid}] frames contain non-finite values")
        if f.min() < 0.0 or f.max() > 1.0:
            raise ValueError(f"[{sid}] frames must lie in [0, 1]")
        if not np.isfinite(l).all():
            raise ValueError(f"[{sid}] landmarks contain non-finite values")
        x, y = l[..., 0], l[..., 1]
        if x.min() < 0 or x.max() >= w or y.min() < 0 or y.max() >= h:
            raise ValueError(f"[{sid}] landmarks fall outside [0, {w}) x [0, {h})")
        if self.label not in (0, 1):
            raise ValueError(f"[{sid}] label must be 0 or 1, got {self.label}")
        return self

    @property
    def frame_count(self) -> int:
        return int(self.frames.shape[0])


@dataclass
class SyntheticArtifactConfig:
    """Knobs for one generated video.

    ``artifact_kinds`` only takes effect for fake samples; a fake needs at
    least one kind.  The same config + seed always reproduces the same bytes.
    """

    artifact_kinds: tuple[str, ...] = ()
    severity: float = 1.0
    rng_seed: int = 0
    frame_size: tuple[int, int] = (64, 64)
    frames_per_video: int = 8

    def __post_init__(self):
        kinds = tuple(dict.fromkeys(self.artifact_kinds))  # dedupe, keep order
        unknown = set(kinds) - set(ARTIFACT_KINDS)
        if unknown:
            raise ValueError(f"unknown artifact kinds {sorted(unknown)}")
        self.artifact_kinds = kinds
        if not 0.0 < self.severity <= 1.0:
            raise ValueError(f"severity must be in (0, 1], got {self.severity}")
        h, w = self.frame_size
        if h < 32 or w < 32:
            raise ValueError(f"frame_size must be at least 32x32, got {h}x{w}")
        self.frame_size = (int(h), int(w))
        if self.frames_per_video < 1:
            raise ValueError("frames_per_video must be >= 1")
        self.rng_seed = int(self.rng_seed)
