"""End-to-end detector assembled from the frame and video stages.

Per frame: spatial backbone and frequency-band backbone exchange context in
a two-branch transformer, a gated sum merges them, and the landmark graph
vector is fused in to give one embedding per frame. Per video: the temporal
graph attends over frame embeddings and a learned readout pools them before
the classification head.

Ablation switches: ``use_frequency=False`` drops the whole frequency branch
(the spatial map goes straight to fusion), ``use_temporal=False`` replaces
the video graph with a mean over frame embeddings.
"""

from __future__ import annotations

import torch
from torch import nn

from .backbone import MultiScaleBackbone
from .config import ModelConfig
from .frequency import FrequencyPathway
from .fusion import CrossModalTransformer, GatedFusion, LandmarkGAT, MultimodalFusion
from .head import ClassificationHead, Prediction
from .temporal import TemporalEncoder, edge_features

# Insertion order of trace entries when every stage is enabled.
TRACE_KEYS = (
    "x_spatial",
    "x_frequency_image",
    "x_frequency",
    "z_s",
    "z_f",
    "g_s",
    "g_f",
    "x_sff",
    "x_lmk",
    "frame_embeddings",
    "edge_matrix",
    "x_gat",
    "logits",
    "probs",
)


def _put(trace, key: str, value: torch.Tensor) -> None:
    if trace is not None:
        trace[key] = value.detach()


def first_nonfinite(trace: dict) -> str | None:
    """Name of the earliest traced tensor with a NaN or inf, if any."""
    for key, value in trace.items():
        if not torch.isfinite(value).all():
            return key
    return None


class DeepfakeDetector(nn.Module):
    def __init__(self, config: ModelConfig | None = None, frame_size=(64, 64)):
        super().__init__()
        cfg = config if config is not None else ModelConfig()
        self.config = cfg
        self.frame_size = (int(frame_size[0]), int(frame_size[1]))
        backbone_cfg = cfg.backbone_config()
        h, w = self.frame_size
        got = backbone_cfg.grid_after(h, w, backbone_cfg.deep_tap)
        if got != backbone_cfg.output_grid:
            raise ValueError(
                f"{h}x{w} frames reach grid {got} at the deep tap, backbone "
                f"expects {backbone_cfg.output_grid}"
            )
        channels = backbone_cfg.fused_channels
        self.embedding_dim = channels
        self.spatial_backbone = MultiScaleBackbone(backbone_cfg)
        if cfg.use_frequency:
            self.frequency_pathway = FrequencyPathway(h, w, mask_init=cfg.mask_init)
            self.frequency_backbone = MultiScaleBackbone(backbone_cfg)
            self.cross_modal = CrossModalTransformer(channels, cfg.cmt_heads, cfg.cmt_ffn_factor)
            self.gated_fusion = GatedFusion(channels)
        else:
            self.frequency_pathway = None
            self.frequency_backbone = None
            self.cross_modal = None
            self.gated_fusion = None
        self.landmark_gat = LandmarkGAT(
            cfg.landmark_d_in, cfg.landmark_d_out, cfg.landmark_layers
        )
        self.fusion = MultimodalFusion(
            channels,
            backbone_cfg.output_grid,
            landmark_dim=cfg.landmark_d_out,
            landmark_channels=cfg.landmark_channels,
        )
        if cfg.use_temporal:
            self.temporal = TemporalEncoder(
                channels, cfg.temporal_heads, cfg.temporal_layers, cfg.temporal_ffn_hidden
            )
        else:
            self.temporal = None
        self.head = ClassificationHead(channels)

    def frame_embeddings(self, frames: torch.Tensor, landmarks: torch.Tensor, trace=None):
        """Embed a flat batch of frames: (N, 3, H, W) + (N, P, 2) -> (N, D)."""
        x_s = self.spatial_backbone(frames)
        _put(trace, "x_spatial", x_s)
        if self.config.use_frequency:
            freq_image = self.frequency_pathway(frames)
            _put(trace, "x_frequency_image", freq_image)
            x_f = self.frequency_backbone(freq_image)
            _put(trace, "x_frequency", x_f)
            z_s, z_f = self.cross_modal(x_s, x_f)
            state = self.gated_fusion(z_s, z_f)
            _put(trace, "z_s", state.z_s)
            _put(trace, "z_f", state.z_f)
            _put(trace, "g_s", state.g_s)
            _put(trace, "g_f", state.g_f)
            x_sff = state.x_sff
        else:
            x_sff = x_s
        _put(trace, "x_sff", x_sff)
        x_lmk = self.landmark_gat(landmarks)
        _put(trace, "x_lmk", x_lmk)
        embeddings = self.fusion(x_sff, x_lmk)
        _put(trace, "frame_embeddings", embeddings)
        return embeddings

    def forward(self, frames: torch.Tensor, landmarks: torch.Tensor, trace=None) -> Prediction:
        single = frames.ndim == 4
        if single:
            frames, landmarks = frames.unsqueeze(0), landmarks.unsqueeze(0)
        if frames.ndim != 5 or frames.shape[2] != 3:
            raise ValueError(f"expected frames (B, T, 3, H, W), got {tuple(frames.shape)}")
        if frames.shape[-2:] != self.frame_size:
            raise ValueError(
                f"model built for {self.frame_size} frames, got {tuple(frames.shape[-2:])}"
            )
        if landmarks.ndim != 4 or landmarks.shape[:2] != frames.shape[:2]:
            raise ValueError(
                f"landmarks {tuple(landmarks.shape)} do not match frames {tuple(frames.shape)}"
            )
        b, t = frames.shape[:2]
        flat = self.frame_embeddings(
            frames.reshape(b * t, *frames.shape[2:]),
            landmarks.reshape(b * t, *landmarks.shape[2:]),
            trace,
        )
        per_video = flat.view(b, t, self.embedding_dim)
        if self.config.use_temporal:
            if trace is not None:
                _put(trace, "edge_matrix", edge_features(per_video))
            rep = self.temporal(per_video)
            video_embedding = rep.x_gat
        else:
            video_embedding = per_video.mean(dim=1)
        _put(trace, "x_gat", video_embedding)
        if single:
            video_embedding = video_embedding.squeeze(0)
        pred = self.head(video_embedding)
        _put(trace, "logits", pred.logits)
        _put(trace, "probs", pred.probs)
        return pred
