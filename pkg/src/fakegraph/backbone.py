"""Multi-scale convolutional feature extractor used by both input branches.

A stack of depthwise-separable conv stages with two taps: a shallow tap and a
deep tap.  The shallow map is resampled bilinearly to the deep grid,
channel-concatenated with it, and projected by a 1x1 conv to the fused
channel count.  The spatial and frequency branches are two independent
instances of the same structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
import torch.nn as nn
import torch.nn.functional as F


@dataclass
class BackboneConfig:
    """Stage plan and tap points for one branch.

    ``stage_channel_plan`` lists (out_channels, stride) per stage; taps are
    stage indexes into that list.  ``output_grid`` is the deep-tap grid the
    given input size must land on.
    """

    stage_channel_plan: list[tuple[int, int]] = field(
        default_factory=lambda: [(16, 2), (32, 2), (64, 2)]
    )
    shallow_tap: int = 1
    deep_tap: int = 2
    fused_channels: int = 64
    output_grid: tuple[int, int] = (8, 8)
    in_channels: int = 3

    def __post_init__(self):
        if not self.stage_channel_plan:
            raise ValueError("stage_channel_plan must not be empty")
        for ch, stride in self.stage_channel_plan:
            if ch < 1 or stride < 1:
                raise ValueError(f"bad stage entry ({ch}, {stride})")
        n = len(self.stage_channel_plan)
        if not (0 <= self.shallow_tap < self.deep_tap < n):
            raise ValueError(
                f"need 0 <= shallow_tap < deep_tap < {n}, "
                f"got {self.shallow_tap}, {self.deep_tap}"
            )
        if self.fused_channels < 1:
            raise ValueError("fused_channels must be positive")

    @property
    def output_shape(self) -> tuple[int, int, int]:
        return (self.fused_channels, *self.output_grid)

    def grid_after(self, height: int, width: int, stage: int) -> tuple[int, int]:
        """Spatial grid emitted by ``stage`` for the given input size."""
        h, w = height, width
        for _, stride in self.stage_channel_plan[: stage + 1]:
            h = (h - 1) // stride + 1  # 3x3 conv, padding 1
            w = (w - 1) // stride + 1
        return h, w


def paper_backbone_config() -> BackboneConfig:
    """Full-scale preset: 3x320x320 in, 512x40x40 out."""
    return BackboneConfig(
        stage_channel_plan=[(32, 2), (64, 2), (128, 2), (256, 1), (512, 1)],
        shallow_tap=2,
        deep_tap=4,
        fused_channels=512,
        output_grid=(40, 40),
    )


def desk_backbone_config() -> BackboneConfig:
    """Small preset for CPU runs: 3x64x64 in, 64x8x8 out."""
    return BackboneConfig(
        stage_channel_plan=[(16, 2), (32, 2), (48, 2)],
        shallow_tap=1,
        deep_tap=2,
        fused_channels=64,
        output_grid=(8, 8),
    )


class SeparableStage(nn.Module):
    """Depthwise 3x3 (strided) + pointwise 1x1, then GroupNorm and ReLU."""

    def __init__(self, in_channels: int, out_channels: int, stride: int):
        super().__init__()
        self.depthwise = nn.Conv2d(
            in_channels, in_channels, 3, stride=stride, padding=1, groups=in_channels
        )
        self.pointwise = nn.Conv2d(in_channels, out_channels, 1)
        # one group keeps normalization per-sample, so batches stay independent
        self.norm = nn.GroupNorm(1, out_channels)
        self.act = nn.ReLU()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.act(self.norm(self.pointwise(self.depthwise(x))))


class MultiScaleBackbone(nn.Module):
    """One branch: staged extractor with shallow/deep tap fusion."""

    def __init__(self, config: BackboneConfig | None = None):
        super().__init__()
        cfg = config if config is not None else BackboneConfig()
        self.config = cfg
        stages = []
        ch = cfg.in_channels
        for out_ch, stride in cfg.stage_channel_plan:
            stages.append(SeparableStage(ch, out_ch, stride))
            ch = out_ch
        self.stages = nn.ModuleList(stages)
        shallow_ch = cfg.stage_channel_plan[cfg.shallow_tap][0]
        deep_ch = cfg.stage_channel_plan[cfg.deep_tap][0]
        self.fuse = nn.Conv2d(shallow_ch + deep_ch, cfg.fused_channels, 1)
        self.apply(_init_he)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        single = x.ndim == 3
        if single:
            x = x.unsqueeze(0)
        if x.ndim != 4 or x.shape[1] != self.config.in_channels:
            raise ValueError(
                f"expected (N, {self.config.in_channels}, H, W) input, got {tuple(x.shape)}"
            )
        expected = self.config.grid_after(x.shape[2], x.shape[3], self.config.deep_tap)
        if expected != tuple(self.config.output_grid):
            raise ValueError(
                f"input {tuple(x.shape[2:])} lands on grid {expected}, "
                f"config declares {tuple(self.config.output_grid)}"
            )
        shallow = deep = None
        for i, stage in enumerate(self.stages):
            x = stage(x)
            if i == self.config.shallow_tap:
                shallow = x
            if i == self.config.deep_tap:
                deep = x
                break
        if shallow.shape[2:] != deep.shape[2:]:
            shallow = F.interpolate(
                shallow, size=deep.shape[2:], mode="bilinear", align_corners=False
            )
        out = self.fuse(torch.cat([shallow, deep], dim=1))
        return out.squeeze(0) if single else out


def _init_he(module: nn.Module) -> None:
    if isinstance(module, nn.Conv2d):
        nn.init.kaiming_normal_(module.weight, nonlinearity="relu")
        if module.bias is not None:
            nn.init.zeros_(module.bias)
