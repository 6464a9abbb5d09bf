"""Finite-difference gradient checks for every learnable component.

Each builder returns (module, loss_fn) on toy shapes in float64. The loss
weights every output entry with fixed random coefficients so each parameter
influences the scalar, and the loss recomputes the forward pass on demand as
the finite-difference oracle requires.
"""

import pytest
import torch

from fakegraph.backbone import BackboneConfig, MultiScaleBackbone
from fakegraph.frequency import BandMixer, FrequencyDecomposer
from fakegraph.fusion import (
    CrossModalTransformer,
    GatedFusion,
    LandmarkGAT,
    MultimodalFusion,
)
from fakegraph.head import ClassificationHead, cross_entropy_loss
from fakegraph.temporal import TemporalGraphLayer, VideoReadout, edge_features
from oracles import assert_gradients_match

F64 = torch.float64


def _weights_like(x, seed):
    g = torch.Generator().manual_seed(seed)
    return torch.randn(x.shape, generator=g, dtype=x.dtype)


def build_frequency_masks():
    torch.manual_seed(0)
    m = FrequencyDecomposer(4, 4).double()
    x = torch.rand(2, 3, 4, 4, dtype=F64)
    w = _weights_like(m(x), 1)
    return m, lambda: (m(x) * w).sum()


def build_band_mixer():
    torch.manual_seed(1)
    m = BandMixer().double()
    x = torch.rand(2, 12, 3, 3, dtype=F64)
    w = _weights_like(m(x), 2)
    return m, lambda: (m(x) * w).sum()


def build_backbone_taps():
    torch.manual_seed(2)
    cfg = BackboneConfig(
        stage_channel_plan=[(2, 2), (4, 2)],
        shallow_tap=0,
        deep_tap=1,
        fused_channels=4,
        output_grid=(2, 2),
    )
    m = MultiScaleBackbone(cfg).double()
    x = torch.rand(1, 3, 8, 8, dtype=F64)
    w = _weights_like(m(x), 3)
    return m, lambda: (m(x) * w).sum()


def build_cross_modal_transformer():
    torch.manual_seed(3)
    m = CrossModalTransformer(4, num_heads=2, ffn_factor=1).double()
    x_s = torch.rand(1, 4, 2, 2, dtype=F64)
    x_f = torch.rand(1, 4, 2, 2, dtype=F64)
    w_s = _weights_like(x_s, 4)
    w_f = _weights_like(x_f, 5)

    def loss():
        z_s, z_f = m(x_s, x_f)
        return (z_s * w_s).sum() + (z_f * w_f).sum()

    return m, loss


def build_fusion_gates():
    torch.manual_seed(4)
    m = GatedFusion(3).double()
    z_s = torch.rand(1, 3, 2, 2, dtype=F64)
    z_f = torch.rand(1, 3, 2, 2, dtype=F64)
    w = _weights_like(z_s, 6)
    return m, lambda: (m(z_s, z_f).x_sff * w).sum()


def build_landmark_gat():
    torch.manual_seed(5)
    m = LandmarkGAT(d_in=3, d_out=4, num_layers=2, num_points=5).double()
    pts = torch.rand(2, 5, 2, dtype=F64) * 10.0
    w = _weights_like(m(pts), 7)
    return m, lambda: (m(pts) * w).sum()


def build_multimodal_fusion():
    torch.manual_seed(6)
    m = MultimodalFusion(2, (2, 2), landmark_dim=3, landmark_channels=2).double()
    x_sff = torch.rand(2, 2, 2, 2, dtype=F64)
    x_lmk = torch.rand(2, 3, dtype=F64)
    w = _weights_like(m(x_sff, x_lmk), 8)
    return m, lambda: (m(x_sff, x_lmk) * w).sum()


def build_temporal_layer():
    torch.manual_seed(7)
    m = TemporalGraphLayer(4, num_heads=2).double()
    x = torch.rand(3, 4, dtype=F64)
    edges = edge_features(x)
    w = _weights_like(x, 9)
    return m, lambda: (m(x, edges) * w).sum()


def build_video_readout():
    torch.manual_seed(8)
    m = VideoReadout(4).double()
    x = torch.rand(3, 4, dtype=F64)
    w = _weights_like(torch.empty(4), 10)
    return m, lambda: (m(x).x_gat * w).sum()


def build_classification_head():
    torch.manual_seed(9)
    m = ClassificationHead(3).double()
    x = torch.rand(4, 3, dtype=F64)
    labels = torch.tensor([0, 1, 1, 0])
    return m, lambda: cross_entropy_loss(m(x), labels)


COMPONENT_BUILDERS = {
    "frequency_masks": build_frequency_masks,
    "band_mixer": build_band_mixer,
    "backbone_taps": build_backbone_taps,
    "cross_modal_transformer": build_cross_modal_transformer,
    "fusion_gates": build_fusion_gates,
    "landmark_gat": build_landmark_gat,
    "multimodal_fusion": build_multimodal_fusion,
    "temporal_layer": build_temporal_layer,
    "video_readout": build_video_readout,
    "classification_head": build_classification_head,
}


@pytest.mark.parametrize("name", sorted(COMPONENT_BUILDERS))
def test_component_gradients_match_central_differences(name):
    module, loss_fn = COMPONENT_BUILDERS[name]()
    assert all(p.dtype == F64 for p in module.parameters())
    assert_gradients_match(module, loss_fn, rtol=1e-4, atol=1e-6, eps=1e-5)


def test_every_component_has_trainable_parameters():
    for name, build in COMPONENT_BUILDERS.items():
        module, _ = build()
        assert sum(p.numel() for p in module.parameters()) > 0, name
