"""Frame-level fusion blocks.

Covers the cross-modal transformer between the spatial and frequency feature
maps, the sigmoid-gated merge of its two outputs, the facial-landmark graph
attention network, and the masked multimodal merge that turns everything into
one embedding per frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn

SIGMA_FLOOR = 1e-6


class MultiHeadAttention(nn.Module):
    """Scaled dot-product attention with separate q/k/v/out projections."""

    def __init__(self, dim: int, num_heads: int):
        super().__init__()
        if dim % num_heads != 0:
            raise ValueError(f"num_heads={num_heads} must divide dim={dim}")
        self.num_heads = num_heads
        self.head_dim = dim // num_heads
        self.q_proj = nn.Linear(dim, dim)
        self.k_proj = nn.Linear(dim, dim)
        self.v_proj = nn.Linear(dim, dim)
        self.out_proj = nn.Linear(dim, dim)

    def forward(self, query, key, value, return_weights: bool = False):
        b, lq, c = query.shape
        lk = key.shape[1]
        q = self.q_proj(query).view(b, lq, self.num_heads, self.head_dim).transpose(1, 2)
        k = self.k_proj(key).view(b, lk, self.num_heads, self.head_dim).transpose(1, 2)
        v = self.v_proj(value).view(b, lk, self.num_heads, self.head_dim).transpose(1, 2)
        logits = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)
        weights = torch.softmax(logits, dim=-1)  # (b, heads, lq, lk)
        out = (weights @ v).transpose(1, 2).reshape(b, lq, c)
        out = self.out_proj(out)
        if return_weights:
            return out, weights
        return out


class _PostNormBlock(nn.Module):
    """One transformer block: attention and FFN residuals, each then normed."""

    def __init__(self, dim: int, num_heads: int, ffn_factor: int):
        super().__init__()
        self.attn = MultiHeadAttention(dim, num_heads)
        self.norm1 = nn.LayerNorm(dim)
        self.ffn = nn.Sequential(
            nn.Linear(dim, ffn_factor * dim),
            nn.ReLU(),
            nn.Linear(ffn_factor * dim, dim),
        )
        self.norm2 = nn.LayerNorm(dim)

    def forward(self, q_tokens, kv_tokens):
        x = self.norm1(q_tokens + self.attn(q_tokens, kv_tokens, kv_tokens))
        return self.norm2(x + self.ffn(x))


class CrossModalTransformer(nn.Module):
    """Bidirectional cross attention between two same-shape feature maps.

    Each map is flattened to h*w tokens of dim C.  One block attends from the
    spatial tokens into the frequency tokens and one the other way round; the
    results are reshaped back to maps.
    """

    def __init__(self, channels: int, num_heads: int = 4, ffn_factor: int = 4):
        super().__init__()
        self.block_s = _PostNormBlock(channels, num_heads, ffn_factor)
        self.block_f = _PostNormBlock(channels, num_heads, ffn_factor)

    def forward(self, x_s: torch.Tensor, x_f: torch.Tensor):
        if x_s.shape != x_f.shape:
            raise ValueError(f"branch shapes differ: {tuple(x_s.shape)} vs {tuple(x_f.shape)}")
        single = x_s.ndim == 3
        if single:
            x_s, x_f = x_s.unsqueeze(0), x_f.unsqueeze(0)
        n, c, h, w = x_s.shape
        t_s = x_s.flatten(2).transpose(1, 2)  # (n, h*w, c)
        t_f = x_f.flatten(2).transpose(1, 2)
        z_s = self.block_s(t_s, t_f).transpose(1, 2).reshape(n, c, h, w)
        z_f = self.block_f(t_f, t_s).transpose(1, 2).reshape(n, c, h, w)
        if single:
            z_s, z_f = z_s.squeeze(0), z_f.squeeze(0)
        return z_s, z_f


@dataclass
class SFFState:
    """Cross-modal outputs, their gates, and the gated merge."""

    z_s: torch.Tensor
    z_f: torch.Tensor
    g_s: torch.Tensor
    g_f: torch.Tensor
    x_sff: torch.Tensor


class GatedFusion(nn.Module):
    """Two sigmoid gates from the concatenated branches, then a gated sum."""

    def __init__(self, channels: int):
        super().__init__()
        self.gate_s = nn.Conv2d(2 * channels, channels, 1)
        self.gate_f = nn.Conv2d(2 * channels, channels, 1)

    def forward(self, z_s: torch.Tensor, z_f: torch.Tensor) -> SFFState:
        if z_s.shape != z_f.shape:
            raise ValueError(f"branch shapes differ: {tuple(z_s.shape)} vs {tuple(z_f.shape)}")
        single = z_s.ndim == 3
        if single:
            z_s, z_f = z_s.unsqueeze(0), z_f.unsqueeze(0)
        both = torch.cat([z_s, z_f], dim=1)
        g_s = torch.sigmoid(self.gate_s(both))
        g_f = torch.sigmoid(self.gate_f(both))
        x_sff = g_s * z_s + g_f * z_f
        if single:
            z_s, z_f, g_s, g_f, x_sff = (t.squeeze(0) for t in (z_s, z_f, g_s, g_f, x_sff))
        return SFFState(z_s=z_s, z_f=z_f, g_s=g_s, g_f=g_f, x_sff=x_sff)


def landmark_edge_weights(landmarks) -> torch.Tensor:
    """Gaussian kernel on pairwise landmark distances.

    The bandwidth is the mean pairwise distance of the instance (over the
    off-diagonal pairs), floored at 1e-6 so coincident points cannot divide
    by zero.  Accepts (n, 2) or batched (b, n, 2) coordinates.
    """
    pts = torch.as_tensor(landmarks)
    if not pts.is_floating_point():
        pts = pts.double()
    if pts.ndim not in (2, 3) or pts.shape[-1] != 2 or pts.shape[-2] < 2:
        raise ValueError(f"expected (n, 2) or (b, n, 2) landmarks, got {tuple(pts.shape)}")
    if not torch.isfinite(pts).all():
        raise ValueError("landmarks must be finite")
    n = pts.shape[-2]
    dist = torch.cdist(pts, pts)
    # the diagonal is zero, so the off-diagonal mean is sum / (n*(n-1))
    sigma = (dist.sum(dim=(-2, -1)) / (n * (n - 1))).clamp_min(SIGMA_FLOOR)
    return torch.exp(-(dist**2) / (2.0 * sigma[..., None, None] ** 2))


@dataclass
class LandmarkGraph:
    """Embedded landmark coordinates plus their distance-kernel edges."""

    node_features: torch.Tensor  # (n, d_in)
    edge_weights: torch.Tensor  # (n, n) in (0, 1]


class GATLayer(nn.Module):
    """One graph attention layer biased toward strongly connected pairs.

    Attention logits are LeakyReLU(score_j + score_k) + log(w_jk); adding the
    log multiplies the softmax numerator by the edge weight, so nearby
    landmarks dominate the aggregation.
    """

    def __init__(self, in_dim: int, out_dim: int, negative_slope: float = 0.2):
        super().__init__()
        self.linear = nn.Linear(in_dim, out_dim)
        bound = 1.0 / math.sqrt(out_dim)
        self.att_self = nn.Parameter(torch.empty(out_dim).uniform_(-bound, bound))
        self.att_neighbor = nn.Parameter(torch.empty(out_dim).uniform_(-bound, bound))
        self.act = nn.LeakyReLU(negative_slope)

    def forward(self, h: torch.Tensor, edge_weights: torch.Tensor, return_attention=False):
        proj = self.linear(h)  # (..., n, d)
        score_self = proj @ self.att_self  # (..., n)
        score_neighbor = proj @ self.att_neighbor
        logits = self.act(score_self[..., :, None] + score_neighbor[..., None, :])
        logits = logits + torch.log(edge_weights)
        alpha = torch.softmax(logits, dim=-1)  # rows j attend over neighbors k
        out = torch.relu(alpha @ proj)
        if return_attention:
            return out, alpha
        return out


class LandmarkGAT(nn.Module):
    """Embeds 2-D landmarks, runs stacked graph attention, means the nodes."""

    def __init__(self, d_in: int = 32, d_out: int = 64, num_layers: int = 2, num_points: int = 68):
        super().__init__()
        if num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        self.num_points = num_points
        self.d_out = d_out
        self.embed = nn.Linear(2, d_in)
        dims = [d_in] + [d_out] * num_layers
        self.layers = nn.ModuleList(
            GATLayer(dims[i], dims[i + 1]) for i in range(num_layers)
        )

    def _check(self, pts: torch.Tensor) -> None:
        if pts.shape[-2:] != (self.num_points, 2):
            raise ValueError(
                f"expected {self.num_points} landmarks of dim 2, got {tuple(pts.shape)}"
            )
        if not torch.isfinite(pts).all():
            raise ValueError("landmarks must be finite")

    def build_graph(self, landmarks) -> LandmarkGraph:
        pts = torch.as_tensor(landmarks).to(self.embed.weight.dtype)
        if pts.ndim != 2:
            raise ValueError(f"build_graph takes one instance, got {tuple(pts.shape)}")
        self._check(pts)
        return LandmarkGraph(
            node_features=self.embed(pts), edge_weights=landmark_edge_weights(pts)
        )

    def forward(self, landmarks, return_attention: bool = False):
        pts = torch.as_tensor(landmarks).to(self.embed.weight.dtype)
        single = pts.ndim == 2
        if single:
            pts = pts.unsqueeze(0)
        self._check(pts)
        w = landmark_edge_weights(pts)
        h = self.embed(pts)
        attention = []
        for layer in self.layers:
            h, alpha = layer(h, w, return_attention=True)
            attention.append(alpha)
        if not torch.isfinite(h).all():
            raise ValueError("landmark attention produced non-finite node features")
        out = h.mean(dim=-2)
        if single:
            out = out.squeeze(0)
            attention = [a.squeeze(0) for a in attention]
        if return_attention:
            return out, attention
        return out


class MultimodalFusion(nn.Module):
    """Merge the fused map with the landmark vector into one embedding.

    The landmark vector is projected to extra channels, tiled over the grid,
    concatenated with the map, scaled by a learnable elementwise mask (init
    all ones), reduced by a 1x1 conv back to C channels, and global-max
    pooled to a C-vector.
    """

    def __init__(
        self,
        channels: int,
        grid: tuple[int, int],
        landmark_dim: int = 64,
        landmark_channels: int = 64,
    ):
        super().__init__()
        self.grid = tuple(grid)
        self.project = nn.Linear(landmark_dim, landmark_channels)
        self.mask = nn.Parameter(torch.ones(channels + landmark_channels, *self.grid))
        self.reduce = nn.Conv2d(channels + landmark_channels, channels, 1)

    def forward(self, x_sff: torch.Tensor, x_lmk: torch.Tensor) -> torch.Tensor:
        single = x_sff.ndim == 3
        if single:
            x_sff, x_lmk = x_sff.unsqueeze(0), x_lmk.unsqueeze(0)
        if x_sff.shape[-2:] != self.grid:
            raise ValueError(f"expected grid {self.grid}, got {tuple(x_sff.shape[-2:])}")
        h, w = self.grid
        tiled = self.project(x_lmk)[:, :, None, None].expand(-1, -1, h, w)
        stacked = torch.cat([x_sff, tiled], dim=1) * self.mask
        x_u = self.reduce(stacked)
        embedding = x_u.amax(dim=(-2, -1))
        return embedding.squeeze(0) if single else embedding
