"""Video-level temporal graph over per-frame embeddings.

Frames are nodes on a complete graph.  Edges carry the cosine similarity of
unit-normalized frame embeddings; attention logits mix the scaled query-key
product with the edge value acting on the value-projected neighbor.  A stack
of such layers is reduced to one vector per video by a learnable-query
softmax readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn

NORM_FLOOR = 1e-12


def edge_features(frame_embeddings) -> torch.Tensor:
    """Pairwise cosine similarities of unit-normalized embeddings.

    Accepts (T, D) or (B, T, D); zero vectors are normalized with a 1e-12
    floor, so their rows and columns come out as zeros.
    """
    x = torch.as_tensor(frame_embeddings)
    if not x.is_floating_point():
        x = x.double()
    if x.ndim not in (2, 3) or x.shape[-2] < 1:
        raise ValueError(f"expected (T, D) or (B, T, D) with T >= 1, got {tuple(x.shape)}")
    unit = x / x.norm(dim=-1, keepdim=True).clamp_min(NORM_FLOOR)
    return unit @ unit.transpose(-2, -1)


class TemporalGraphLayer(nn.Module):
    """One multi-head edge-biased attention layer with post-norm and FFN.

    Per head: logits_ij = (Wq x_i / sqrt(D)) . (Wk x_j / sqrt(D) + E_ij Wv x_j),
    h_i = sum_j alpha_ij (Wv x_j / sqrt(D)).  Heads are concatenated and mapped
    back to D by Wo.  Head width is ceil(D / heads) so any head count works.
    """

    def __init__(self, dim: int, num_heads: int, ffn_hidden: int | None = None):
        super().__init__()
        if dim < 1 or num_heads < 1:
            raise ValueError("dim and num_heads must be positive")
        self.dim = dim
        self.num_heads = num_heads
        self.head_dim = -(-dim // num_heads)
        width = self.num_heads * self.head_dim
        self.w_query = nn.Linear(dim, width, bias=False)
        self.w_key = nn.Linear(dim, width, bias=False)
        self.w_value = nn.Linear(dim, width, bias=False)
        self.w_out = nn.Linear(width, dim, bias=False)
        hidden = dim if ffn_hidden is None else ffn_hidden
        self.norm1 = nn.LayerNorm(dim)
        self.ffn = nn.Sequential(
            nn.Linear(dim, hidden), nn.ReLU(), nn.Linear(hidden, dim)
        )
        self.norm2 = nn.LayerNorm(dim)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        b, t, _ = x.shape
        return x.view(b, t, self.num_heads, self.head_dim).transpose(1, 2)

    def forward(self, x: torch.Tensor, edges: torch.Tensor, return_attention=False):
        single = x.ndim == 2
        if single:
            x, edges = x.unsqueeze(0), edges.unsqueeze(0)
        b, t, d = x.shape
        if t < 1:
            raise ValueError("need at least one frame")
        if d != self.dim or edges.shape != (b, t, t):
            raise ValueError(
                f"shapes inconsistent: x {tuple(x.shape)}, edges {tuple(edges.shape)}"
            )
        scale = 1.0 / math.sqrt(self.dim)
        q = self._split(self.w_query(x)) * scale  # (b, heads, t, d_head)
        k = self._split(self.w_key(x)) * scale
        v = self._split(self.w_value(x))
        logits = q @ k.transpose(-2, -1) + edges[:, None, :, :] * (q @ v.transpose(-2, -1))
        if not torch.isfinite(logits).all():
            raise ValueError("non-finite attention logits")
        alpha = torch.softmax(logits, dim=-1)  # (b, heads, t, t)
        heads = alpha @ (v * scale)
        merged = heads.transpose(1, 2).reshape(b, t, self.num_heads * self.head_dim)
        attended = self.norm1(x + self.w_out(merged))
        out = self.norm2(attended + self.ffn(attended))
        if single:
            out, alpha = out.squeeze(0), alpha.squeeze(0)
        if return_attention:
            return out, alpha
        return out


@dataclass
class VideoRepresentation:
    """Final node states, their readout weights, and the pooled vector."""

    x_gat: torch.Tensor
    node_states: torch.Tensor
    readout_weights: torch.Tensor


class VideoReadout(nn.Module):
    """Softmax over learnable-query scores, then a weighted sum of nodes."""

    def __init__(self, dim: int):
        super().__init__()
        self.query = nn.Parameter(torch.randn(dim) / math.sqrt(dim))

    def forward(self, states: torch.Tensor) -> VideoRepresentation:
        single = states.ndim == 2
        h = states.unsqueeze(0) if single else states
        weights = torch.softmax(h @ self.query, dim=-1)  # (b, t)
        pooled = (weights.unsqueeze(-1) * h).sum(dim=-2)
        if single:
            pooled, weights, h = pooled.squeeze(0), weights.squeeze(0), h.squeeze(0)
        return VideoRepresentation(x_gat=pooled, node_states=h, readout_weights=weights)


class TemporalEncoder(nn.Module):
    """Edge features once, a stack of graph layers, then the readout."""

    def __init__(
        self,
        dim: int,
        num_heads: int = 5,
        num_layers: int = 5,
        ffn_hidden: int | None = None,
    ):
        super().__init__()
        if num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        self.layers = nn.ModuleList(
            TemporalGraphLayer(dim, num_heads, ffn_hidden) for _ in range(num_layers)
        )
        self.readout = VideoReadout(dim)

    def forward(self, frame_embeddings: torch.Tensor, return_attention: bool = False):
        x = frame_embeddings
        edges = edge_features(x)
        attention = []
        for layer in self.layers:
            x, alpha = layer(x, edges, return_attention=True)
            attention.append(alpha)
        rep = self.readout(x)
        if return_attention:
            return rep, attention
        return rep
