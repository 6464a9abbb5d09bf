"""Classification head: an MLP over the video embedding plus the training loss.

The head maps a D-dimensional video embedding to two logits (real, fake) and
a softmax over them.  The loss is plain cross entropy on the fake/real label
with a 1e-12 floor inside the log.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

PROB_FLOOR = 1e-12


@dataclass
class Prediction:
    """Logits and softmax probabilities, column order (real, fake)."""

    logits: torch.Tensor
    probs: torch.Tensor

    def fake_probability(self) -> torch.Tensor:
        return self.probs[..., 1]


class ClassificationHead(nn.Module):
    """Two hidden dense layers (LayerNorm + ReLU each) then a 2-logit output."""

    def __init__(self, dim: int, hidden_dim: int | None = None):
        super().__init__()
        hidden = dim if hidden_dim is None else hidden_dim
        self.mlp = nn.Sequential(
            nn.Linear(dim, hidden),
            nn.LayerNorm(hidden),
            nn.ReLU(),
            nn.Linear(hidden, hidden),
            nn.LayerNorm(hidden),
            nn.ReLU(),
            nn.Linear(hidden, 2),
        )

    def forward(self, x: torch.Tensor) -> Prediction:
        if x.ndim not in (1, 2):
            raise ValueError(f"expected (D,) or (N, D) embeddings, got {tuple(x.shape)}")
        single = x.ndim == 1
        logits = self.mlp(x.unsqueeze(0) if single else x)
        if single:
            logits = logits.squeeze(0)
        return Prediction(logits=logits, probs=torch.softmax(logits, dim=-1))


def cross_entropy_loss(pred: Prediction, labels) -> torch.Tensor:
    """Mean of -log probs[label] over the batch, log floored at 1e-12."""
    probs = pred.probs
    if probs.ndim == 1:
        probs = probs.unsqueeze(0)
    y = torch.as_tensor(labels, dtype=torch.long, device=probs.device).reshape(-1)
    if y.shape[0] != probs.shape[0]:
        raise ValueError(f"got {probs.shape[0]} predictions but {y.shape[0]} labels")
    if ((y < 0) | (y > 1)).any():
        raise ValueError("labels must be 0 (real) or 1 (fake)")
    picked = probs[torch.arange(probs.shape[0]), y]
    return -picked.clamp_min(PROB_FLOOR).log().mean()
