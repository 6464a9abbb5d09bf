"""Frequency-domain pathway: 2-D DCT, band masks, and band decomposition.

The detector splits each color channel of a frame into four frequency bands
(low / mid / high / all-pass) in the DCT domain, reconstructs each band back
to the spatial domain, and mixes the resulting 12-channel stack down to a
3-channel "frequency image" that feeds the frequency backbone.

Band membership is decided by the anti-diagonal index ``s = i + j`` of a DCT
coefficient: a fixed binary mask selects ``low < s < up`` (strict), and a
learnable mask passed through a sigmoid is added on top so each band can
recover attenuated coefficients adaptively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
import torch
from torch import nn

BAND_NAMES = ("low", "mid", "high", "all")


def dct2(image: np.ndarray) -> np.ndarray:
    """Orthonormal type-II 2-D DCT of a single H x W array."""
    a = np.asarray(image)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"dct2 expects a 2-D array, got shape {a.shape}")
    return scipy.fft.dctn(a, type=2, norm="ortho")


def idct2(spectrum: np.ndarray) -> np.ndarray:
    """Inverse (type-III) of :func:`dct2`; ``idct2(dct2(x)) == x``."""
    a = np.asarray(spectrum)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"idct2 expects a 2-D array, got shape {a.shape}")
    return scipy.fft.idctn(a, type=2, norm="ortho")


def dct_matrix(n: int, dtype=np.float64) -> np.ndarray:
    """Orthonormal DCT-II basis matrix C, so that dct(x) = C @ x."""
    k = np.arange(n)[:, None].astype(np.float64)
    m = np.arange(n)[None, :].astype(np.float64)
    basis = np.cos(np.pi * (2.0 * m + 1.0) * k / (2.0 * n))
    basis *= np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    return basis.astype(dtype)


def default_cutoffs(h: int, w: int) -> dict[str, tuple[float, float]]:
    """Strict (low, up) cutoff pairs splitting the anti-diagonal index range.

    With ``s_max = (h - 1) + (w - 1)`` the bands cover
    ``[0, s_max/8) / [s_max/8, s_max/4) / [s_max/4, s_max]`` so that every
    coefficient belongs to exactly one of low/mid/high.
    """
    s_max = (h - 1) + (w - 1)
    b1 = int(np.ceil(s_max / 8.0))
    b2 = int(np.ceil(s_max / 4.0))
    return {
        "low": (-1, b1),
        "mid": (b1 - 1, b2),
        "high": (b2 - 1, s_max + 1),
    }


@dataclass
class BandMaskSet:
    """Fixed binary band masks plus zero-initialized learnable mask maps.

    ``fixed`` is a (4, H, W) float array ordered low/mid/high/all where entry
    (i, j) of band b is 1 iff ``low_b < i + j < up_b`` (the all-pass band is
    all ones).  ``learnable_init`` holds the initial values of the adaptive
    mask parameters; zeros make the sigmoid contribute 0.5 per band at init.
    """

    fixed: np.ndarray
    learnable_init: np.ndarray
    cutoffs: dict[str, tuple[float, float]]

    @property
    def height(self) -> int:
        return self.fixed.shape[1]

    @property
    def width(self) -> int:
        return self.fixed.shape[2]


def _banded_mask(h: int, w: int, low: float, up: float) -> np.ndarray:
    s = np.arange(h)[:, None] + np.arange(w)[None, :]
    return ((s > low) & (s < up)).astype(np.float64)


def build_band_masks(
    h: int, w: int, cutoffs: dict[str, tuple[float, float]] | None = None
) -> BandMaskSet:
    """Build the four band masks for an H x W spectrum.

    Raises ValueError if any band has ``low >= up`` or if the low/mid/high
    bands fail to partition the anti-diagonal support (gaps or overlaps).
    """
    if h < 1 or w < 1:
        raise ValueError(f"mask size must be positive, got {(h, w)}")
    if cutoffs is None:
        cutoffs = default_cutoffs(h, w)
    missing = {"low", "mid", "high"} - set(cutoffs)
    if missing:
        raise ValueError(f"cutoffs missing bands: {sorted(missing)}")
    for name in ("low", "mid", "high"):
        lo, up = cutoffs[name]
        if not lo < up:
            raise ValueError(f"band '{name}' has empty range (low={lo}, up={up})")

    masks = [_banded_mask(h, w, *cutoffs[name]) for name in ("low", "mid", "high")]
    coverage = masks[0] + masks[1] + masks[2]
    if coverage.max() > 1:
        raise ValueError("low/mid/high cutoffs overlap")
    if coverage.min() < 1:
        raise ValueError("low/mid/high cutoffs leave uncovered coefficients")
    masks.append(np.ones((h, w)))

    fixed = np.stack(masks).astype(np.float64)
    return BandMaskSet(
        fixed=fixed,
        learnable_init=np.zeros((4, h, w), dtype=np.float32),
        cutoffs=dict(cutoffs),
    )


class FrequencyDecomposer(nn.Module):
    """Differentiable per-band frequency decomposition of a 3-channel frame.

    For each color channel c and band b the output is
    ``idct2(dct2(x_c) * (M_b + sigmoid(S_b)))`` where M_b is the fixed band
    mask and S_b the learnable mask parameter.  Outputs are stacked
    band-major: channel index ``b * 3 + c`` of the (N, 12, H, W) result.
    """

    def __init__(
        self,
        h: int,
        w: int,
        cutoffs: dict[str, tuple[float, float]] | None = None,
        mask_init: str = "zeros",
    ):
        super().__init__()
        mask_set = build_band_masks(h, w, cutoffs)
        self.cutoffs = mask_set.cutoffs
        # kept in float64 and cast per forward so precision survives .double()
        self.register_buffer("fixed_masks", torch.from_numpy(mask_set.fixed))
        self.register_buffer("basis_h", torch.from_numpy(dct_matrix(h)))
        self.register_buffer("basis_w", torch.from_numpy(dct_matrix(w)))
        init = torch.from_numpy(mask_set.learnable_init.copy())
        if mask_init == "random":
            init = torch.randn(4, h, w) * 0.1
        elif mask_init != "zeros":
            raise ValueError(f"unknown mask_init {mask_init!r}")
        self.learnable_masks = nn.Parameter(init)

    def spectrum(self, x: torch.Tensor) -> torch.Tensor:
        """Orthonormal 2-D DCT over the trailing two dims."""
        basis_h = self.basis_h.to(x.dtype)
        basis_w = self.basis_w.to(x.dtype)
        return basis_h @ x @ basis_w.transpose(0, 1)

    def inverse_spectrum(self, y: torch.Tensor) -> torch.Tensor:
        basis_h = self.basis_h.to(y.dtype)
        basis_w = self.basis_w.to(y.dtype)
        return basis_h.transpose(0, 1) @ y @ basis_w

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        squeeze = frames.dim() == 3
        if squeeze:
            frames = frames.unsqueeze(0)
        n, c, h, w = frames.shape
        if c != 3:
            raise ValueError(f"expected 3-channel input, got {c} channels")
        if (h, w) != tuple(self.fixed_masks.shape[1:]):
            raise ValueError(
                f"input size {(h, w)} does not match masks "
                f"{tuple(self.fixed_masks.shape[1:])}"
            )
        spec = self.spectrum(frames)  # (N, 3, H, W)
        gain = self.fixed_masks.to(spec.dtype) + torch.sigmoid(
            self.learnable_masks
        )  # (4, H, W)
        banded = spec.unsqueeze(1) * gain.unsqueeze(1)  # (N, 4, 3, H, W)
        out = self.inverse_spectrum(banded).reshape(n, 12, h, w)
        return out.squeeze(0) if squeeze else out


class BandMixer(nn.Module):
    """Learnable pointwise 12 -> 3 channel mixing of a band stack."""

    def __init__(self, in_bands: int = 12, out_channels: int = 3):
        super().__init__()
        self.mix = nn.Conv2d(in_bands, out_channels, kernel_size=1)

    def forward(self, stack: torch.Tensor) -> torch.Tensor:
        squeeze = stack.dim() == 3
        if squeeze:
            stack = stack.unsqueeze(0)
        if stack.shape[1] != self.mix.in_channels:
            raise ValueError(
                f"expected {self.mix.in_channels}-channel stack, got {stack.shape[1]}"
            )
        out = self.mix(stack)
        return out.squeeze(0) if squeeze else out


class FrequencyPathway(nn.Module):
    """Decomposition followed by channel mixing: frame -> frequency image."""

    def __init__(
        self,
        h: int,
        w: int,
        cutoffs: dict[str, tuple[float, float]] | None = None,
        mask_init: str = "zeros",
    ):
        super().__init__()
        self.decomposer = FrequencyDecomposer(h, w, cutoffs, mask_init)
        self.mixer = BandMixer()

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        return self.mixer(self.decomposer(frames))


def band_energies(
    image: np.ndarray, masks: BandMaskSet | None = None
) -> np.ndarray:
    """Per-band spectral energy of one channel: sum of squared masked DCT
    coefficients for each of low/mid/high/all.  Used as an independent probe
    of how much high-frequency content a frame carries."""
    a = np.asarray(image, dtype=np.float64)
    if masks is None:
        masks = build_band_masks(a.shape[0], a.shape[1])
    spec = dct2(a)
    return np.array([float(np.sum((spec * m) ** 2)) for m in masks.fixed])
