"""Training-time video augmentations: horizontal flip and re-compression.

The flip mirrors pixels and landmark x-coordinates together and permutes the
68-point indexing so left/right features keep their semantic slots (jaw tip
stays index 8, the left eye corner becomes the right one, and so on).
Re-compression is approximated by quantizing global DCT coefficients at a
random quality, which suppresses small high-frequency terms the way lossy
codecs do without pulling in a codec.
"""

from __future__ import annotations

import numpy as np

from .frequency import dct2, idct2

QUALITY_RANGE = (0.3, 0.9)
QUANT_STEP_MAX = 0.5


def _build_flip_index() -> np.ndarray:
    pairs = (
        [(i, 16 - i) for i in range(8)]  # jaw
        + [(17 + i, 26 - i) for i in range(5)]  # brows
        + [(31, 35), (32, 34)]  # nostrils
        + [(36, 45), (37, 44), (38, 43), (39, 42), (40, 47), (41, 46)]  # eyes
        + [(48, 54), (49, 53), (50, 52), (55, 59), (56, 58)]  # outer lips
        + [(60, 64), (61, 63), (65, 67)]  # inner lips
    )
    index = np.arange(68)
    for a, b in pairs:
        index[a], index[b] = b, a
    return index


# FLIP_INDEX[i] is the source point that lands at slot i after a mirror.
FLIP_INDEX = _build_flip_index()


def horizontal_flip(frames: np.ndarray, landmarks: np.ndarray):
    """Mirror frames about the vertical center line, remapping landmarks.

    frames: (..., H, W); landmarks: (..., 68, 2) in pixel (x, y) order.
    """
    if landmarks.shape[-2:] != (68, 2):
        raise ValueError(f"expected (..., 68, 2) landmarks, got {landmarks.shape}")
    width = frames.shape[-1]
    flipped = np.ascontiguousarray(frames[..., ::-1])
    pts = landmarks[..., FLIP_INDEX, :].copy()
    pts[..., 0] = (width - 1) - pts[..., 0]
    np.clip(pts[..., 0], 0.0, width - 1e-3, out=pts[..., 0])
    return flipped, pts


def quantize_compression(frames: np.ndarray, quality: float) -> np.ndarray:
    """Round every global DCT coefficient to a step set by ``quality``.

    quality 1.0 is lossless; lower values coarsen the step linearly up to
    QUANT_STEP_MAX, zeroing small coefficients first.
    """
    if not 0.0 < quality <= 1.0:
        raise ValueError(f"quality must be in (0, 1], got {quality}")
    step = QUANT_STEP_MAX * (1.0 - quality)
    if step == 0.0:
        return frames.copy()
    shape = frames.shape
    out = np.empty(shape, dtype=frames.dtype)
    flat_in = frames.reshape(-1, shape[-2], shape[-1])
    flat_out = out.reshape(-1, shape[-2], shape[-1])
    for i in range(flat_in.shape[0]):
        coeff = dct2(flat_in[i].astype(np.float64))
        coeff = np.round(coeff / step) * step
        flat_out[i] = np.clip(idct2(coeff), 0.0, 1.0).astype(frames.dtype)
    return out


def augment_video(frames: np.ndarray, landmarks: np.ndarray, rng: np.random.Generator):
    """Apply each augmentation independently with probability 1/2."""
    if rng.random() < 0.5:
        frames, landmarks = horizontal_flip(frames, landmarks)
    if rng.random() < 0.5:
        frames = quantize_compression(frames, rng.uniform(*QUALITY_RANGE))
    return frames, landmarks
