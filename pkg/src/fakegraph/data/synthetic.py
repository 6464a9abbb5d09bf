"""Synthetic face-like video generator with controllable artifacts.

A "real" sample is a smoothly drifting ellipse face with eye/nose/mouth
blobs and landmarks that track the rendered geometry.  A "fake" sample
starts from the identical base render (same seed, same random draws) and
adds the configured artifacts:

- spatial: a face-tracking rectangular patch with a hard color seam
- frequency: a faint pixel-parity checkerboard masked to the face
- temporal: per-frame flicker of face size, eye/mouth contrast, and
  brightness/tint; each per-frame value is a plausible real draw and every
  series is recentered so its video average equals the real per-video
  draw, so only cross-frame inconsistency gives it away
- landmark: coordinate noise on the landmarks, pixels untouched

Every random draw comes from named child streams of the config seed, so the
base scene is identical for real and fake samples of the same seed and
adding one artifact never perturbs another.
"""

from __future__ import annotations

import numpy as np

from .samples import ARTIFACT_KINDS, SyntheticArtifactConfig, VideoSample

CHECKER_AMPLITUDE = 0.018  # frequency artifact strength at severity 1
PATCH_BLEND = 0.85  # spatial artifact channel-mix fraction at severity 1
PATCH_LIFT = 0.16  # spatial artifact constant brightness lift at severity 1
LANDMARK_NOISE_FRAC = 0.09  # landmark noise sigma as a fraction of min(H, W)
BRIGHTNESS_RANGE = (0.9, 1.1)  # per-video (and temporal per-frame) brightness
TINT_RANGE = (0.90, 1.10)  # per-video (and temporal per-frame) channel tint
SENSOR_NOISE = 0.008
FACE_RX_RANGE = (0.22, 0.27)  # face half-width as a fraction of frame width
FACE_RY_RANGE = (0.25, 0.30)  # face half-height as a fraction of frame height
EYE_AMP_RANGE = (0.25, 0.35)
MOUTH_AMP_RANGE = (0.15, 0.25)


def landmark_template() -> np.ndarray:
    """Canonical 68-point layout in face-local coords, u and v in [-1, 1].

    Follows the usual ordering: jaw 0-16, brows 17-26, nose 27-35, eyes
    36-47, outer lip 48-59, inner lip 60-67.  Mirroring u -> -u maps the
    layout onto itself under the standard left/right index exchange.
    """
    pts = np.zeros((68, 2))
    t = np.linspace(0.0, 1.0, 17)
    pts[0:17, 0] = -0.95 * np.cos(np.pi * t)
    pts[0:17, 1] = -0.1 + 1.05 * np.sin(np.pi * t)
    s = np.linspace(0.0, 1.0, 5)
    pts[17:22, 0] = -0.7 + 0.5 * s
    pts[17:22, 1] = -0.55 - 0.06 * np.sin(np.pi * s)
    pts[22:27, 0] = 0.2 + 0.5 * s
    pts[22:27, 1] = -0.55 - 0.06 * np.sin(np.pi * s)[::-1]
    pts[27:31, 0] = 0.0
    pts[27:31, 1] = np.linspace(-0.35, 0.1, 4)
    pts[31:36, 0] = np.linspace(-0.16, 0.16, 5)
    pts[31:36, 1] = 0.2
    eye_angles = np.array([180.0, 135.0, 45.0, 0.0, 315.0, 225.0]) * np.pi / 180.0
    eye = np.stack([0.15 * np.cos(eye_angles), -0.06 * np.sin(eye_angles)], axis=1)
    pts[36:42] = eye + np.array([-0.45, -0.3])
    pts[42:48] = eye * np.array([-1.0, 1.0]) + np.array([0.45, -0.3])
    pts[42:48] = pts[42:48][[3, 2, 1, 0, 5, 4]]  # keep inner corner first
    lip_u = np.array([-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3])
    arc = 0.12 * np.cos(lip_u / 0.3 * np.pi / 2)
    pts[48:55, 0] = lip_u
    pts[48:55, 1] = 0.55 - arc
    pts[55:60, 0] = lip_u[5:0:-1]
    pts[55:60, 1] = 0.55 + arc[5:0:-1]
    inner_u = np.array([-0.2, -0.1, 0.0, 0.1, 0.2])
    inner_arc = 0.05 * np.cos(inner_u / 0.2 * np.pi / 2)
    pts[60:65, 0] = inner_u
    pts[60:65, 1] = 0.55 - inner_arc
    pts[65:68, 0] = inner_u[3:0:-1]
    pts[65:68, 1] = 0.55 + inner_arc[3:0:-1]
    return pts


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(5)
    names = ("base",) + ARTIFACT_KINDS
    return {name: np.random.default_rng(ss) for name, ss in zip(names, children)}


def _gaussian(xx, yy, px, py, sx, sy):
    return np.exp(-(((xx - px) / sx) ** 2 + ((yy - py) / sy) ** 2) / 2.0)


def generate_synthetic_video(config: SyntheticArtifactConfig, label: int) -> VideoSample:
    if label not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {label}")
    kinds = config.artifact_kinds if label == 1 else ()
    if label == 1 and not kinds:
        raise ValueError("a fake sample needs at least one artifact kind")

    h, w = config.frame_size
    t_frames = config.frames_per_video
    sev = config.severity
    rngs = _streams(config.rng_seed)
    base = rngs["base"]

    # per-video scene parameters, identical for real/fake at the same seed
    cx0 = w * (0.5 + base.uniform(-0.06, 0.06))
    cy0 = h * (0.5 + base.uniform(-0.06, 0.06))
    rx = w * base.uniform(*FACE_RX_RANGE)
    ry = h * base.uniform(*FACE_RY_RANGE)
    amp_x = w * base.uniform(0.01, 0.05)
    amp_y = h * base.uniform(0.01, 0.05)
    freq_x, freq_y = base.uniform(0.5, 1.5, size=2)
    phase_x, phase_y = base.uniform(0.0, 2.0 * np.pi, size=2)
    skin = base.uniform(0.55, 0.75, size=3)
    background = base.uniform(0.15, 0.35, size=3)
    gradient = base.uniform(0.02, 0.08)
    eye_amp = base.uniform(*EYE_AMP_RANGE)
    mouth_amp = base.uniform(*MOUTH_AMP_RANGE)
    brightness = base.uniform(*BRIGHTNESS_RANGE)
    tint = base.uniform(*TINT_RANGE, size=3)

    # appearance params the temporal artifact makes inconsistent across
    # frames; each per-frame series is recentered so the video average
    # equals the per-video draw a real sample would use
    rx_f = np.full(t_frames, rx)
    ry_f = np.full(t_frames, ry)
    eye_f = np.full(t_frames, eye_amp)
    mouth_f = np.full(t_frames, mouth_amp)
    if "temporal" in kinds:
        rng = rngs["temporal"]

        def flicker(base_val, lo, hi, scale=1.0):
            draws = scale * rng.uniform(lo, hi, size=t_frames)
            draws += base_val - draws.mean()
            return base_val + sev * (draws - base_val)

        rx_f = flicker(rx, *FACE_RX_RANGE, scale=w)
        ry_f = flicker(ry, *FACE_RY_RANGE, scale=h)
        eye_f = flicker(eye_amp, *EYE_AMP_RANGE)
        mouth_f = flicker(mouth_amp, *MOUTH_AMP_RANGE)

    template = landmark_template()
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    steps = np.arange(t_frames, dtype=np.float64) / max(t_frames, 2)

    frames = np.empty((t_frames, 3, h, w), dtype=np.float64)
    landmarks = np.empty((t_frames, 68, 2), dtype=np.float64)
    face_alphas = np.empty((t_frames, h, w), dtype=np.float64)
    centers = np.empty((t_frames, 2), dtype=np.float64)

    for f in range(t_frames):
        cx = cx0 + amp_x * np.sin(2.0 * np.pi * freq_x * steps[f] + phase_x)
        cy = cy0 + amp_y * np.sin(2.0 * np.pi * freq_y * steps[f] + phase_y)
        centers[f] = (cx, cy)
        frx, fry = rx_f[f], ry_f[f]
        pts = template * np.array([frx, fry]) + np.array([cx, cy])
        landmarks[f] = pts

        r2 = ((xx - cx) / frx) ** 2 + ((yy - cy) / fry) ** 2
        alpha = np.clip((1.0 - r2) * 4.0, 0.0, 1.0)  # soft face rim
        face_alphas[f] = alpha
        img = background[:, None, None] + gradient * (yy / h - 0.5)
        img = img * (1.0 - alpha) + skin[:, None, None] * alpha

        eye_sx, eye_sy = 0.11 * frx, 0.08 * fry
        for center_pts in (pts[36:42], pts[42:48]):
            ex, ey = center_pts.mean(axis=0)
            img -= eye_f[f] * _gaussian(xx, yy, ex, ey, eye_sx, eye_sy)
        for brow in (pts[17:22], pts[22:27]):
            bx, by = brow.mean(axis=0)
            img -= 0.12 * _gaussian(xx, yy, bx, by, 0.18 * frx, 0.035 * fry)
        nx, ny = pts[30]
        img -= 0.08 * _gaussian(xx, yy, nx, ny, 0.08 * frx, 0.10 * fry)
        mx, my = pts[48:60].mean(axis=0)
        mouth = mouth_f[f] * _gaussian(xx, yy, mx, my, 0.30 * frx, 0.10 * fry)
        img[0] -= 0.3 * mouth
        img[1] -= mouth
        img[2] -= mouth
        img += base.normal(0.0, SENSOR_NOISE, size=(3, h, w))
        frames[f] = img

    if "spatial" in kinds:
        rng = rngs["spatial"]
        half_w = rx * rng.uniform(0.5, 0.7)
        half_h = ry * rng.uniform(0.35, 0.5)
        off_x = rx * rng.uniform(-0.2, 0.2)
        off_y = ry * rng.uniform(0.0, 0.4)  # tends toward the mouth region
        blend = PATCH_BLEND * sev
        lift = PATCH_LIFT * sev
        for f in range(t_frames):
            cx, cy = centers[f] + (off_x, off_y)
            x0, x1 = int(max(cx - half_w, 0)), int(min(cx + half_w, w))
            y0, y1 = int(max(cy - half_h, 0)), int(min(cy + half_h, h))
            patch = frames[f][:, y0:y1, x0:x1]
            frames[f][:, y0:y1, x0:x1] = (1.0 - blend) * patch + blend * patch[[2, 0, 1]] + lift

    if "frequency" in kinds:
        checker = ((xx + yy) % 2.0) * 2.0 - 1.0
        amp = CHECKER_AMPLITUDE * sev
        frames += (amp * checker) * face_alphas[:, None, :, :]

    if "temporal" in kinds:
        rng = rngs["temporal"]
        gain = rng.uniform(*BRIGHTNESS_RANGE, size=(t_frames, 1)) * rng.uniform(
            *TINT_RANGE, size=(t_frames, 3)
        )
        base_gain = brightness * tint  # (3,)
        gain *= base_gain / gain.mean(axis=0)  # video-average gain stays real
        gain = base_gain + sev * (gain - base_gain)  # (T, 3)
        frames *= gain[:, :, None, None]
    else:
        frames *= brightness * tint[:, None, None]

    if "landmark" in kinds:
        rng = rngs["landmark"]
        sigma = LANDMARK_NOISE_FRAC * min(h, w) * sev
        landmarks = landmarks + rng.normal(0.0, sigma, size=landmarks.shape)

    frames = np.clip(frames, 0.0, 1.0).astype(np.float32)
    landmarks[..., 0] = np.clip(landmarks[..., 0], 0.0, w - 1e-3)
    landmarks[..., 1] = np.clip(landmarks[..., 1], 0.0, h - 1e-3)
    landmarks = landmarks.astype(np.float32)

    sample_id = f"{'fake' if label else 'real'}-{config.rng_seed & 0xFFFFFFFF:08x}"
    return VideoSample(
        frames=frames, landmarks=landmarks, label=label, sample_id=sample_id
    ).validate()


def generate_dataset(
    n_videos: int,
    artifact_kinds="mixed",
    severity: float = 1.0,
    frame_size=(64, 64),
    frames_per_video: int = 8,
    fake_fraction: float = 0.5,
    seed: int = 0,
    id_prefix: str = "video",
) -> list[VideoSample]:
    """Generate a labeled corpus; pure function of its arguments.

    ``artifact_kinds`` is either "mixed" (each fake draws a random subset of
    at least two of the four kinds, so every fake shows several co-occurring
    artifact families) or an explicit list applied to every fake.
    """
    if n_videos < 1:
        raise ValueError("n_videos must be >= 1")
    if not 0.0 <= fake_fraction <= 1.0:
        raise ValueError("fake_fraction must be in [0, 1]")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 1)))
    sample_seeds = np.random.SeedSequence((int(seed), 2)).generate_state(
        n_videos, dtype=np.uint64
    )
    n_fake = round(n_videos * fake_fraction)
    labels = np.array([1] * n_fake + [0] * (n_videos - n_fake))
    labels = labels[rng.permutation(n_videos)]

    mixed = isinstance(artifact_kinds, str)
    if mixed and artifact_kinds != "mixed":
        raise ValueError(f"unknown artifact mode {artifact_kinds!r}")

    samples = []
    for i in range(n_videos):
        if labels[i] == 1:
            if mixed:
                kinds = ()
                while len(kinds) < 2:
                    kinds = tuple(k for k in ARTIFACT_KINDS if rng.random() < 0.5)
            else:
                kinds = tuple(artifact_kinds)
        else:
            kinds = ()
        config = SyntheticArtifactConfig(
            artifact_kinds=kinds,
            severity=severity,
            rng_seed=int(sample_seeds[i]),
            frame_size=tuple(frame_size),
            frames_per_video=frames_per_video,
        )
        sample = generate_synthetic_video(config, int(labels[i]))
        sample.sample_id = f"{id_prefix}-{i:05d}-{sample.sample_id}"
        samples.append(sample)
    return samples
