"""Dataset directory IO: a JSON manifest plus one raw binary blob per sample.

Layout: ``manifest.json`` lists sample ids, labels, tensor shapes, dtype and
byte order; each ``<sample_id>.bin`` holds the frames array then the
landmarks array.  Each array is encoded as a little-endian u32 rank, the
little-endian u32 dims, then the C-order float32 payload.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .samples import VideoSample

MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1


class DatasetError(Exception):
    """Raised for unreadable, inconsistent, or truncated dataset files."""


def _write_array(f, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    f.write(struct.pack("<I", arr.ndim))
    f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    f.write(arr.tobytes())


def _read_array(f, sample_id: str, expected_shape: tuple[int, ...]) -> np.ndarray:
    head = f.read(4)
    if len(head) < 4:
        raise DatasetError(f"[{sample_id}] truncated array header")
    ndim = struct.unpack("<I", head)[0]
    if ndim != len(expected_shape):
        raise DatasetError(
            f"[{sample_id}] rank {ndim} does not match manifest rank {len(expected_shape)}"
        )
    dims_raw = f.read(4 * ndim)
    if len(dims_raw) < 4 * ndim:
        raise DatasetError(f"[{sample_id}] truncated dims header")
    shape = struct.unpack(f"<{ndim}I", dims_raw)
    if shape != tuple(expected_shape):
        raise DatasetError(
            f"[{sample_id}] payload shape {shape} does not match manifest {tuple(expected_shape)}"
        )
    count = math.prod(shape)
    payload = f.read(4 * count)
    if len(payload) < 4 * count:
        raise DatasetError(
            f"[{sample_id}] truncated payload: expected {4 * count} bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(shape).copy()


def save_dataset(samples, path, overwrite: bool = False) -> None:
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    if manifest_path.exists() and not overwrite:
        raise DatasetError(f"{manifest_path} already exists (pass overwrite to replace)")
    path.mkdir(parents=True, exist_ok=True)
    entries = []
    seen = set()
    for sample in samples:
        sample.validate()
        if sample.sample_id in seen:
            raise DatasetError(f"duplicate sample_id {sample.sample_id}")
        seen.add(sample.sample_id)
        file_name = f"{sample.sample_id}.bin"
        with open(path / file_name, "wb") as f:
            _write_array(f, sample.frames)
            _write_array(f, sample.landmarks)
        entries.append(
            {
                "sample_id": sample.sample_id,
                "label": int(sample.label),
                "file": file_name,
                "frames_shape": list(sample.frames.shape),
                "landmarks_shape": list(sample.landmarks.shape),
            }
        )
    manifest = {
        "format_version": FORMAT_VERSION,
        "dtype": "float32",
        "byte_order": "little",
        "samples": entries,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


def load_dataset(path) -> list[VideoSample]:
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.exists():
        raise DatasetError(f"no {MANIFEST_NAME} in {path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"corrupt manifest {manifest_path}: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise DatasetError(f"unsupported format_version {manifest.get('format_version')}")
    if manifest.get("dtype") != "float32" or manifest.get("byte_order") != "little":
        raise DatasetError("manifest must declare little-endian float32 payloads")

    samples = []
    for entry in manifest.get("samples", []):
        try:
            sid = entry["sample_id"]
            frames_shape = tuple(entry["frames_shape"])
            landmarks_shape = tuple(entry["landmarks_shape"])
            label = entry["label"]
            file_name = entry["file"]
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"manifest entry missing field: {exc}") from exc
        if len(frames_shape) != 4 or frames_shape[0] < 1:
            raise DatasetError(f"[{sid}] manifest declares invalid frames shape {frames_shape}")
        blob = path / file_name
        if not blob.exists():
            raise DatasetError(f"[{sid}] missing payload file {blob}")
        with open(blob, "rb") as f:
            frames = _read_array(f, sid, frames_shape)
            landmarks = _read_array(f, sid, landmarks_shape)
            if f.read(1):
                raise DatasetError(f"[{sid}] trailing bytes after payload")
        try:
            sample = VideoSample(
                frames=frames, landmarks=landmarks, label=label, sample_id=sid
            ).validate()
        except ValueError as exc:
            raise DatasetError(str(exc)) from exc
        samples.append(sample)
    return samples
