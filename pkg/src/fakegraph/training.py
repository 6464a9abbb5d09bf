"""Training, evaluation, and inference for the detector.

AdamW at a constant learning rate, cross-entropy on video predictions,
per-epoch logging of mean training loss and validation AUC, early stopping
with a patience counter, and best-validation checkpointing. Given one seed,
data order, initialization, and therefore the final report are fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .augment import augment_video
from .config import ExperimentConfig, config_from_dict, config_hash, config_to_dict
from .data import VideoSample, load_dataset
from .head import cross_entropy_loss
from .metrics import EvalReport, auc
from .model import DeepfakeDetector, first_nonfinite

CHECKPOINT_VERSION = 1


class TrainingError(RuntimeError):
    """Raised for aborted or misconfigured training runs."""


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    val_auc: float


@dataclass
class TrainResult:
    checkpoint_path: Path
    history: list[EpochLog] = field(default_factory=list)
    best_epoch: int = 0
    best_val_auc: float = 0.0
    stopped_early: bool = False


def batch_tensors(samples):
    """Stack samples into (B, T, 3, H, W) frames, (B, T, P, 2) landmarks, labels."""
    frames = torch.from_numpy(np.stack([s.frames for s in samples]))
    landmarks = torch.from_numpy(
        np.stack([s.landmarks for s in samples]).astype(np.float32)
    )
    labels = torch.tensor([s.label for s in samples], dtype=torch.long)
    return frames, landmarks, labels


def train_one_epoch(model, optimizer, samples, batch_size, order_rng, augment_rng=None):
    """One pass over the samples in a shuffled order; returns the mean loss.

    Aborts with a diagnostic naming the first non-finite traced tensor if the
    loss stops being finite.
    """
    model.train()
    order = order_rng.permutation(len(samples))
    total, count = 0.0, 0
    for start in range(0, len(order), batch_size):
        batch = [samples[i] for i in order[start : start + batch_size]]
        if augment_rng is not None:
            augmented = []
            for s in batch:
                frames, landmarks = augment_video(s.frames, s.landmarks, augment_rng)
                augmented.append(VideoSample(frames, landmarks, s.label, s.sample_id))
            batch = augmented
        frames, landmarks, labels = batch_tensors(batch)
        trace = {}
        try:
            pred = model(frames, landmarks, trace)
            loss = cross_entropy_loss(pred, labels)
        except ValueError as exc:
            # a module guard fired mid-forward; the trace says where it began
            culprit = first_nonfinite(trace)
            if culprit is None:
                raise
            raise TrainingError(
                f"non-finite values on batch starting at index {start}; "
                f"first non-finite tensor: {culprit}"
            ) from exc
        if not torch.isfinite(loss):
            culprit = first_nonfinite(trace) or "loss"
            raise TrainingError(
                f"non-finite loss on batch starting at index {start}; "
                f"first non-finite tensor: {culprit}"
            )
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        total += float(loss.detach()) * len(batch)
        count += len(batch)
    return total / count


def evaluate(model, samples, batch_size: int = 8) -> EvalReport:
    """Score every video with the model and assemble the metric report."""
    model.eval()
    ids, scores, labels = [], [], []
    with torch.no_grad():
        for start in range(0, len(samples), batch_size):
            batch = samples[start : start + batch_size]
            frames, landmarks, batch_labels = batch_tensors(batch)
            pred = model(frames, landmarks)
            scores.extend(float(p) for p in pred.fake_probability())
            labels.extend(int(l) for l in batch_labels)
            ids.extend(s.sample_id for s in batch)
    return EvalReport.from_scores(ids, scores, labels)


def infer(model, sample: VideoSample) -> dict:
    """Fake-probability for one video plus per-frame embedding norms."""
    model.eval()
    frames = torch.from_numpy(sample.frames)
    landmarks = torch.from_numpy(sample.landmarks.astype(np.float32))
    trace = {}
    with torch.no_grad():
        pred = model(frames, landmarks, trace)
    norms = trace["frame_embeddings"].norm(dim=-1)
    return {
        "sample_id": sample.sample_id,
        "fake_probability": float(pred.fake_probability()),
        "frame_embedding_norms": [float(v) for v in norms],
    }


def save_checkpoint(path, model, cfg: ExperimentConfig, epoch: int, val_auc: float):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "version": CHECKPOINT_VERSION,
            "state_dict": model.state_dict(),
            "config": config_to_dict(cfg),
            "config_hash": config_hash(cfg),
            "epoch": epoch,
            "val_auc": val_auc,
        },
        path,
    )


def load_checkpoint(path, expected: ExperimentConfig | None = None):
    """Rebuild the trained model; returns (model, config, payload).

    If ``expected`` is given its hash must match the stored one, so a model
    can never be silently evaluated under a config it was not trained with.
    """
    path = Path(path)
    if not path.exists():
        raise TrainingError(f"no checkpoint at {path}")
    payload = torch.load(path, map_location="cpu")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise TrainingError(f"unsupported checkpoint version {payload.get('version')}")
    cfg = config_from_dict(payload["config"])
    stored_hash = payload["config_hash"]
    if config_hash(cfg) != stored_hash:
        raise TrainingError(f"checkpoint {path} is corrupt: config hash mismatch")
    if expected is not None and config_hash(expected) != stored_hash:
        raise TrainingError(
            f"config hash {config_hash(expected)[:12]} does not match the hash "
            f"{stored_hash[:12]} stored in {path}; the checkpoint was trained "
            "under a different configuration"
        )
    model = DeepfakeDetector(cfg.model, cfg.data.frame_size)
    model.load_state_dict(payload["state_dict"])
    return model, cfg, payload


def _report_loss(report: EvalReport) -> float:
    """Mean cross-entropy implied by a report's per-video fake probabilities."""
    eps = 1e-12
    losses = [
        -np.log(max(p if label == 1 else 1.0 - p, eps))
        for _, p, label in report.per_video_scores
    ]
    return float(np.mean(losses))


def train(cfg: ExperimentConfig, log=None) -> TrainResult:
    """Run the full loop and leave the best-validation checkpoint on disk."""
    train_samples = load_dataset(cfg.data.split_dir("train"))
    val_samples = load_dataset(cfg.data.split_dir("val"))
    val_labels = [s.label for s in val_samples]
    if len(set(val_labels)) < 2:
        raise TrainingError("validation split needs both real and fake videos")

    torch.manual_seed(cfg.seed)
    model = DeepfakeDetector(cfg.model, cfg.data.frame_size)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=cfg.train.learning_rate,
        weight_decay=cfg.train.weight_decay,
    )
    order_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 3)))
    augment_rng = (
        np.random.default_rng(np.random.SeedSequence((cfg.seed, 4)))
        if cfg.train.augment
        else None
    )

    result = TrainResult(checkpoint_path=Path(cfg.train.checkpoint))
    best_auc, best_val_loss, patience = -1.0, float("inf"), 0
    for epoch in range(1, cfg.train.epochs + 1):
        loss = train_one_epoch(
            model, optimizer, train_samples, cfg.train.batch_size, order_rng, augment_rng
        )
        with torch.no_grad():
            val_report = evaluate(model, val_samples, cfg.train.batch_size)
        val_loss = _report_loss(val_report)
        result.history.append(EpochLog(epoch, loss, val_report.auc))
        if log:
            log(f"epoch {epoch}: train_loss {loss:.6f} val_auc {val_report.auc:.4f}")
        improved = val_report.auc > best_auc
        # ties on val AUC (common once it saturates) break toward lower val loss
        if improved or (val_report.auc == best_auc and val_loss < best_val_loss):
            best_auc, best_val_loss = val_report.auc, val_loss
            result.best_epoch, result.best_val_auc = epoch, val_report.auc
            save_checkpoint(result.checkpoint_path, model, cfg, epoch, val_report.auc)
        if improved:
            patience = 0
        else:
            patience += 1
            if patience >= cfg.train.early_stop_patience:
                result.stopped_early = True
                if log:
                    log(f"early stop after epoch {epoch} (best epoch {result.best_epoch})")
                break
    return result
