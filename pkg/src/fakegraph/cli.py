"""Command-line entry points: generate | train | eval | infer.

One YAML config drives the whole pipeline: ``generate`` writes the three
dataset splits it describes, ``train`` fits the model and leaves the best
checkpoint, ``eval`` scores the eval split with a stored checkpoint, and
``infer`` scores a single video. Exit code 0 on success, 1 with a message
on stderr for any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .data import DatasetError, generate_dataset, load_dataset, save_dataset
from .training import TrainingError, evaluate, infer, load_checkpoint, train

SPLITS = ("train", "val", "eval")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fakegraph", description="Synthetic deepfake detection pipeline."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the synthetic train/val/eval splits")
    p.add_argument("--config", required=True, help="YAML experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--overwrite", action="store_true", help="replace existing splits")

    p = sub.add_parser("train", help="train and write the best-validation checkpoint")
    p.add_argument("--config", required=True, help="YAML experiment config")
    p.add_argument("--checkpoint", default=None, help="override the checkpoint path")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("eval", help="score the eval split with a checkpoint")
    p.add_argument("--config", required=True, help="YAML experiment config")
    p.add_argument("--checkpoint", default=None, help="override the checkpoint path")
    p.add_argument("--out", default=None, help="also write the JSON report here")

    p = sub.add_parser("infer", help="score one stored video")
    p.add_argument("sample", help="path DIR/SAMPLE_ID inside a generated split")
    p.add_argument("--checkpoint", required=True, help="trained checkpoint")
    p.add_argument("--out", default=None, help="also write the JSON result here")
    return parser


def cmd_generate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    counts = {"train": cfg.data.n_train, "val": cfg.data.n_val, "eval": cfg.data.n_eval}
    for k, split in enumerate(SPLITS):
        samples = generate_dataset(
            counts[split],
            artifact_kinds=cfg.data.artifact_kinds,
            severity=cfg.data.severity,
            frame_size=cfg.data.frame_size,
            frames_per_video=cfg.data.frames_per_video,
            fake_fraction=cfg.data.fake_fraction,
            seed=cfg.seed * 10 + k,  # distinct per split, disjoint across seeds
            id_prefix=split,
        )
        out_dir = cfg.data.split_dir(split)
        save_dataset(samples, out_dir, overwrite=args.overwrite)
        print(f"wrote {len(samples)} videos to {out_dir}")
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.checkpoint is not None:
        cfg.train.checkpoint = args.checkpoint
    result = train(cfg, log=print)
    print(
        f"best epoch {result.best_epoch} (val_auc {result.best_val_auc:.4f}), "
        f"checkpoint {result.checkpoint_path}"
    )
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    checkpoint = args.checkpoint if args.checkpoint is not None else cfg.train.checkpoint
    model, _, _ = load_checkpoint(checkpoint, expected=cfg)
    samples = load_dataset(cfg.data.split_dir("eval"))
    report = evaluate(model, samples, cfg.train.batch_size)
    text = report.to_json()
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text)
    return 0


def cmd_infer(args) -> int:
    sample_path = Path(args.sample)
    sample_id = sample_path.name.removesuffix(".bin")
    model, _, _ = load_checkpoint(args.checkpoint)
    samples = load_dataset(sample_path.parent)
    by_id = {s.sample_id: s for s in samples}
    if sample_id not in by_id:
        raise DatasetError(f"no sample {sample_id!r} in {sample_path.parent}")
    result = infer(model, by_id[sample_id])
    text = json.dumps(result, indent=2)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "generate": cmd_generate,
        "train": cmd_train,
        "eval": cmd_eval,
        "infer": cmd_infer,
    }[args.command]
    try:
        return handler(args)
    except (ConfigError, DatasetError, TrainingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
