"""Command-line entry point for the ColdGAN toolkit."""

from __future__ import annotations

import argparse
import logging
import os
from pathlib import Path
from typing import Callable, Dict, List

from . import ablation, commands
from .config import DEFAULT_CONFIG, RunConfig, load_run_config
from .data.stats import format_stats_table
from .errors import ColdGanError, ExitCode
from .evaluation.evaluate import format_metrics_table
from .manifest import ManifestRecorder

logger = logging.getLogger(__name__)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        "-c",
        default=DEFAULT_CONFIG,
        help="Path to the YAML run configuration.",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="BLOCK.KEY=VALUE",
        help="Override a config value (repeatable), e.g. --set training.epochs=20.",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Root seed; wins over COLDGAN_SEED and the config file.",
    )
    parser.add_argument(
        "--out-dir",
        dest="out_dir",
        default=None,
        help="Directory for checkpoints, reports, history and manifests.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coldgan",
        description="Cold-start recommendation with a rejuvenation-trained GAN",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    ingest = subparsers.add_parser("ingest", help="Parse, filter and dump a rating log with statistics.")
    _add_run_options(ingest)

    train = subparsers.add_parser("train", help="Train a model and write the best checkpoint.")
    _add_run_options(train)

    evaluate = subparsers.add_parser("evaluate", help="Score the test cohort and write a metrics report.")
    _add_run_options(evaluate)
    evaluate.add_argument(
        "--checkpoint",
        default=None,
        help="Checkpoint to evaluate (defaults to <out-dir>/checkpoints/model.cgan).",
    )
    evaluate.add_argument(
        "--baseline",
        choices=commands.BASELINES,
        default=None,
        help="Evaluate a yardstick scorer instead of the checkpoint.",
    )

    recommend = subparsers.add_parser("recommend", help="Recommend items for one new user.")
    recommend.add_argument("--checkpoint", required=True, help="Trained checkpoint.")
    recommend.add_argument(
        "--ratings",
        required=True,
        help="CSV of item_id,rating,timestamp rows for the new user.",
    )
    recommend.add_argument("-k", type=int, default=10, help="Number of items to recommend.")
    recommend.add_argument(
        "--out-dir",
        dest="out_dir",
        default=None,
        help="Where to write the manifest (defaults to the checkpoint's run directory).",
    )

    ablate = subparsers.add_parser("ablate", help="Run the drop-out x relevant-loss ablation grid.")
    _add_run_options(ablate)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    try:
        return load_run_config(Path(args.config), overrides=args.overrides, seed=args.seed, out_dir=args.out_dir)
    except ColdGanError:
        if args.out_dir is None:
            raise
        # the recorder writes the failed manifest and re-raises
        with ManifestRecorder(Path(args.out_dir), args.command):
            raise


def _run_ingest(args: argparse.Namespace) -> None:
    stats = commands.cmd_ingest(_load_config(args))
    print(format_stats_table(stats))


def _run_train(args: argparse.Namespace) -> None:
    config = _load_config(args)
    model = commands.cmd_train(config)
    print(f"Trained {len(model.history)} epoch(s)")
    print(f"Checkpoint written to {commands.checkpoint_path(config.out_dir)}")


def _run_evaluate(args: argparse.Namespace) -> None:
    checkpoint = Path(args.checkpoint) if args.checkpoint else None
    report = commands.cmd_evaluate(_load_config(args), checkpoint=checkpoint, baseline=args.baseline)
    print(format_metrics_table(report))


def _run_recommend(args: argparse.Namespace) -> None:
    out_dir = Path(args.out_dir) if args.out_dir else None
    for row in commands.cmd_recommend(Path(args.checkpoint), Path(args.ratings), args.k, out_dir):
        print(f"{row.rank},{row.item_id},{row.score!r}")


def _run_ablate(args: argparse.Namespace) -> None:
    rows = commands.cmd_ablate(_load_config(args))
    print(ablation.format_ablation_table(ablation.median_summary(rows)))


HANDLERS: Dict[str, Callable[[argparse.Namespace], None]] = {
    "ingest": _run_ingest,
    "train": _run_train,
    "evaluate": _run_evaluate,
    "recommend": _run_recommend,
    "ablate": _run_ablate,
}


def configure_logging() -> None:
    level = os.environ.get("LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    try:
        HANDLERS[args.command](args)
    except ColdGanError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return int(exc.exit_code)
    return int(ExitCode.OK)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
