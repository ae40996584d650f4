"""Subcommand implementations behind the CLI."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from coldgan import ablation
from coldgan.config import RunConfig, config_hash, write_run_config
from coldgan.data.log import InteractionLog, filter_sparse
from coldgan.data.parsers import load_log, parse_user_ratings, write_canonical_dump
from coldgan.data.split import DatasetSplit, split_users
from coldgan.data.stats import DatasetStats, dataset_fingerprint, dataset_stats
from coldgan.data.vectors import cold_input, rating_vector_from_rows
from coldgan.errors import ConfigError, DataError, EmptyDatasetError
from coldgan.evaluation.baselines import RandomScorer, popularity_baseline, untrained_scorer
from coldgan.evaluation.evaluate import MetricsReport, evaluate, format_metrics_table, write_per_user_csv
from coldgan.evaluation.recommend import GeneratorScorer, RecommendationList, Scorer, rank_items
from coldgan.gan.model import GanModel, load_model, save_model
from coldgan.gan.trainer import train, write_history_csv
from coldgan.manifest import ManifestRecorder
from coldgan.utils.fileio import read_text_file, write_json_atomic, write_text_atomic

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "model.cgan"
BASELINES = ("popularity", "random", "untrained")


def checkpoint_path(out_dir: Path) -> Path:
    return out_dir / "checkpoints" / CHECKPOINT_NAME


def load_dataset(config: RunConfig, recorder: ManifestRecorder) -> InteractionLog:
    """Parse and filter the configured dataset, recording its fingerprint."""

    with recorder.phase("load"):
        raw = load_log(config.dataset_path, config.dataset.format)
        log = filter_sparse(raw, config.dataset.min_user_interactions, config.dataset.min_item_raters)
    recorder.manifest.dataset = dataset_fingerprint(log)
    return log


def _start(recorder: ManifestRecorder, config: RunConfig) -> str:
    digest = config_hash(config)
    recorder.manifest.config_hash = digest
    recorder.manifest.seed = config.seed
    return digest


def cmd_ingest(config: RunConfig) -> DatasetStats:
    """Parse and filter the dataset, then write its canonical dump and statistics."""

    with ManifestRecorder(config.out_dir, "ingest") as recorder:
        _start(recorder, config)
        log = load_dataset(config, recorder)
        stats = dataset_stats(log)
        write_json_atomic(recorder.artifact(config.out_dir / "reports" / "ingest_stats.json"), stats.to_dict())
        if log.num_ratings == 0:
            raise EmptyDatasetError("no ratings left after parsing and filtering")
        with recorder.phase("write"):
            dump = recorder.artifact(config.out_dir / "dataset" / "ratings.tsv")
            write_canonical_dump(log, dump)
        logger.info("ingested %d users, %d items, %d ratings", stats.users, stats.items, stats.ratings)
        return stats


def cmd_train(config: RunConfig) -> GanModel:
    with ManifestRecorder(config.out_dir, "train") as recorder:
        digest = _start(recorder, config)
        log = load_dataset(config, recorder)
        with recorder.phase("split"):
            split = split_users(log, config.split.train_fraction, config.seed)
        with recorder.phase("train"):
            model = train(log, split, config.rejuvenation, config.training, config.model)
        with recorder.phase("write"):
            write_run_config(config, recorder.artifact(config.out_dir / "config.yaml"))
            write_json_atomic(recorder.artifact(config.out_dir / "reports" / "split.json"), split.to_dict())
            save_model(
                model,
                recorder.artifact(checkpoint_path(config.out_dir)),
                config_hash=digest,
                extra={
                    "item_ids": list(log.item_ids),
                    "cold_keep": config.evaluation.cold_keep,
                    "seed": config.seed,
                },
            )
            write_history_csv(model.history, recorder.artifact(config.out_dir / "history" / "history.csv"))
        return model


def _baseline_scorer(name: str, log: InteractionLog, split: DatasetSplit, config: RunConfig) -> Scorer:
    if name == "popularity":
        return popularity_baseline(log, split.train_users)
    if name == "random":
        return RandomScorer(config.seed)
    if name == "untrained":
        return untrained_scorer(log.num_items, config.model, config.training)
    raise ConfigError(f"unknown baseline {name!r}; expected one of {list(BASELINES)}")


def cmd_evaluate(
    config: RunConfig,
    checkpoint: Optional[Path] = None,
    baseline: Optional[str] = None,
) -> MetricsReport:
    """Score the test cohort with the trained checkpoint, or with a yardstick when ``baseline`` is set."""

    with ManifestRecorder(config.out_dir, "evaluate") as recorder:
        digest = _start(recorder, config)
        log = load_dataset(config, recorder)
        split = split_users(log, config.split.train_fraction, config.seed)
        if baseline is not None:
            scorer: GanModel | Scorer = _baseline_scorer(baseline, log, split, config)
            report_name = f"metrics_{baseline}"
        else:
            path = checkpoint or checkpoint_path(config.out_dir)
            model, stored = load_model(path)
            if model.num_items != log.num_items:
                raise DataError(f"checkpoint scores {model.num_items} items, dataset has {log.num_items}")
            if stored.config_hash and stored.config_hash != digest:
                logger.warning("checkpoint was trained under config %s, evaluating under %s", stored.config_hash, digest)
            scorer = model
            report_name = "metrics"
        with recorder.phase("evaluate"):
            report = evaluate(
                scorer,
                log,
                split,
                ks=config.evaluation.ks,
                cold_keep=config.evaluation.cold_keep,
                seed=config.seed,
                config_hash=digest,
                keep_per_user=config.evaluation.per_user,
            )
        reports = config.out_dir / "reports"
        write_json_atomic(recorder.artifact(reports / f"{report_name}.json"), report.to_dict())
        write_text_atomic(recorder.artifact(reports / f"{report_name}.txt"), format_metrics_table(report) + "\n")
        if config.evaluation.per_user:
            write_per_user_csv(report, recorder.artifact(reports / f"{report_name}_per_user.csv"))
        return report


@dataclass(frozen=True)
class Recommendation:
    rank: int
    item_id: str
    score: float


def cmd_recommend(checkpoint: Path, ratings_path: Path, k: int, out_dir: Optional[Path] = None) -> List[Recommendation]:
    """Top-``k`` items for one new user described by an ``item_id,rating,timestamp`` file."""

    with ManifestRecorder(out_dir or checkpoint.parent.parent, "recommend") as recorder:
        model, stored = load_model(checkpoint)
        recorder.manifest.config_hash = stored.config_hash
        recorder.manifest.seed = stored.metadata.get("seed")
        item_ids = stored.metadata.get("item_ids")
        if not item_ids or len(item_ids) != model.num_items:
            raise DataError(f"checkpoint {checkpoint} carries no item vocabulary matching its generator")
        if not ratings_path.exists():
            raise DataError(f"ratings file not found: {ratings_path}")

        rows = parse_user_ratings(read_text_file(ratings_path))
        vector, unknown = rating_vector_from_rows(rows, {item_id: index for index, item_id in enumerate(item_ids)})
        for item_id in unknown:
            logger.warning("ignoring unknown item id %r", item_id)
        # Scored from the earliest ratings only; every rated item stays out of the list.
        cold = cold_input(vector, int(stored.metadata.get("cold_keep", 10)))
        scores = GeneratorScorer(model.generator, model.rating_scale).score(cold)
        ranked: RecommendationList = rank_items(scores, vector, k)
        return [
            Recommendation(rank=rank, item_id=item_ids[item], score=score)
            for rank, (item, score) in enumerate(zip(ranked.items, ranked.scores), start=1)
        ]


def cmd_ablate(config: RunConfig) -> List[ablation.AblationRow]:
    with ManifestRecorder(config.out_dir, "ablate") as recorder:
        _start(recorder, config)
        log = load_dataset(config, recorder)
        with recorder.phase("grid"):
            rows = ablation.run_grid(log, config)
        json_path, csv_path = ablation.write_ablation(rows, config.out_dir / "reports")
        recorder.artifact(json_path)
        recorder.artifact(csv_path)
        return rows
