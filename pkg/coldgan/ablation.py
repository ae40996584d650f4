"""Drop-out mechanism x relevant-item-loss ablation grid."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from coldgan.config import RunConfig, config_hash
from coldgan.data.log import InteractionLog
from coldgan.data.split import split_users
from coldgan.evaluation.evaluate import MetricsReport, evaluate
from coldgan.gan.trainer import train
from coldgan.rejuvenate import RejuvenationMode
from coldgan.utils.fileio import write_json_atomic, write_text_atomic
from coldgan.utils.hashing import sha256_hex, stable_json

logger = logging.getLogger(__name__)

RELEVANT_WEIGHTS: Tuple[float, ...] = (1.0, 0.0)
MODES: Tuple[RejuvenationMode, ...] = (RejuvenationMode.TIME_BASED, RejuvenationMode.RANDOM_UNIFORM)


@dataclass(frozen=True)
class Variant:
    mode: RejuvenationMode
    relevant_loss_weight: float

    @property
    def name(self) -> str:
        loss = "with_relevant" if self.relevant_loss_weight > 0 else "without_relevant"
        return f"{self.mode.value}/{loss}"

    def apply(self, config: RunConfig) -> RunConfig:
        return dataclasses.replace(
            config,
            rejuvenation=dataclasses.replace(config.rejuvenation, mode=self.mode),
            training=dataclasses.replace(config.training, relevant_loss_weight=self.relevant_loss_weight),
        )


def grid() -> List[Variant]:
    return [Variant(mode, weight) for mode in MODES for weight in RELEVANT_WEIGHTS]


@dataclass(frozen=True)
class AblationRow:
    seed: int
    variant: Variant
    config_hash: str
    split_hash: str
    report: MetricsReport

    def to_dict(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "variant": self.variant.name,
            "rejuvenation": self.variant.mode.value,
            "relevant_loss_weight": self.variant.relevant_loss_weight,
            "config_hash": self.config_hash,
            "split_hash": self.split_hash,
            "metrics": self.report.to_dict(),
        }


def run_grid(log: InteractionLog, config: RunConfig) -> List[AblationRow]:
    """Train and evaluate all four variants for every seed; variants of one seed share its split."""

    rows: List[AblationRow] = []
    for seed in config.ablation.seeds:
        seeded = config.with_seed(seed)
        split = split_users(log, seeded.split.train_fraction, seed)
        split_hash = sha256_hex(stable_json(split.to_dict()))
        for variant in grid():
            run = variant.apply(seeded)
            digest = config_hash(run)
            model = train(log, split, run.rejuvenation, run.training, run.model)
            report = evaluate(
                model,
                log,
                split,
                ks=run.evaluation.ks,
                cold_keep=run.evaluation.cold_keep,
                seed=seed,
                config_hash=digest,
            )
            logger.info("seed %d %s: P@%d=%.4f", seed, variant.name, report.ks[0], report.precision[report.ks[0]])
            rows.append(AblationRow(seed=seed, variant=variant, config_hash=digest, split_hash=split_hash, report=report))
    return rows


def median_summary(rows: Sequence[AblationRow]) -> Dict[str, Dict[str, float]]:
    """Per variant, the median over seeds of every ``p@k``, ``r@k`` and ``ndcg@k``."""

    summary: Dict[str, Dict[str, float]] = {}
    for variant in grid():
        selected = [row.report for row in rows if row.variant == variant]
        if not selected:
            continue
        ks = selected[0].ks
        medians: Dict[str, float] = {}
        for k in ks:
            medians[f"p@{k}"] = statistics.median(report.precision[k] for report in selected)
            medians[f"r@{k}"] = statistics.median(report.recall[k] for report in selected)
            medians[f"ndcg@{k}"] = statistics.median(report.ndcg[k] for report in selected)
        summary[variant.name] = medians
    return summary


def _metric_columns(ks: Sequence[int]) -> List[str]:
    return [f"{name}@{k}" for k in ks for name in ("p", "r", "ndcg")]


def format_ablation_csv(rows: Sequence[AblationRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    ks = rows[0].report.ks if rows else ()
    writer.writerow(["seed", "variant", "rejuvenation", "relevant_loss_weight", *_metric_columns(ks)])
    for row in rows:
        metrics: List[str] = []
        for k in ks:
            metrics += [repr(row.report.precision[k]), repr(row.report.recall[k]), repr(row.report.ndcg[k])]
        writer.writerow([row.seed, row.variant.name, row.variant.mode.value, row.variant.relevant_loss_weight, *metrics])
    return buffer.getvalue()


def format_ablation_table(summary: Dict[str, Dict[str, float]]) -> str:
    lines = ["Ablation (median over seeds)", "=" * 40]
    columns = list(next(iter(summary.values()), {}))
    header = f"{'variant':<32} | " + " | ".join(f"{column:>8}" for column in columns)
    lines.append(header)
    lines.append("-" * len(header))
    for name, medians in summary.items():
        lines.append(f"{name:<32} | " + " | ".join(f"{medians[column]:>8.4f}" for column in columns))
    return "\n".join(lines)


def write_ablation(rows: Sequence[AblationRow], reports_dir: Path) -> Tuple[Path, Path]:
    json_path = reports_dir / "ablation.json"
    csv_path = reports_dir / "ablation.csv"
    write_json_atomic(json_path, {"rows": [row.to_dict() for row in rows], "median": median_summary(rows)})
    write_text_atomic(csv_path, format_ablation_csv(rows))
    return json_path, csv_path
