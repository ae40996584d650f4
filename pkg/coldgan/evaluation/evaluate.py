"""Cold-start evaluation of a model or a yardstick scorer over the test cohort."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Sequence, Tuple

from coldgan.data.log import InteractionLog
from coldgan.data.split import DatasetSplit
from coldgan.data.vectors import RatingVector, build_rating_vector, cold_input, held_out_relevant
from coldgan.errors import DomainError, EvaluationError
from coldgan.gan.model import GanModel
from coldgan.utils.fileio import write_text_atomic

from .metrics import ndcg_at_k, precision_at_k, recall_at_k
from .recommend import GeneratorScorer, Scorer, recommend_with

logger = logging.getLogger(__name__)

DEFAULT_KS: Tuple[int, ...] = (5, 10)
PER_USER_HEADER = ("user", "k", "p", "r", "ndcg")


@dataclass(frozen=True)
class ColdCase:
    """One user's cold input and the relevant items held out from it."""

    user: int
    cold: RatingVector
    relevant: FrozenSet[int]


@dataclass(frozen=True)
class UserMetrics:
    user: int
    k: int
    precision: float
    recall: float
    ndcg: float


@dataclass(frozen=True)
class MetricsReport:
    ks: Tuple[int, ...]
    precision: Dict[int, float]
    recall: Dict[int, float]
    ndcg: Dict[int, float]
    evaluated: int
    excluded: int
    seed: int
    config_hash: str
    scorer: str
    per_user: Tuple[UserMetrics, ...] = field(default=(), repr=False)

    def to_dict(self) -> Dict[str, object]:
        return {
            "scorer": self.scorer,
            "ks": list(self.ks),
            "precision": {str(k): self.precision[k] for k in self.ks},
            "recall": {str(k): self.recall[k] for k in self.ks},
            "ndcg": {str(k): self.ndcg[k] for k in self.ks},
            "evaluated": self.evaluated,
            "excluded": self.excluded,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }


def cold_cases(
    log: InteractionLog,
    users: Sequence[int],
    cold_keep: int = 10,
) -> Tuple[List[ColdCase], int]:
    """Build the cold case of every user; users with nothing relevant left are counted as excluded."""

    cases: List[ColdCase] = []
    excluded = 0
    for user in users:
        warm = build_rating_vector(log, user)
        if warm.count == 0:
            excluded += 1
            continue
        cold = cold_input(warm, cold_keep)
        relevant = held_out_relevant(warm, cold)
        if not relevant:
            excluded += 1
            continue
        cases.append(ColdCase(user=user, cold=cold, relevant=relevant))
    return cases, excluded


def _ranked(scorer: Scorer, case: ColdCase, depth: int) -> Tuple[int, ...]:
    # A non-empty held-out set guarantees at least one unrated item.
    pool = case.cold.num_items - case.cold.count
    return recommend_with(scorer, case.cold, min(depth, pool), case.user).items


def mean_precision(scorer: Scorer, cases: Sequence[ColdCase], k: int = 5) -> float:
    """Mean P@k over prepared cold cases (used for validation during training)."""

    if not cases:
        raise EvaluationError("no cold cases to score", excluded=0)
    total = 0.0
    for case in cases:
        total += precision_at_k(_ranked(scorer, case, k), case.relevant, k)
    return total / len(cases)


def _as_scorer(model_or_scorer: GanModel | Scorer) -> Scorer:
    if isinstance(model_or_scorer, GanModel):
        return GeneratorScorer(model_or_scorer.generator, model_or_scorer.rating_scale)
    return model_or_scorer


def evaluate(
    model_or_scorer: GanModel | Scorer,
    log: InteractionLog,
    split: DatasetSplit,
    ks: Sequence[int] = DEFAULT_KS,
    cold_keep: int = 10,
    seed: int = 0,
    config_hash: str = "",
    keep_per_user: bool = False,
) -> MetricsReport:
    """P@k, R@k and nDCG@k over the test cohort, averaged over evaluated users."""

    ks = tuple(sorted(set(int(k) for k in ks)))
    if not ks or ks[0] < 1:
        raise DomainError(f"ks must be positive integers, got {ks}")
    scorer = _as_scorer(model_or_scorer)
    cases, excluded = cold_cases(log, split.test_users, cold_keep)
    if not cases:
        raise EvaluationError(
            f"no test user has a held-out relevant item ({excluded} excluded)", excluded=excluded
        )

    sums = {name: {k: 0.0 for k in ks} for name in ("precision", "recall", "ndcg")}
    rows: List[UserMetrics] = []
    for case in cases:
        items = _ranked(scorer, case, ks[-1])
        for k in ks:
            row = UserMetrics(
                user=case.user,
                k=k,
                precision=precision_at_k(items, case.relevant, k),
                recall=recall_at_k(items, case.relevant, k),
                ndcg=ndcg_at_k(items, case.relevant, k),
            )
            sums["precision"][k] += row.precision
            sums["recall"][k] += row.recall
            sums["ndcg"][k] += row.ndcg
            if keep_per_user:
                rows.append(row)

    evaluated = len(cases)
    logger.info("evaluated %d test users with %s (%d excluded)", evaluated, scorer.name, excluded)
    return MetricsReport(
        ks=ks,
        precision={k: sums["precision"][k] / evaluated for k in ks},
        recall={k: sums["recall"][k] / evaluated for k in ks},
        ndcg={k: sums["ndcg"][k] / evaluated for k in ks},
        evaluated=evaluated,
        excluded=excluded,
        seed=seed,
        config_hash=config_hash,
        scorer=scorer.name,
        per_user=tuple(rows),
    )


def format_metrics_table(report: MetricsReport) -> str:
    lines = [f"Metrics ({report.scorer})", "=" * 40]
    header = f"{'k':<4} | {'P@k':>8} | {'R@k':>8} | {'nDCG@k':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for k in report.ks:
        lines.append(
            f"{k:<4} | {report.precision[k]:>8.4f} | {report.recall[k]:>8.4f} | {report.ndcg[k]:>8.4f}"
        )
    lines.append("")
    lines.append(f"Evaluated users: {report.evaluated}, excluded: {report.excluded}")
    return "\n".join(lines)


def write_per_user_csv(report: MetricsReport, path: Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PER_USER_HEADER)
    for row in report.per_user:
        writer.writerow([row.user, row.k, repr(row.precision), repr(row.recall), repr(row.ndcg)])
    write_text_atomic(path, buffer.getvalue())
