"""Alternating adversarial training with early stopping on validation P@5."""

from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from coldgan.data.log import InteractionLog
from coldgan.data.split import DatasetSplit
from coldgan.data.vectors import RatingVector, build_rating_vector, relevance_vector
from coldgan.errors import EmptyDatasetError, NonFiniteLossError, NumericError
from coldgan.evaluation.evaluate import ColdCase, cold_cases, mean_precision
from coldgan.evaluation.recommend import GeneratorScorer
from coldgan.nn.optim import adam_step
from coldgan.rejuvenate import RejuvenationConfig, apply_rejuvenation
from coldgan.utils.fileio import write_text_atomic
from coldgan.utils.seeding import substream

from .losses import d_loss_and_grad, g_loss_and_grad
from .model import ArchitectureConfig, EpochRecord, GanModel, TrainConfig, generate, normalize_ratings

logger = logging.getLogger(__name__)

HISTORY_HEADER = ("epoch", "d_loss", "g_loss", "val_p_at_5")
VALIDATION_K = 5
_FLOOR_GUARD = 1e-9


def train_step_d(model: GanModel, warm_batch: np.ndarray, cold_batch: np.ndarray) -> float:
    """One Adam step on the discriminator; the generator only produces constants."""

    fakes = generate(model.generator, cold_batch)
    loss, grads = d_loss_and_grad(model.discriminator, warm_batch, fakes)
    adam_step(model.discriminator.net.parameters(), grads, model.d_optimizer)
    return loss


def train_step_g(
    model: GanModel,
    cold_batch: np.ndarray,
    relevance_batch: np.ndarray,
    config: TrainConfig,
) -> float:
    """One Adam step on the generator against a frozen discriminator."""

    loss, grads = g_loss_and_grad(
        model.discriminator,
        model.generator,
        cold_batch,
        relevance_batch,
        relevant_weight=config.relevant_loss_weight,
        objective=config.generator_objective,
    )
    adam_step(model.generator.net.parameters(), grads, model.g_optimizer)
    return loss


def _carve_validation(train_users: Sequence[int], fraction: float, seed: int) -> tuple[List[int], List[int]]:
    """Split train users into (fit, validation); at least one user always stays in fit."""

    count = math.floor(fraction * len(train_users) + _FLOOR_GUARD)
    count = min(count, len(train_users) - 1)
    if count <= 0:
        return list(train_users), []
    order = substream(seed, "validation").permutation(len(train_users))
    held = sorted(train_users[i] for i in order[:count])
    fit = sorted(train_users[i] for i in order[count:])
    return fit, held


def _rejuvenated(
    warm: Sequence[RatingVector],
    cfg: RejuvenationConfig,
    rng: np.random.Generator,
    scale: float,
) -> np.ndarray:
    return np.stack([normalize_ratings(apply_rejuvenation(w, cfg, rng), scale) for w in warm])


def _validate(model: GanModel, cases: Sequence[ColdCase]) -> Optional[float]:
    if not cases:
        return None
    return mean_precision(GeneratorScorer(model.generator, model.rating_scale), cases, VALIDATION_K)


def train(
    log: InteractionLog,
    split: DatasetSplit,
    rejuvenation: RejuvenationConfig,
    config: TrainConfig,
    architecture: ArchitectureConfig = ArchitectureConfig(),
) -> GanModel:
    """Train on the split's train users and return the best-validation snapshot.

    Without a validation slice (or when no validation user has a held-out
    relevant item) there is no early stopping and the final model is returned.
    """

    if not split.train_users:
        raise EmptyDatasetError("training cohort is empty")

    model = GanModel.initialize(log.num_items, architecture, config, substream(config.seed, "init"))
    if config.epochs == 0:
        return model

    fit_users, validation_users = _carve_validation(split.train_users, config.validation_fraction, config.seed)
    validation_cases, _ = cold_cases(log, validation_users, config.validation_cold_keep)
    warm_vectors = [build_rating_vector(log, user) for user in fit_users]
    warm = np.stack([normalize_ratings(w, config.rating_scale) for w in warm_vectors])
    relevance = np.stack([relevance_vector(w).bits.astype(np.float64) for w in warm_vectors])
    logger.info(
        "training on %d users (%d validation, %d with held-out items), %d items",
        len(fit_users),
        len(validation_users),
        len(validation_cases),
        log.num_items,
    )

    rejuvenation_rng = substream(config.seed, "rejuvenation")
    shuffle_rng = substream(config.seed, "shuffle")
    frozen_cold = None if config.fresh_rejuvenation else _rejuvenated(
        warm_vectors, rejuvenation, rejuvenation_rng, config.rating_scale
    )

    best: Optional[GanModel] = None
    best_score = -math.inf
    stale = 0
    for epoch in range(1, config.epochs + 1):
        cold = frozen_cold
        if cold is None:
            cold = _rejuvenated(warm_vectors, rejuvenation, rejuvenation_rng, config.rating_scale)
        order = shuffle_rng.permutation(len(fit_users))

        d_losses: List[float] = []
        g_losses: List[float] = []
        for batch_index, start in enumerate(range(0, len(order), config.batch_size)):
            rows = order[start : start + config.batch_size]
            d_loss = g_loss = math.nan
            try:
                for _ in range(config.d_steps_per_g_step):
                    d_loss = train_step_d(model, warm[rows], cold[rows])
                    d_losses.append(d_loss)
                    if not math.isfinite(d_loss):
                        raise NonFiniteLossError(epoch, batch_index, {"d_loss": d_loss})
                g_loss = train_step_g(model, cold[rows], relevance[rows], config)
            except NonFiniteLossError:
                raise
            except NumericError as exc:
                raise NonFiniteLossError(epoch, batch_index, {"d_loss": d_loss, "g_loss": g_loss}) from exc
            if not math.isfinite(g_loss):
                raise NonFiniteLossError(epoch, batch_index, {"d_loss": d_loss, "g_loss": g_loss})
            g_losses.append(g_loss)
            logger.debug("epoch %d batch %d: d_loss=%.6f g_loss=%.6f", epoch, batch_index, d_loss, g_loss)

        val_p_at_5 = _validate(model, validation_cases)
        record = EpochRecord(
            epoch=epoch,
            d_loss=float(np.mean(d_losses)),
            g_loss=float(np.mean(g_losses)),
            val_p_at_5=val_p_at_5,
        )
        model.history.append(record)
        logger.info(
            "epoch %d: d_loss=%.6f g_loss=%.6f val_p@5=%s",
            epoch,
            record.d_loss,
            record.g_loss,
            "n/a" if val_p_at_5 is None else f"{val_p_at_5:.4f}",
        )

        if val_p_at_5 is None:
            continue
        if val_p_at_5 > best_score:
            best_score = val_p_at_5
            best = model.snapshot()
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                logger.info("early stop at epoch %d; best val_p@5=%.4f", epoch, best_score)
                break

    result = best if best is not None else model
    result.history = list(model.history)
    return result


def format_history_csv(history: Sequence[EpochRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(HISTORY_HEADER)
    for record in history:
        writer.writerow(
            [
                record.epoch,
                repr(record.d_loss),
                repr(record.g_loss),
                "" if record.val_p_at_5 is None else repr(record.val_p_at_5),
            ]
        )
    return buffer.getvalue()


def write_history_csv(history: Sequence[EpochRecord], path: Path) -> None:
    write_text_atomic(path, format_history_csv(history))
