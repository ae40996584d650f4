"""Discriminator and generator objectives with analytic gradients.

d_loss  = mean_b[ -log D(w_b) - log(1 - D(w_hat_b)) ]
g_loss  = -mean_b D(G(c_b)) + lambda * mean_b bce(sigmoid(G(c_b)), w_rel_b)

The relevant-item term is a batch mean so the loss scale does not depend on
the batch size. Both losses clamp probabilities to [EPSILON, 1 - EPSILON]
before any log.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from coldgan.data.vectors import RelevanceVector
from coldgan.errors import ShapeError
from coldgan.nn.activations import sigmoid
from coldgan.nn.layers import backward, forward
from coldgan.nn.losses import bce, bce_grad

from .model import Discriminator, Generator, GeneratorObjective


def _as_batch(x: np.ndarray, name: str) -> np.ndarray:
    batch = np.asarray(x, dtype=np.float64)
    if batch.ndim == 1:
        batch = batch[np.newaxis, :]
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ShapeError(f"{name} must be a non-empty batch of vectors")
    return batch


def _bits(relevance: RelevanceVector | np.ndarray) -> np.ndarray:
    bits = relevance.bits if isinstance(relevance, RelevanceVector) else relevance
    return np.asarray(bits, dtype=np.float64)


def d_loss_and_grad(
    discriminator: Discriminator,
    real_batch: np.ndarray,
    fake_batch: np.ndarray,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Discriminator loss and its gradient; the fake batch is a constant."""

    real = _as_batch(real_batch, "real batch")
    fake = _as_batch(fake_batch, "fake batch")
    if real.shape != fake.shape:
        raise ShapeError(f"real batch {real.shape} and fake batch {fake.shape} differ")

    ones = np.ones((real.shape[0], 1))
    zeros = np.zeros((fake.shape[0], 1))
    p_real, real_cache = forward(discriminator.net, real)
    p_fake, fake_cache = forward(discriminator.net, fake)
    loss = bce(p_real, ones) + bce(p_fake, zeros)

    real_grads, _ = backward(discriminator.net, real_cache, bce_grad(p_real, ones))
    fake_grads, _ = backward(discriminator.net, fake_cache, bce_grad(p_fake, zeros))
    return loss, {name: real_grads[name] + fake_grads[name] for name in real_grads}


def d_loss(discriminator: Discriminator, real_batch: np.ndarray, fake_batch: np.ndarray) -> float:
    loss, _ = d_loss_and_grad(discriminator, real_batch, fake_batch)
    return loss


def relevant_loss(w_hat: np.ndarray, w_rel: RelevanceVector | np.ndarray) -> float:
    """BCE between sigmoid(w_hat) and the rated-and-relevant indicator."""

    w_hat = np.asarray(w_hat, dtype=np.float64)
    bits = _bits(w_rel)
    if w_hat.shape != bits.shape:
        raise ShapeError(f"generated vector {w_hat.shape} and relevance vector {bits.shape} differ")
    return bce(sigmoid(w_hat), bits)


def relevant_loss_grad(w_hat: np.ndarray, w_rel: RelevanceVector | np.ndarray) -> np.ndarray:
    w_hat = np.asarray(w_hat, dtype=np.float64)
    bits = _bits(w_rel)
    if w_hat.shape != bits.shape:
        raise ShapeError(f"generated vector {w_hat.shape} and relevance vector {bits.shape} differ")
    probability = sigmoid(w_hat)
    return bce_grad(probability, bits) * probability * (1.0 - probability)


def g_loss_and_grad(
    discriminator: Discriminator,
    generator: Generator,
    cold_batch: np.ndarray,
    relevance_batch: np.ndarray,
    relevant_weight: float = 1.0,
    objective: GeneratorObjective = GeneratorObjective.VALUE,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Generator loss and its gradient with respect to G only (D is frozen)."""

    cold = _as_batch(cold_batch, "cold batch")
    relevance = _as_batch(_bits(relevance_batch), "relevance batch")
    if cold.shape != relevance.shape:
        raise ShapeError(f"cold batch {cold.shape} and relevance batch {relevance.shape} differ")

    w_hat, g_cache = forward(generator.net, cold)
    p_fake, d_cache = forward(discriminator.net, w_hat)
    batch_size = cold.shape[0]
    if GeneratorObjective(objective) is GeneratorObjective.LOG:
        ones = np.ones_like(p_fake)
        adversarial = bce(p_fake, ones)
        adversarial_grad = bce_grad(p_fake, ones)
    else:
        adversarial = -float(np.mean(p_fake))
        adversarial_grad = np.full_like(p_fake, -1.0 / batch_size)

    _, w_hat_grad = backward(discriminator.net, d_cache, adversarial_grad)
    loss = adversarial + relevant_weight * relevant_loss(w_hat, relevance)
    w_hat_grad = w_hat_grad + relevant_weight * relevant_loss_grad(w_hat, relevance)
    grads, _ = backward(generator.net, g_cache, w_hat_grad)
    return loss, grads


def g_loss(
    discriminator: Discriminator,
    generator: Generator,
    cold_batch: np.ndarray,
    relevance_batch: np.ndarray,
    relevant_weight: float = 1.0,
    objective: GeneratorObjective = GeneratorObjective.VALUE,
) -> float:
    loss, _ = g_loss_and_grad(discriminator, generator, cold_batch, relevance_batch, relevant_weight, objective)
    return loss
