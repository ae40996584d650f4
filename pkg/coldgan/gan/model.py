"""Generator, discriminator, configuration blocks and the model bundle."""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from coldgan.data.log import RATING_SCALE
from coldgan.data.vectors import RatingVector
from coldgan.errors import ConfigError, DataError
from coldgan.nn.activations import Activation
from coldgan.nn.checkpoint import Checkpoint, read_checkpoint, write_checkpoint
from coldgan.nn.layers import DenseLayer, Mlp, forward
from coldgan.nn.optim import AdamState


class GeneratorObjective(str, Enum):
    """Adversarial term of the generator loss: ``-E[D(x)]`` or ``-E[log D(x)]``."""

    VALUE = "value"
    LOG = "log"


@dataclass(frozen=True)
class ArchitectureConfig:
    g_hidden: int = 256
    d_hidden: int = 128
    hidden_activation: Activation = Activation.RELU

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "hidden_activation", Activation(self.hidden_activation))
        except ValueError as exc:
            raise ConfigError(f"model.hidden_activation must be one of {[a.value for a in Activation]}") from exc
        if self.g_hidden < 1 or self.d_hidden < 1:
            raise ConfigError("model.g_hidden and model.d_hidden must be positive")

    def to_dict(self) -> Dict[str, Any]:
        return {"g_hidden": self.g_hidden, "d_hidden": self.d_hidden, "hidden_activation": self.hidden_activation.value}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 300
    batch_size: int = 64
    g_learning_rate: float = 1e-3
    d_learning_rate: float = 1e-3
    d_steps_per_g_step: int = 1
    relevant_loss_weight: float = 1.0
    rating_scale: float = RATING_SCALE[1]
    seed: int = 0
    patience: int = 10
    validation_fraction: float = 0.1
    validation_cold_keep: int = 10
    generator_objective: GeneratorObjective = GeneratorObjective.VALUE
    fresh_rejuvenation: bool = True

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "generator_objective", GeneratorObjective(self.generator_objective))
        except ValueError as exc:
            raise ConfigError("training.generator_objective must be 'value' or 'log'") from exc
        if self.epochs < 0:
            raise ConfigError("training.epochs must be >= 0")
        positive = {
            "batch_size": self.batch_size,
            "g_learning_rate": self.g_learning_rate,
            "d_learning_rate": self.d_learning_rate,
            "d_steps_per_g_step": self.d_steps_per_g_step,
            "rating_scale": self.rating_scale,
            "patience": self.patience,
            "validation_cold_keep": self.validation_cold_keep,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigError(f"training.{name} must be positive, got {value}")
        if self.relevant_loss_weight < 0:
            raise ConfigError("training.relevant_loss_weight must be >= 0")
        if not 0.0 <= self.validation_fraction <= 0.5:
            raise ConfigError("training.validation_fraction must lie in [0, 0.5]")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["generator_objective"] = self.generator_objective.value
        return data


@dataclass
class Generator:
    """Denoising autoencoder N -> hidden -> N with raw (identity) outputs."""

    net: Mlp

    @classmethod
    def build(cls, num_items: int, hidden: int, activation: Activation, rng: np.random.Generator) -> "Generator":
        return cls(Mlp.build([num_items, hidden, num_items], activation, Activation.IDENTITY, rng))

    @property
    def num_items(self) -> int:
        return self.net.in_dim


@dataclass
class Discriminator:
    """MLP N -> hidden -> 1 ending in a sigmoid: P(vector is a real warm state)."""

    net: Mlp

    @classmethod
    def build(cls, num_items: int, hidden: int, activation: Activation, rng: np.random.Generator) -> "Discriminator":
        return cls(Mlp.build([num_items, hidden, 1], activation, Activation.SIGMOID, rng))


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    d_loss: float
    g_loss: float
    val_p_at_5: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GanModel:
    generator: Generator
    discriminator: Discriminator
    g_optimizer: AdamState
    d_optimizer: AdamState
    rating_scale: float = RATING_SCALE[1]
    history: List[EpochRecord] = field(default_factory=list)

    @classmethod
    def initialize(
        cls,
        num_items: int,
        architecture: ArchitectureConfig,
        train_config: TrainConfig,
        rng: np.random.Generator,
    ) -> "GanModel":
        generator = Generator.build(num_items, architecture.g_hidden, architecture.hidden_activation, rng)
        discriminator = Discriminator.build(num_items, architecture.d_hidden, architecture.hidden_activation, rng)
        return cls(
            generator=generator,
            discriminator=discriminator,
            g_optimizer=AdamState.for_parameters(generator.net.parameters(), train_config.g_learning_rate),
            d_optimizer=AdamState.for_parameters(discriminator.net.parameters(), train_config.d_learning_rate),
            rating_scale=train_config.rating_scale,
        )

    @property
    def num_items(self) -> int:
        return self.generator.num_items

    def snapshot(self) -> "GanModel":
        return copy.deepcopy(self)


def normalize_ratings(v: RatingVector, scale: float = RATING_SCALE[1]) -> np.ndarray:
    """Map ratings r -> r / scale; unrated zeros stay zero."""

    return v.values / scale


def generate(generator: Generator, cold: np.ndarray) -> np.ndarray:
    """Raw warm-state scores for one normalised cold vector or a batch of them."""

    output, _ = forward(generator.net, cold)
    return output


# ----------------------------------------------------------------------
# Persistence
# ----------------------------------------------------------------------
def _network_tensors(prefix: str, net: Mlp, optimizer: AdamState) -> Dict[str, np.ndarray]:
    tensors: Dict[str, np.ndarray] = {}
    for name, value in net.parameters().items():
        tensors[f"{prefix}.{name}"] = value
    for name in net.parameters():
        tensors[f"{prefix}.adam.m.{name}"] = optimizer.first_moment[name]
        tensors[f"{prefix}.adam.v.{name}"] = optimizer.second_moment[name]
    return tensors


def _restore_network(
    prefix: str,
    tensors: Mapping[str, np.ndarray],
    activations: List[str],
    hyper: Mapping[str, Any],
) -> Tuple[Mlp, AdamState]:
    layers = []
    for index, activation in enumerate(activations):
        try:
            layers.append(
                DenseLayer(
                    weights=tensors[f"{prefix}.layer{index}.weight"].copy(),
                    bias=tensors[f"{prefix}.layer{index}.bias"].copy(),
                    activation=Activation(activation),
                )
            )
        except KeyError as exc:
            raise DataError(f"checkpoint lacks tensor {exc.args[0]}") from exc
    net = Mlp(layers)
    state = AdamState(
        learning_rate=float(hyper["learning_rate"]),
        beta1=float(hyper["beta1"]),
        beta2=float(hyper["beta2"]),
        epsilon=float(hyper["epsilon"]),
        step=int(hyper["step"]),
        first_moment={name: tensors[f"{prefix}.adam.m.{name}"].copy() for name in net.parameters()},
        second_moment={name: tensors[f"{prefix}.adam.v.{name}"].copy() for name in net.parameters()},
    )
    return net, state


def save_model(
    model: GanModel,
    path: Path,
    config_hash: str = "",
    extra: Mapping[str, Any] | None = None,
) -> None:
    """Write networks, Adam moments and history through the CGAN checkpoint format."""

    tensors = _network_tensors("generator", model.generator.net, model.g_optimizer)
    tensors.update(_network_tensors("discriminator", model.discriminator.net, model.d_optimizer))
    metadata: Dict[str, Any] = {
        "generator": model.generator.net.describe(),
        "discriminator": model.discriminator.net.describe(),
        "g_optimizer": model.g_optimizer.hyperparameters(),
        "d_optimizer": model.d_optimizer.hyperparameters(),
        "rating_scale": model.rating_scale,
        "history": [record.to_dict() for record in model.history],
    }
    metadata.update(extra or {})
    write_checkpoint(path, tensors, config_hash=config_hash, metadata=metadata)


def load_model(path: Path) -> Tuple[GanModel, Checkpoint]:
    checkpoint = read_checkpoint(path)
    meta = checkpoint.metadata
    try:
        g_net, g_state = _restore_network(
            "generator", checkpoint.tensors, meta["generator"]["activations"], meta["g_optimizer"]
        )
        d_net, d_state = _restore_network(
            "discriminator", checkpoint.tensors, meta["discriminator"]["activations"], meta["d_optimizer"]
        )
    except KeyError as exc:
        raise DataError(f"checkpoint metadata lacks {exc.args[0]!r}") from exc
    model = GanModel(
        generator=Generator(g_net),
        discriminator=Discriminator(d_net),
        g_optimizer=g_state,
        d_optimizer=d_state,
        rating_scale=float(meta.get("rating_scale", RATING_SCALE[1])),
        history=[EpochRecord(**record) for record in meta.get("history", [])],
    )
    return model, checkpoint
