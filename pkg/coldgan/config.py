"""YAML run configuration: loading, overrides, serialisation and hashing."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, MutableMapping, Optional, Tuple, Type, TypeVar

import yaml

from coldgan.data.parsers import PARSERS
from coldgan.errors import ConfigError
from coldgan.gan.model import ArchitectureConfig, TrainConfig
from coldgan.rejuvenate import RejuvenationConfig
from coldgan.utils.fileio import read_yaml_file, write_text_atomic
from coldgan.utils.hashing import sha256_hex, stable_json

SEED_ENV = "COLDGAN_SEED"
DEFAULT_CONFIG = "configs/default.yaml"

T = TypeVar("T")


@dataclass(frozen=True)
class DatasetConfig:
    path: str = ""
    format: str = "movielens"
    min_user_interactions: int = 15
    min_item_raters: int = 3

    def __post_init__(self) -> None:
        if self.format not in PARSERS:
            raise ConfigError(f"dataset.format must be one of {sorted(PARSERS)}, got {self.format!r}")
        if self.min_user_interactions < 1 or self.min_item_raters < 1:
            raise ConfigError("dataset filter thresholds must be >= 1")


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"split.train_fraction must lie in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class EvaluationConfig:
    ks: Tuple[int, ...] = (5, 10)
    cold_keep: int = 10
    per_user: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "ks", tuple(self.ks))
        if not self.ks or any(not isinstance(k, int) or k < 1 for k in self.ks):
            raise ConfigError(f"evaluation.ks must be a non-empty list of positive integers, got {list(self.ks)}")
        if self.cold_keep < 1:
            raise ConfigError("evaluation.cold_keep must be >= 1")


@dataclass(frozen=True)
class AblationConfig:
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)

    def __post_init__(self) -> None:
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if not self.seeds or any(not isinstance(seed, int) for seed in self.seeds):
            raise ConfigError("ablation.seeds must be a non-empty list of integers")


@dataclass(frozen=True)
class RunConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    rejuvenation: RejuvenationConfig = field(default_factory=RejuvenationConfig)
    model: ArchitectureConfig = field(default_factory=ArchitectureConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    seed: int = 0
    output_dir: str = "runs"

    @property
    def dataset_path(self) -> Path:
        return Path(self.dataset.path)

    @property
    def out_dir(self) -> Path:
        return Path(self.output_dir)

    def with_seed(self, seed: int) -> "RunConfig":
        """Same run with another root seed, also threaded into the training block."""

        return dataclasses.replace(self, seed=seed, training=dataclasses.replace(self.training, seed=seed))

    def to_dict(self) -> Dict[str, Any]:
        training = self.training.to_dict()
        training.pop("seed")
        return {
            "dataset": dataclasses.asdict(self.dataset),
            "split": dataclasses.asdict(self.split),
            "rejuvenation": self.rejuvenation.to_dict(),
            "model": self.model.to_dict(),
            "training": training,
            "evaluation": {
                "ks": list(self.evaluation.ks),
                "cold_keep": self.evaluation.cold_keep,
                "per_user": self.evaluation.per_user,
            },
            "ablation": {"seeds": list(self.ablation.seeds)},
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> "RunConfig":
        data = dict(data or {})
        _reject_unknown(data, {f.name for f in dataclasses.fields(cls)}, "top level")
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        training = dict(data.get("training") or {})
        if "seed" in training:
            raise ConfigError("training.seed is derived from the top-level seed; set 'seed' instead")
        training["seed"] = seed
        return cls(
            dataset=_block(DatasetConfig, data.get("dataset"), "dataset"),
            split=_block(SplitConfig, data.get("split"), "split"),
            rejuvenation=_block(RejuvenationConfig, data.get("rejuvenation"), "rejuvenation"),
            model=_block(ArchitectureConfig, data.get("model"), "model"),
            training=_block(TrainConfig, training, "training"),
            evaluation=_block(EvaluationConfig, data.get("evaluation"), "evaluation"),
            ablation=_block(AblationConfig, data.get("ablation"), "ablation"),
            seed=seed,
            output_dir=str(data.get("output_dir", "runs")),
        )


def _reject_unknown(data: Mapping[str, Any], known: Iterable[str], where: str) -> None:
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _check_type(block: str, name: str, default: Any, value: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{block}.{name} must be true or false, got {value!r}")
    elif isinstance(default, int) and not isinstance(default, bool):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{block}.{name} must be an integer, got {value!r}")
    elif isinstance(default, float):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{block}.{name} must be a number, got {value!r}")
        return float(value)
    elif isinstance(default, tuple) and not isinstance(value, (list, tuple)):
        raise ConfigError(f"{block}.{name} must be a list, got {value!r}")
    return value


def _block(cls: Type[T], data: Mapping[str, Any] | None, name: str) -> T:
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"{name} must be a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    _reject_unknown(data, fields, name)
    defaults = cls()
    values = {key: _check_type(name, key, getattr(defaults, key), value) for key, value in data.items()}
    return cls(**values)


def parse_override(expression: str) -> Tuple[Tuple[str, ...], Any]:
    """Split ``block.key=value``; the value is read as a YAML scalar."""

    key, sep, raw = expression.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override {expression!r} is not of the form key=value")
    try:
        value = yaml.safe_load(raw) if raw.strip() else ""
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {expression!r} has an unreadable value: {exc}") from exc
    return tuple(part.strip() for part in key.split(".")), value


def apply_overrides(data: MutableMapping[str, Any], overrides: Iterable[str]) -> MutableMapping[str, Any]:
    for expression in overrides:
        path, value = parse_override(expression)
        target = data
        for part in path[:-1]:
            nested = target.setdefault(part, {})
            if not isinstance(nested, MutableMapping):
                raise ConfigError(f"cannot override {'.'.join(path)}: {part} is not a block")
            target = nested
        target[path[-1]] = value
    return data


def _resolve_dataset_path(data: MutableMapping[str, Any], base_dir: Path) -> None:
    dataset = data.get("dataset")
    if not isinstance(dataset, MutableMapping) or not dataset.get("path"):
        raise ConfigError("dataset.path is required")
    path = Path(str(dataset["path"])).expanduser()
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"dataset.path does not exist: {path}")
    dataset["path"] = str(path.resolve())


def load_run_config(
    path: Path | None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Load ``path`` and apply overrides; seed precedence is flag, then ``COLDGAN_SEED``, then file.

    A relative ``dataset.path`` is resolved against the config file's directory.
    """

    environ = os.environ if environ is None else environ
    data: Any = {}
    base_dir = Path.cwd()
    if path is not None:
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        data = read_yaml_file(path) or {}
        base_dir = path.parent
    if not isinstance(data, MutableMapping):
        raise ConfigError(f"config {path} must be a mapping at the top level")

    apply_overrides(data, overrides)
    env_seed = environ.get(SEED_ENV)
    if seed is not None:
        data["seed"] = seed
    elif env_seed:
        try:
            data["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from exc
    if out_dir is not None:
        data["output_dir"] = out_dir
    _resolve_dataset_path(data, base_dir)
    return RunConfig.from_dict(data)


def dump_run_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=True, default_flow_style=False)


def write_run_config(config: RunConfig, path: Path) -> None:
    write_text_atomic(path, dump_run_config(config))


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON form; ``output_dir`` only places artifacts and is left out."""

    data = config.to_dict()
    data.pop("output_dir")
    return sha256_hex(stable_json(data))
