"""Run manifests: what ran, on which data, with which config, and how long each phase took."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from types import TracebackType
from typing import Any, Dict, Iterator, List, Optional, Type

from coldgan import __version__
from coldgan.utils.fileio import write_json_atomic

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_FAILED = "failed"


@dataclass
class RunManifest:
    command: str
    version: str = __version__
    status: str = STATUS_OK
    failure_reason: Optional[str] = None
    config_hash: str = ""
    seed: Optional[int] = None
    dataset: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def manifest_file(out_dir: Path, command: str) -> Path:
    return out_dir / "manifest" / f"{command}.json"


class ManifestRecorder:
    """Context manager that writes ``<out_dir>/manifest/<command>.json`` however the run ends."""

    def __init__(self, out_dir: Path, command: str) -> None:
        self.path = manifest_file(out_dir, command)
        self.manifest = RunManifest(command=command)

    def __enter__(self) -> "ManifestRecorder":
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc: Optional[BaseException],
        traceback: Optional[TracebackType],
    ) -> None:
        if exc is not None:
            self.manifest.status = STATUS_FAILED
            self.manifest.failure_reason = f"{type(exc).__name__}: {exc}"
        try:
            write_json_atomic(self.path, self.manifest.to_dict())
        except OSError as write_error:
            logger.error("could not write manifest %s: %s", self.path, write_error)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.timings[name] = round(time.perf_counter() - start, 6)

    def artifact(self, path: Path) -> Path:
        self.manifest.artifacts.append(str(path))
        return path
