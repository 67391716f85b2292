"""Experiment configuration and run manifests."""
from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple

from config import (
    ARTIFACT_VERSION,
    AXIS_MATCH_TOL,
    CLASSIFY_TOL,
    CLUSTER_TOL,
    CONJ_DEPTH_CAP,
    DEFAULT_GRID,
    DEFAULT_WORKERS,
    ENDPOINT_TOL,
    OUTPUT_DIR,
    POINT_KEY_TOL,
    WORD_DEPTH_CAP,
)
from tools.export import config_digest, file_digest, load_json, write_json
from tools.grp import INDEX_TWO_WORDS, PRESETS, Representation, UnknownPreset, check_depth, parse_preset, preset
from tools.twist import make_grid

logger = logging.getLogger(__name__)

COMPARISON_KINDS = ("self", "conjugate", "subgroup", "preset", "isometry")

# Fields that never change output content and stay out of the digest.
_RUN_ONLY_FIELDS = ("output_dir", "workers", "use_cache")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "modular_torus"
    params: Tuple[float, ...] = ()
    companion: Optional[str] = None
    depth: int = 3
    conj_depth: Optional[int] = None
    reduce_depth: int = 1
    tol: float = CLUSTER_TOL
    axis_tol: float = AXIS_MATCH_TOL
    grid: Tuple[float, float, float] = DEFAULT_GRID
    curve: str = "a"
    pairs: Tuple[Tuple[str, str, str], ...] = (("a", "b", ""),)
    separation: Optional[Tuple[str, str]] = None
    differences: Tuple[Tuple[Tuple[str, str, str], Tuple[str, str, str]], ...] = ()
    comparisons: Tuple[Tuple[str, str], ...] = (("self", ""),)
    depth1: int = 2
    depth2: Optional[int] = None
    output_dir: str = OUTPUT_DIR
    workers: int = DEFAULT_WORKERS
    seed: int = 0
    unsafe_depth: bool = False
    use_cache: bool = True

    @property
    def effective_conj_depth(self) -> int:
        return self.depth if self.conj_depth is None else self.conj_depth

    @property
    def effective_depth2(self) -> int:
        return 3 * self.depth1 if self.depth2 is None else self.depth2

    def validate(self) -> "ExperimentConfig":
        for name in ("depth", "depth1", "reduce_depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.conj_depth is not None and self.conj_depth < 1:
            raise ConfigError(f"conj_depth must be at least 1, got {self.conj_depth}")
        if self.effective_depth2 < self.depth1:
            raise ConfigError("depth2 must be at least depth1")
        if self.tol <= 0.0 or self.axis_tol <= 0.0:
            raise ConfigError("tolerances must be positive")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        try:
            if not make_grid(*self.grid):
                raise ConfigError("t-grid is empty")
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad t-grid {self.grid!r}: {exc}") from exc
        for spec in (self.preset, self.companion):
            if spec is not None and parse_preset(spec)[0] not in PRESETS:
                raise UnknownPreset(f"unknown preset {spec!r}; choose from {', '.join(sorted(PRESETS))}")
        for kind, _ in self.comparisons:
            if kind not in COMPARISON_KINDS:
                raise ConfigError(f"unknown comparison kind {kind!r}; choose from {', '.join(COMPARISON_KINDS)}")
        check_depth(self.depth, WORD_DEPTH_CAP, unsafe=self.unsafe_depth)
        check_depth(self.effective_conj_depth, CONJ_DEPTH_CAP, "conjugator depth", self.unsafe_depth)
        check_depth(self.effective_depth2, WORD_DEPTH_CAP, "depth2", self.unsafe_depth)
        return self

    def rep(self) -> Representation:
        return preset(self.preset, *self.params)

    def companion_rep(self) -> Optional[Representation]:
        return preset(self.companion) if self.companion else None

    def t_grid(self) -> List[float]:
        return make_grid(*self.grid)

    def subgroup_words(self, argument: str) -> Tuple[str, ...]:
        words = tuple(w.strip() for w in argument.split(",") if w.strip())
        return words or INDEX_TWO_WORDS

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        payload = {k: v for k, v in self.to_dict().items() if k not in _RUN_ONLY_FIELDS}
        return config_digest(payload)

    def tolerances(self) -> Dict[str, float]:
        return {
            "cluster": self.tol,
            "axis_match": self.axis_tol,
            "classify": CLASSIFY_TOL,
            "endpoint": ENDPOINT_TOL,
            "point_key": POINT_KEY_TOL,
        }

    def meta(self) -> Dict[str, Any]:
        """Block embedded in every JSON output."""
        return {
            "config_digest": self.digest(),
            "tolerances": self.tolerances(),
            "seed": self.seed,
            "artifact_version": ARTIFACT_VERSION,
        }


def _tuples(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_tuples(v) for v in value)
    return value


def _pair3(value: Any) -> Tuple[str, str, str]:
    items = tuple(value)
    if len(items) == 2:
        items = items + ("",)
    if len(items) != 3 or not all(isinstance(x, str) for x in items):
        raise ConfigError(f"a pair is [word, word] or [word, word, conjugator], got {value!r}")
    return items


def _coerce(raw: Mapping[str, Any]) -> Dict[str, Any]:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values = {k: _tuples(v) for k, v in raw.items()}
    if "pairs" in values:
        values["pairs"] = tuple(_pair3(p) for p in values["pairs"])
    if "differences" in values:
        values["differences"] = tuple((_pair3(p), _pair3(q)) for p, q in values["differences"])
    if "comparisons" in values:
        values["comparisons"] = tuple((c[0], c[1] if len(c) > 1 else "") for c in values["comparisons"])
    if values.get("separation") is not None and len(values["separation"]) != 2:
        raise ConfigError("separation is a pair of words")
    if "grid" in values:
        if len(values["grid"]) != 3:
            raise ConfigError("grid is [min, max, step]")
        values["grid"] = tuple(float(x) for x in values["grid"])
    if "params" in values:
        values["params"] = tuple(float(x) for x in values["params"])
    return values


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Config from a JSON document, with non-None overrides applied on top."""
    raw: Dict[str, Any] = {}
    if path:
        try:
            raw = dict(load_json(path))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file {path} not found") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        config = ExperimentConfig(**_coerce(raw))
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()


@dataclass
class RunManifest:
    """Config echo, per-phase timings and output digests of one command run."""

    command: str
    config: Dict[str, Any]
    config_digest: str
    artifact_version: str = ARTIFACT_VERSION
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    timings: Dict[str, float] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    wall_clock: Optional[float] = None
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    @classmethod
    def start(cls, command: str, config: ExperimentConfig) -> "RunManifest":
        return cls(command, config.to_dict(), config.digest())

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0
            logger.info("%s: phase %s took %.3fs", self.command, name, self.timings[name])

    def record(self, path: Path) -> Path:
        self.outputs[Path(path).name] = file_digest(path)
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "config_digest": self.config_digest,
            "artifact_version": self.artifact_version,
            "started_at": self.started_at,
            "timings": self.timings,
            "outputs": self.outputs,
            "summary": self.summary,
            "wall_clock": self.wall_clock,
        }

    def write(self, directory: Path) -> Path:
        self.wall_clock = time.perf_counter() - self._t0
        return write_json(Path(directory) / f"{self.command}_manifest.json", self.to_dict())


def verify_manifest(path: Path) -> List[str]:
    """Names of recorded outputs whose digest no longer matches."""
    data = load_json(path)
    directory = Path(path).parent
    bad = []
    for name, digest in sorted(data.get("outputs", {}).items()):
        target = directory / name
        if not target.exists() or file_digest(target) != digest:
            bad.append(name)
    return bad


__all__ = [
    "COMPARISON_KINDS",
    "ConfigError",
    "ExperimentConfig",
    "RunManifest",
    "load_config",
    "verify_manifest",
]
