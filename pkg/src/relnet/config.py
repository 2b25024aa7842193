"""
Experiment configuration.

Sources, strongest first: command-line flags, the flat ``key=value`` config
file, ``RELNET_*`` environment variables, defaults. The manifest written by
``cv`` uses the config-file format, so ``relnet cv --config manifest.txt``
replays a run.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from relnet.errors import ConfigError
from relnet.network.params import CombinerMode
from relnet.training.trainer import TrainConfig
from relnet.walks.walk_generation import DEFAULT_MAX_LEN

logger = logging.getLogger(__name__)

PATH_KEYS = ("types", "facts", "pos", "neg", "folds", "walks")
RANDOM_STREAMS = ("walks", "negatives", "folds", "init", "shuffle", "ground")

# ========================================
# SETTINGS MODEL
# ========================================


class ExperimentConfig(BaseSettings):
    """All settings of one experiment, flat so they fit a key=value file."""

    model_config = SettingsConfigDict(env_prefix="RELNET_", extra="forbid", frozen=True)

    # dataset
    types: Optional[Path] = None
    facts: Optional[Path] = None
    pos: Optional[Path] = None
    neg: Optional[Path] = None
    folds: Optional[Path] = None
    target: Optional[str] = None

    # structure
    walks: Optional[Path] = None
    num_walks: int = Field(20, ge=1)
    max_len: int = Field(DEFAULT_MAX_LEN, ge=1)
    samples_per_walk: int = Field(0, ge=0)

    # training
    combiner: CombinerMode = CombinerMode.AVERAGE
    lr: float = Field(0.05, gt=0)
    l1: float = Field(1e-4, ge=0)
    eps: float = Field(1e-8, gt=0)
    batch: int = Field(1, ge=1, le=1)
    epochs: int = Field(1, ge=1)
    neg_ratio: int = Field(2, ge=1)
    seed: int = Field(0, ge=0)

    # experiment
    k: int = Field(5, ge=2)
    workers: int = Field(1, ge=1)
    out: Path = Path("relnet_out")
    log_level: str = "INFO"
    log_file: Optional[Path] = None

    @field_validator("combiner", mode="before")
    @classmethod
    def _parse_combiner(cls, value):
        return CombinerMode.parse(value)

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        level = value.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value}")
        return level

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            combiner=self.combiner,
            lr=self.lr,
            l1=self.l1,
            eps=self.eps,
            batch=self.batch,
            epochs=self.epochs,
            seed=self.seed,
            neg_ratio=self.neg_ratio,
            num_walks=self.num_walks,
            samples_per_walk=self.samples_per_walk,
            max_len=self.max_len,
        )

    def require(self, *keys: str) -> None:
        """Fail with ConfigError unless every named path is set and every set path exists."""
        for key in keys:
            if getattr(self, key) is None:
                raise ConfigError(f"Missing required setting '{key}' (flag --{key.replace('_', '-')})")
        for key in PATH_KEYS:
            path = getattr(self, key)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"File for '{key}' not found: {path}")

    def as_flat_dict(self) -> Dict[str, Any]:
        values = self.model_dump()
        values["combiner"] = self.combiner.value
        return values

    def to_manifest(self) -> str:
        """Flat key=value text that reloads into an identical config."""
        lines = [
            "# relnet experiment manifest",
            f"# random streams derived from seed: {', '.join(RANDOM_STREAMS)}",
        ]
        for key, value in sorted(self.as_flat_dict().items()):
            if value is None:
                continue
            lines.append(f"{key}={_format_value(value)}")
        return "".join(f"{line}\n" for line in lines)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ========================================
# LOADING
# ========================================


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Parse a flat key=value file (``#`` comments, optional quotes).

    Keys are matched case-insensitively, with dashes treated as underscores.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    raw = dotenv_values(path)
    values = {}
    for key, value in raw.items():
        if value is None:
            raise ConfigError(f"{path}: line for '{key}' has no value")
        values[key.strip().lower().replace("-", "_")] = value
    return values


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"Invalid configuration: {problems}") from None


def load_config(config_file: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Resolve the experiment configuration.

    Args:
        config_file: Optional flat key=value file (e.g. a manifest)
        overrides: Command-line values; None entries mean "not given"

    Returns:
        ExperimentConfig: Validated settings
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
        logger.debug(f"Read {len(values)} settings from {config_file}")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(values)
