"""Configuration management for rmchannel.

Values come from three layers, later ones winning: built-in defaults and
``RMCHANNEL_*`` environment variables (``Settings``), a flat ``KEY=value``
config file, and command-line flags.
"""

import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Optional, Union

import numpy as np
from dotenv import dotenv_values, load_dotenv

from .core.channel import EnvironmentSpec
from .core.errors import ConfigError, NumericError
from .core.fluctuations import KINDS, MIN_MC_SAMPLES
from .core.parallel import default_workers

# Load environment variables
load_dotenv()

Dimension = Union[int, float]

MODELS = ("gue-exact", "gue-infinite", "poisson", "poisson-infinite", "monte-carlo")
INFINITE_MODELS = ("gue-infinite", "poisson-infinite")
FORMATS = ("csv", "json")
COMMANDS = ("alpha", "measures", "fluctuations")


def _env_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


def _env_workers() -> int:
    value = os.getenv("RMCHANNEL_WORKERS", "").strip()
    return int(value) if value else default_workers()


@dataclass
class Settings:
    """Built-in defaults, overridable through the environment."""

    seed: int = field(default_factory=lambda: int(os.getenv("RMCHANNEL_SEED", "1234")))
    workers: int = field(default_factory=_env_workers)
    format: str = field(default_factory=lambda: os.getenv("RMCHANNEL_FORMAT", "csv"))
    verbose: bool = field(default_factory=lambda: _env_bool("RMCHANNEL_VERBOSE"))
    horizon: float = field(default_factory=lambda: float(os.getenv("RMCHANNEL_HORIZON", "500")))


# Global settings instance
settings = Settings()


# Per-command grids: alpha curves for plotting, measures up to the integration
# horizon, fluctuations over the first revivals.
COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "alpha": {"t_end": 10.0, "t_step": 0.01},
    "measures": {"t_step": 0.005},
    "fluctuations": {"t_end": 20.0, "t_step": 0.05},
}

KEY_ALIASES = {
    "dim": "N",
    "n": "N",
    "samples": "n_samples",
    "env": "env_state",
    "input": "input_path",
    "horizon": "t_end",
    "config": None,
}


def parse_dim(value: Any) -> Dimension:
    """Parse a dimension: a positive integer or ``inf``."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, float) and math.isinf(value):
        return math.inf
    text = str(value).strip().lower()
    if text in ("inf", "infinity", "∞"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"dimension must be an integer or 'inf', got {value!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one command run."""

    command: str
    model: str = "gue-exact"
    N: Dimension = 4
    t_start: float = 0.0
    t_end: float = 10.0
    t_step: float = 0.01
    seed: int = 1234
    n_samples: int = 0
    env_state: str = "projector"
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    table: bool = False
    input_path: Optional[str] = None
    floor: float = 1e-9
    kinds: tuple[str, ...] = KINDS
    spectral_average: int = 0

    @property
    def horizon(self) -> float:
        return self.t_end

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.N)

    def validate(self) -> "ExperimentConfig":
        """Raise :class:`ConfigError` unless the configuration is runnable."""
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {', '.join(MODELS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected csv or json")
        if not self.t_step > 0:
            raise ConfigError(f"t-step must be positive, got {self.t_step}")
        if not self.t_start < self.t_end:
            raise ConfigError(f"t-start ({self.t_start}) must be below t-end ({self.t_end})")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.n_samples < 0 or self.n_samples == 1:
            raise ConfigError("samples must be 0 (single instance) or at least 2")
        if self.floor <= 0:
            raise ConfigError(f"floor must be positive, got {self.floor}")
        for kind in self.kinds:
            if kind not in KINDS:
                raise ConfigError(f"unknown fluctuation kind {kind!r}")

        if self.model not in INFINITE_MODELS and not self.is_infinite and self.N < 2:
            raise ConfigError(f"dimension must be >= 2, got {self.N}")
        if self.model == "monte-carlo":
            if self.is_infinite or self.N % 2:
                raise ConfigError(
                    f"monte-carlo needs an even finite N (qubit x environment), got {self.N}"
                )
            self.environment()
        if self.spectral_average < 0:
            raise ConfigError(f"spectral-average must be >= 0, got {self.spectral_average}")
        if self.command == "fluctuations":
            if self.is_infinite or self.model == "poisson-infinite":
                raise ConfigError("fluctuations vanish at infinite N; give a finite --dim")
            if self.n_samples:
                if self.n_samples < MIN_MC_SAMPLES:
                    raise ConfigError(
                        f"fluctuations need --samples 0 or at least {MIN_MC_SAMPLES}, "
                        f"got {self.n_samples}"
                    )
                self.environment()
        return self

    def environment(self) -> EnvironmentSpec:
        """Environment state for a qubit coupled to an N/2-level environment."""
        if self.is_infinite or self.N % 2:
            raise ConfigError(f"an environment needs an even finite N, got {self.N}")
        try:
            return EnvironmentSpec.parse(self.env_state, int(self.N) // 2)
        except NumericError as exc:
            raise ConfigError(str(exc)) from exc

    def times(self) -> np.ndarray:
        """Grid t_start, t_start + t_step, ... up to and including t_end."""
        count = int(math.floor((self.t_end - self.t_start) / self.t_step + 1e-9)) + 1
        return self.t_start + self.t_step * np.arange(count)

    def echo(self) -> dict[str, Any]:
        """JSON-safe copy for output metadata."""
        data = asdict(self)
        data["N"] = "inf" if self.is_infinite else int(self.N)
        data["kinds"] = list(self.kinds)
        return data


def _parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _parse_kinds(value: Any) -> tuple[str, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return tuple(k.strip() for k in str(value).split(",") if k.strip())


_COERCE = {
    "N": parse_dim,
    "t_start": float,
    "t_end": float,
    "t_step": float,
    "seed": int,
    "n_samples": int,
    "spectral_average": int,
    "workers": int,
    "floor": float,
    "table": _parse_bool,
    "kinds": _parse_kinds,
}

_FIELDS = {f.name for f in fields(ExperimentConfig)}


def _normalize_key(key: str) -> Optional[str]:
    name = key.strip().lower().replace("-", "_")
    return KEY_ALIASES.get(name, name)


def _coerce(values: dict[str, Any], source: str) -> dict[str, Any]:
    result = {}
    for key, value in values.items():
        name = _normalize_key(key)
        if name is None or value is None:
            continue
        if name not in _FIELDS or name == "command":
            raise ConfigError(f"unknown setting {key!r} in {source}")
        try:
            result[name] = _COERCE.get(name, str)(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key!r} in {source}: {value!r}") from exc
    return result


def load_config_file(path: str) -> dict[str, Any]:
    """Read a flat KEY=value file into config fields."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    return _coerce(dotenv_values(path), path)


def resolve_config(
    command: str,
    flags: dict[str, Any],
    config_path: Optional[str] = None,
) -> ExperimentConfig:
    """Merge defaults < config file < flags and validate the result."""
    base = ExperimentConfig(
        command=command,
        seed=settings.seed,
        workers=settings.workers,
        format=settings.format,
        **COMMAND_DEFAULTS.get(command, {}),
    )
    if command == "measures":
        base = replace(base, t_end=settings.horizon)

    merged: dict[str, Any] = {}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update(_coerce(flags, "command-line flags"))

    config = replace(base, **merged)
    if config.model in INFINITE_MODELS and "N" not in merged:
        config = replace(config, N=math.inf)
    return config.validate()
