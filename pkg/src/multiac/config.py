"""Experiment configuration: a YAML file with an embedded schema version.

Configs are the reproducibility contract of the command-line tool: every
subcommand is deterministic given its config, and the file round-trips
losslessly through load/save.
"""
from dataclasses import asdict, dataclass, field

import yaml

from .model import SpectrumModel

SCHEMA_VERSION = 1

GUESS_FAMILIES = ("sudden-smooth", "linear", "sinusoidal")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    N: int = 3
    epsilon0: float = 10.0
    deltas: list = field(default_factory=lambda: [1.0, 1.0])
    K: int = 2
    steps_per_period: int = 40
    min_steps: int = 128
    alpha0: float = 1.0
    max_iters: int = 10000
    threshold: float = 1e-4
    guess_family: str = "sudden-smooth"
    smoothing: float = 0.02
    slope: float = 0.01
    T_factor: float = 1.0  # total time as a multiple of the stepped-protocol time
    sweep_lo: float = 0.7
    sweep_hi: float = 1.1
    sweep_points: int = 21
    sweep_kind: str = "time"  # time | epsilon | K
    sweep_values: list = field(default_factory=list)  # epsilon0 or K values
    lambda_A: float | None = None  # None: calibrate
    t_m_factor: float | None = None  # None: split by stage durations
    output_dir: str = "out"
    workers: int = 1
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported schema_version {self.schema_version}, "
                f"expected {SCHEMA_VERSION}"
            )
        if self.guess_family not in GUESS_FAMILIES:
            raise ConfigError(
                f"guess_family must be one of {GUESS_FAMILIES}, "
                f"got {self.guess_family!r}"
            )
        if self.sweep_kind not in ("time", "epsilon", "K"):
            raise ConfigError(f"unknown sweep_kind {self.sweep_kind!r}")
        try:
            model = self.model()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not 1 <= self.K <= model.N - 1:
            raise ConfigError(f"K={self.K} out of range for N={model.N}")
        if self.max_iters < 1 or self.threshold <= 0 or self.alpha0 <= 0:
            raise ConfigError("optimizer settings must be positive")
        if self.sweep_points < 1 or not self.sweep_lo <= self.sweep_hi:
            raise ConfigError("sweep range is empty")
        return self

    def model(self):
        return SpectrumModel(N=self.N, epsilon0=self.epsilon0, deltas=tuple(self.deltas))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be a mapping, got {type(raw)}")
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw).validate()

    def save(self, path):
        with open(path, "w") as fh:
            yaml.safe_dump(asdict(self), fh, sort_keys=False)

    def with_overrides(self, pairs):
        """Apply key=value overrides (strings), parsing values as YAML."""
        data = asdict(self)
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(f"override must look like key=value, got {pair!r}")
            key, value = pair.split("=", 1)
            if key not in data:
                raise ConfigError(f"unknown config key {key!r}")
            data[key] = yaml.safe_load(value)
        return type(self)(**data).validate()
