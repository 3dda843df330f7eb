"""Declarative experiment configuration with a strict schema."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator


class ConfigError(ValueError):
    """Raised for unreadable or schema-violating configuration files."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DataConfig(_Strict):
    n_train: int = Field(200, ge=1)
    n_test: int = Field(100, ge=1)
    noise: float | None = Field(None, ge=0)
    seed: int | None = None
    classes: list[int] | None = None
    per_class_cap: int | None = Field(None, ge=1)
    test_cap: int | None = Field(None, ge=1)
    side: Literal[4, 8] | None = None


class OptimizerConfig(_Strict):
    epochs: int = Field(20, ge=1)
    lr: float = Field(0.1, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    epsilon: float = Field(1e-8, gt=0)


class NoiseConfig(_Strict):
    channel: Literal["none", "bit_flip", "phase_flip", "bit_phase_flip"] = "none"
    p: float = Field(0.0, ge=0, le=0.5)
    injection: Literal["pre_measurement", "post_encoding"] = "pre_measurement"
    stochastic_realization: bool = False


class SweepConfig(_Strict):
    channels: list[Literal["bit_flip", "phase_flip", "bit_phase_flip"]] = ["bit_flip", "phase_flip", "bit_phase_flip"]
    probs: list[float] = [0.1, 0.2, 0.3, 0.35, 0.4, 0.5]
    repetitions: int = Field(100, ge=1)
    injection: Literal["pre_measurement", "post_encoding"] = "pre_measurement"
    stochastic_realization: bool = False
    shots: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def _check_probs(self):
        if not self.probs:
            raise ValueError("sweep.probs must not be empty")
        if any(not 0 <= p <= 0.5 for p in self.probs):
            raise ValueError("sweep.probs must lie in [0, 0.5]")
        return self


class PqcConfig(_Strict):
    n_qubits: int = Field(2, ge=1, le=4)
    depth: int = Field(1, ge=1)
    r: int = Field(1, ge=1)


class ExperimentConfig(_Strict):
    task: Literal["xor", "circles", "moons", "mnist"]
    model: Literal["sqp", "sqfnn", "smp", "pqc", "mlp"]
    hidden: list[int] = []
    outputs: int | None = Field(None, ge=1)
    parallel_encoding_factor: int = Field(1, ge=1)
    init_low: float = -3.141592653589793
    init_high: float = 3.141592653589793
    pqc: PqcConfig = PqcConfig()
    data: DataConfig = DataConfig()
    optimizer: OptimizerConfig = OptimizerConfig()
    train_noise: NoiseConfig = NoiseConfig()
    eval_noise: NoiseConfig = NoiseConfig()
    sweep: SweepConfig = SweepConfig()
    seed: int = 0
    out: str = "runs"

    @model_validator(mode="after")
    def _check_model(self):
        if self.model in ("sqp", "smp") and self.hidden:
            raise ValueError(f"model {self.model!r} has no hidden layer; drop 'hidden'")
        if self.model == "pqc" and self.task == "mnist":
            raise ValueError("the PQC baseline takes at most 4 qubits and cannot read MNIST images")
        if self.task == "mnist" and not self.data.classes:
            raise ValueError("mnist task needs data.classes")
        if any(h < 1 for h in self.hidden):
            raise ValueError("hidden layer sizes must be positive")
        return self

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return self.model_copy(update={k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


def _format_errors(err: ValidationError, source: str) -> str:
    lines = [f"{source}: invalid configuration"]
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"  field {loc}: {e['msg']}")
    return "\n".join(lines)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc, source)) from None


BUNDLED = ("xor", "circles", "moons", "mnist")


def bundled_config_path(name: str) -> Path:
    return Path(str(resources.files("softq") / "configs" / f"{name}.json"))


def load_config(path_or_name) -> ExperimentConfig:
    """Read a config file; a bare bundled name such as ``xor`` is also accepted."""
    path = Path(path_or_name)
    if not path.exists() and str(path_or_name) in BUNDLED:
        path = bundled_config_path(str(path_or_name))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
