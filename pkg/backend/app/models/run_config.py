# backend/app/models/run_config.py
import json
import math
from pathlib import Path
from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.exceptions import ConfigError
from app.models.lattice import Boundary, LatticeSpec
from app.models.statistics import Statistics

OutputKind = Literal["occupations", "entropy", "state", "fock_hamiltonian", "hilbert_hamiltonian"]


class InitialTerm(BaseModel):
    """One amplitude of the initial state, complex values written as [re, im]."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    pair: Tuple[int, int]
    amplitude: Tuple[float, float] = (1.0, 0.0)

    @field_validator("amplitude")
    @classmethod
    def _finite(cls, value):
        if not all(math.isfinite(part) for part in value):
            raise ValueError("amplitude must be finite")
        return value

    @property
    def value(self) -> complex:
        return complex(*self.amplitude)


class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    start: float = Field(0.0, ge=0)
    stop: float
    steps: int = Field(..., ge=1, description="Number of time points, both ends included")

    @model_validator(mode="after")
    def _ordered(self) -> "TimeGrid":
        if self.steps > 1 and not self.stop > self.start:
            raise ValueError("stop must be greater than start when steps > 1")
        return self

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    K: int = Field(..., ge=2)
    statistics: Statistics
    bc: Boundary = Boundary.OPEN
    J: float = 1.0
    U: float = 0.0
    initial: List[InitialTerm] = Field(..., min_length=1)
    times: TimeGrid
    outputs: List[OutputKind] = ["occupations", "entropy"]
    output_dir: Path = Path("output")
    already_symmetrized: bool = False
    propagate_in: Literal["hilbert", "fock"] = "hilbert"

    @field_validator("J", "U")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @field_validator("outputs")
    @classmethod
    def _unique(cls, value):
        if len(set(value)) != len(value):
            raise ValueError("outputs must not repeat")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.bc is Boundary.PERIODIC and self.K == 2:
            raise ValueError("bc: periodic boundary needs K >= 3")
        for n, term in enumerate(self.initial):
            i, j = term.pair
            if not (1 <= i <= self.K and 1 <= j <= self.K):
                raise ValueError(f"initial.{n}.pair: modes {term.pair} outside 1..{self.K}")
            if self.already_symmetrized and j < i + self.statistics.delta:
                raise ValueError(f"initial.{n}.pair: {term.pair} is not an ordered {self.statistics.value} pair")
        return self

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(K=self.K, J=self.J, bc=self.bc, U=self.U)


def _field_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"])


def load_run_config(path: Path) -> RunConfig:
    """Parse and validate a JSON run configuration, raising ConfigError with the field path."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError("", f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError("", f"{path} is not valid JSON: {e}")
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_field_path(first), first["msg"])
