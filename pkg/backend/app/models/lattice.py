# backend/app/models/lattice.py
import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class LatticeSpec(BaseModel):
    """One-dimensional chain of K sites with nearest-neighbour hopping J."""

    model_config = ConfigDict(frozen=True)

    K: int = Field(..., ge=2, description="Number of sites")
    J: float = Field(1.0, description="Hopping amplitude")
    bc: Boundary = Boundary.OPEN
    U: float = Field(0.0, description="On-site interaction strength")

    @field_validator("J", "U")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @model_validator(mode="after")
    def _no_double_bond(self) -> "LatticeSpec":
        if self.bc is Boundary.PERIODIC and self.K == 2:
            raise ValueError("periodic boundary with K=2 double-counts the single bond")
        return self

    def bonds(self):
        """Nearest-neighbour bonds (i, i+1) with 1-based sites."""
        pairs = [(i, i + 1) for i in range(1, self.K)]
        if self.bc is Boundary.PERIODIC:
            pairs.append((self.K, 1))
        return pairs
