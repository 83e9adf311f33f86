# backend/app/models/statistics.py
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class Statistics(str, Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def g(self) -> int:
        """Exchange sign: +1 for bosons, -1 for fermions."""
        return 1 if self is Statistics.BOSON else -1

    @property
    def delta(self) -> int:
        """Offset between the two mode labels of an allowed pair, (1 - g) / 2."""
        return (1 - self.g) // 2


class Space(str, Enum):
    HILBERT = "hilbert"
    BOSON_FOCK = "boson_fock"
    FERMION_FOCK = "fermion_fock"

    @classmethod
    def fock(cls, stat: Statistics) -> "Space":
        return cls.BOSON_FOCK if stat is Statistics.BOSON else cls.FERMION_FOCK

    @property
    def statistics(self) -> Optional[Statistics]:
        if self is Space.BOSON_FOCK:
            return Statistics.BOSON
        if self is Space.FERMION_FOCK:
            return Statistics.FERMION
        return None

    @property
    def is_fock(self) -> bool:
        return self is not Space.HILBERT

    def dimension(self, K: int) -> int:
        if self is Space.HILBERT:
            return K * K
        return K * (K + self.statistics.g) // 2


class ModePair(BaseModel):
    """Two single-particle mode labels (1-based)."""

    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)

    @classmethod
    def of(cls, i: int, j: int) -> "ModePair":
        return cls(i=i, j=j)

    def swapped(self) -> "ModePair":
        return ModePair(i=self.j, j=self.i)

    def ordered(self) -> "ModePair":
        return self if self.i <= self.j else self.swapped()

    def as_tuple(self) -> tuple:
        return (self.i, self.j)

    def __str__(self) -> str:
        return f"({self.i},{self.j})"
