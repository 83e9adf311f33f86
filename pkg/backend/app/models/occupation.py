# backend/app/models/occupation.py
from dataclasses import dataclass, replace
from typing import Tuple

from app.core.exceptions import DomainError
from app.models.statistics import Statistics


@dataclass(frozen=True)
class OccupationState:
    """Amplitude times the number state |n_1, ..., n_K>.

    A state whose prefactor vanished under a ladder action is kept as a
    null vector (``is_null``) so it stays distinguishable from the vacuum.
    """

    occ: Tuple[int, ...]
    stat: Statistics
    amplitude: complex = 1.0
    is_null: bool = False

    def __post_init__(self):
        occ = tuple(int(n) for n in self.occ)
        if any(n < 0 for n in occ):
            raise DomainError(f"occupation numbers must be non-negative, got {occ}")
        if self.stat is Statistics.FERMION and any(n > 1 for n in occ):
            raise DomainError(f"fermionic occupations must be 0 or 1, got {occ}")
        object.__setattr__(self, "occ", occ)
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @classmethod
    def null(cls, occ: Tuple[int, ...], stat: Statistics) -> "OccupationState":
        return cls(occ=occ, stat=stat, amplitude=0.0, is_null=True)

    @property
    def K(self) -> int:
        return len(self.occ)

    @property
    def total_particles(self) -> int:
        return sum(self.occ)

    def with_mode(self, i: int, n: int, factor: complex) -> "OccupationState":
        occ = list(self.occ)
        occ[i - 1] = n
        return replace(self, occ=tuple(occ), amplitude=self.amplitude * factor)
