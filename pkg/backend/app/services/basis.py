# backend/app/services/basis.py
"""Basis enumeration and global-index maps for the two-particle spaces.

Three bases are indexed row-major by the mode pair (i, j):

    Hilbert (distinguishable)  m = K(i-1) + j                 1 <= i, j <= K
    boson Fock                 m = K(i-1) + j - i(i-1)/2       i <= j
    fermion Fock               m = K(i-1) + j - i(i+1)/2       i < j

The correction i(i-g)/2 counts the pairs skipped before row i. Indices
are 1-based at this module's boundary.
"""
import logging
from functools import lru_cache
from typing import List, Optional, Tuple

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.statistics import ModePair, Space, Statistics

logger = logging.getLogger(__name__)


def check_modes(K: int) -> None:
    if not isinstance(K, int) or isinstance(K, bool) or K < 1:
        raise DomainError(f"number of modes K must be a positive integer, got {K!r}")
    if K > settings.MAX_MODES:
        raise DomainError(f"K={K} exceeds the supported maximum of {settings.MAX_MODES}")


def _check_mode(K: int, label: str, value: int) -> None:
    if not 1 <= value <= K:
        raise DomainError(f"mode index {label}={value} outside 1..{K}")


def hilbert_dimension(K: int) -> int:
    check_modes(K)
    return K * K


def fock_dimension(K: int, stat: Statistics) -> int:
    check_modes(K)
    return K * (K + stat.g) // 2


def space_dimension(space: Space, K: int) -> int:
    check_modes(K)
    return space.dimension(K)


def forbidden_before_row(stat: Statistics, i: int) -> int:
    """s(g, i): pairs of rows 1..i excluded from the Fock ordering."""
    return i * (i - stat.g) // 2


def index_hilbert(K: int, p: ModePair) -> int:
    check_modes(K)
    _check_mode(K, "i", p.i)
    _check_mode(K, "j", p.j)
    return K * (p.i - 1) + p.j


def unindex_hilbert(K: int, m: int) -> ModePair:
    check_modes(K)
    if not 1 <= m <= K * K:
        raise DomainError(f"Hilbert index m={m} outside 1..{K * K}")
    row, col = divmod(m - 1, K)
    return ModePair(i=row + 1, j=col + 1)


def index_fock(K: int, stat: Statistics, p: ModePair) -> int:
    check_modes(K)
    _check_mode(K, "i", p.i)
    _check_mode(K, "j", p.j)
    if p.j < p.i + stat.delta:
        relation = "i <= j" if stat is Statistics.BOSON else "i < j"
        raise DomainError(f"{stat.value} Fock pair {p} violates {relation}")
    return K * (p.i - 1) + p.j - forbidden_before_row(stat, p.i)


def _offset(K: int, stat: Statistics, m: int, r: int) -> int:
    # f(r) = m - 1 - r(2K + g - r)/2; the product is always even
    return m - 1 - r * (2 * K + stat.g - r) // 2


def unindex_fock(K: int, stat: Statistics, m: int) -> ModePair:
    check_modes(K)
    dim = K * (K + stat.g) // 2
    if not 1 <= m <= dim:
        raise DomainError(f"{stat.value} Fock index m={m} outside 1..{dim}")
    # direct scan keeps the search exact for every K
    r_bar = max(r for r in range(K) if _offset(K, stat, m, r) >= 0)
    i = 1 + r_bar
    j = stat.delta + i + _offset(K, stat, m, r_bar)
    return ModePair(i=i, j=j)


@lru_cache(maxsize=128)
def _pairs(K: int, stat: Optional[Statistics]) -> Tuple[Tuple[int, int], ...]:
    if stat is None:
        return tuple((i, j) for i in range(1, K + 1) for j in range(1, K + 1))
    return tuple((i, j) for i in range(1, K + 1) for j in range(i + stat.delta, K + 1))


def enumerate_pairs(K: int, stat: Optional[Statistics] = None) -> Tuple[Tuple[int, int], ...]:
    """Same ordering as enumerate_basis, as plain 1-based tuples."""
    check_modes(K)
    return _pairs(K, stat)


def enumerate_basis(K: int, stat: Optional[Statistics] = None) -> List[ModePair]:
    """Mode pairs in global-index order; position k holds index k + 1."""
    return [ModePair(i=i, j=j) for i, j in enumerate_pairs(K, stat)]


class BasisIndexer:
    """Index maps for one space: Hilbert when ``stat`` is None, Fock otherwise."""

    def __init__(self, K: int, stat: Optional[Statistics] = None):
        check_modes(K)
        self.K = K
        self.stat = stat

    @property
    def space(self) -> Space:
        return Space.HILBERT if self.stat is None else Space.fock(self.stat)

    @property
    def dim(self) -> int:
        return self.space.dimension(self.K)

    @property
    def hilbert_dim(self) -> int:
        return self.K * self.K

    @property
    def boson_dim(self) -> int:
        return self.K * (self.K + 1) // 2

    @property
    def fermion_dim(self) -> int:
        return self.K * (self.K - 1) // 2

    def index(self, p: ModePair) -> int:
        if self.stat is None:
            return index_hilbert(self.K, p)
        return index_fock(self.K, self.stat, p)

    def unindex(self, m: int) -> ModePair:
        if self.stat is None:
            return unindex_hilbert(self.K, m)
        return unindex_fock(self.K, self.stat, m)

    def basis(self) -> List[ModePair]:
        return enumerate_basis(self.K, self.stat)

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"BasisIndexer(K={self.K}, space={self.space.value}, dim={self.dim})"
