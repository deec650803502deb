"""Bitmask representation of nonempty coordinate subsets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError

MAX_DIM = 30


@dataclass(frozen=True)
class SubsetMask:
    """A nonempty subset of the coordinates ``{0, ..., d-1}``.

    Coordinates are 0-based in the Python API. The CLI and JSON layers
    translate from the 1-based labels used in model specs.
    """

    bits: int
    d: int

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIM:
            raise DomainError(f"dimension d={self.d} outside [1, {MAX_DIM}]")
        if self.bits <= 0:
            raise DomainError("subset must be nonempty")
        if self.bits >> self.d:
            raise DomainError(f"subset bits {self.bits:#b} exceed dimension d={self.d}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], d: int) -> SubsetMask:
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < d:
                raise DomainError(f"coordinate {i} outside 0..{d - 1}")
            bits |= 1 << i
        return cls(bits, d)

    @classmethod
    def full(cls, d: int) -> SubsetMask:
        return cls((1 << d) - 1, d)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.d) if self.bits >> i & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.d and bool(self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def indicator(self) -> np.ndarray:
        """The 0/1 vector of length d with ones on this subset."""
        v = np.zeros(self.d)
        v[list(self.indices)] = 1.0
        return v

    def submasks(self) -> Iterator[SubsetMask]:
        """All nonempty subsets B of this subset, by descending bitmask."""
        b = self.bits
        while b:
            yield SubsetMask(b, self.d)
            b = (b - 1) & self.bits

    def is_subset_of(self, other: SubsetMask) -> bool:
        return self.d == other.d and self.bits & ~other.bits == 0

    def __repr__(self):
        return f"SubsetMask({set(self.indices)}, d={self.d})"


def all_nonempty_subsets(d: int) -> list[SubsetMask]:
    return [SubsetMask(b, d) for b in range(1, 1 << d)]
