"""Antichains of block sets with orientation-directed subsumption.

An antichain stores finitely many pairwise ⊆-incomparable sets.  The
orientation says which extreme matters: a KEEP_MAX antichain retains maximal
sets (a superset subsumes its subsets), a KEEP_MIN antichain retains minimal
ones.  Elements are bitmasks over block indices interned at graph-load time,
kept in sorted order so that structurally equal antichains compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator


class Orientation(Enum):
    KEEP_MIN = "keep-min"
    KEEP_MAX = "keep-max"


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Antichain:
    orientation: Orientation
    elements: tuple[int, ...] = ()

    @staticmethod
    def empty(orientation: Orientation) -> "Antichain":
        return Antichain(orientation)

    @staticmethod
    def of(orientation: Orientation, sets: Iterable[Iterable[int]]) -> "Antichain":
        ac = Antichain(orientation)
        for s in sets:
            ac = ac.insert(mask_of(s))
        return ac

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def sets(self) -> list[frozenset[int]]:
        return [frozenset(indices_of(m)) for m in self.elements]

    def insert(self, mask: int) -> "Antichain":
        """Add a set unless subsumed; drop the elements it subsumes."""
        if self.orientation is Orientation.KEEP_MAX:
            for e in self.elements:
                if mask & e == mask:  # mask ⊆ e: already covered
                    return self
            kept = tuple(e for e in self.elements if e & mask != e)
        else:
            for e in self.elements:
                if mask & e == e:  # e ⊆ mask: already covered
                    return self
            kept = tuple(e for e in self.elements if mask & e != mask)
        return Antichain(self.orientation, tuple(sorted(kept + (mask,))))

    def union(self, other: "Antichain") -> "Antichain":
        """Least antichain subsuming both operands."""
        if self.orientation is not other.orientation:
            raise ValueError("cannot union antichains of different orientations")
        big, small = (self, other) if len(self) >= len(other) else (other, self)
        out = big
        for m in small.elements:
            out = out.insert(m)
        return out

    def covers(self, mask: int) -> bool:
        if self.orientation is Orientation.KEEP_MAX:
            return any(mask & e == mask for e in self.elements)
        return any(mask & e == e for e in self.elements)

    def subsumes(self, other: "Antichain") -> bool:
        """The order used for fixpoint convergence: union(self, other) == self."""
        if self.orientation is not other.orientation:
            raise ValueError("cannot compare antichains of different orientations")
        return all(self.covers(m) for m in other.elements)
