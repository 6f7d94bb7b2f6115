"""Dense membership tables for subsets of a finite field."""
from __future__ import annotations

from collections.abc import Iterable, Iterator

import numpy as np


class ElemSet:
    """An immutable subset of ``{0, ..., order-1}`` stored as a boolean table.

    Elements are dense field indices.  ``card`` is cached at construction.
    """

    __slots__ = ("bits", "card")

    def __init__(self, bits: np.ndarray):
        table = np.array(bits, dtype=bool, copy=True)
        if table.ndim != 1:
            raise ValueError("membership table must be one-dimensional")
        table.flags.writeable = False
        self.bits = table
        self.card = int(np.count_nonzero(table))

    @classmethod
    def from_indices(cls, order: int, indices: Iterable[int] | np.ndarray) -> "ElemSet":
        table = np.zeros(order, dtype=bool)
        idx = np.fromiter(indices, dtype=np.int64) if not isinstance(indices, np.ndarray) else indices
        if idx.size:
            idx = idx.astype(np.int64, copy=False)
            if idx.min() < 0 or idx.max() >= order:
                raise ValueError("element index out of range")
            table[idx] = True
        return cls(table)

    @classmethod
    def empty(cls, order: int) -> "ElemSet":
        return cls(np.zeros(order, dtype=bool))

    @classmethod
    def full(cls, order: int) -> "ElemSet":
        return cls(np.ones(order, dtype=bool))

    @property
    def order(self) -> int:
        return len(self.bits)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __len__(self) -> int:
        return self.card

    def __iter__(self) -> Iterator[int]:
        return (int(i) for i in np.flatnonzero(self.bits))

    def __contains__(self, index: object) -> bool:
        return isinstance(index, (int, np.integer)) and 0 <= index < len(self.bits) and bool(self.bits[index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElemSet):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.order, self.bits.tobytes()))

    def __repr__(self) -> str:
        shown = list(self)[:8]
        more = ", ..." if self.card > 8 else ""
        return f"ElemSet(order={self.order}, card={self.card}, {shown}{more})"

    def _check(self, other: "ElemSet") -> None:
        if self.order != other.order:
            raise ValueError("sets live in fields of different order")

    def __or__(self, other: "ElemSet") -> "ElemSet":
        self._check(other)
        return ElemSet(self.bits | other.bits)

    def __and__(self, other: "ElemSet") -> "ElemSet":
        self._check(other)
        return ElemSet(self.bits & other.bits)

    def __sub__(self, other: "ElemSet") -> "ElemSet":
        self._check(other)
        return ElemSet(self.bits & ~other.bits)

    def issubset(self, other: "ElemSet") -> bool:
        self._check(other)
        return not bool(np.any(self.bits & ~other.bits))

    def without(self, index: int) -> "ElemSet":
        table = self.bits.copy()
        table[index] = False
        return ElemSet(table)

    def min(self) -> int:
        if not self.card:
            raise ValueError("empty set has no least element")
        return int(np.argmax(self.bits))

    # serialization

    def to_hex(self) -> str:
        """Hex bitmap: bit i of the integer is membership of index i."""
        packed = np.packbits(self.bits, bitorder="little")
        return "0x" + format(int.from_bytes(packed.tobytes(), "little"), "x")

    @classmethod
    def from_hex(cls, order: int, text: str) -> "ElemSet":
        value = int(text, 16)
        if value >> order:
            raise ValueError("bitmap has bits beyond the field order")
        nbytes = (order + 7) // 8
        raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
        return cls(np.unpackbits(raw, bitorder="little")[:order].astype(bool))
