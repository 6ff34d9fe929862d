"""Slot bitmap arithmetic for flex-grid links.

A bitmap is a fixed-length row of slots where 1 means free and 0 means
busy.  Bitmaps are stored as Python integers: bit i (LSB side) is slot i,
which makes intersection a single ``&`` and contiguity checks a handful of
shift-and-ands regardless of slot count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class SpectrumError(Exception):
    """Base class for spectrum allocation errors."""


class LengthMismatchError(SpectrumError):
    pass


class NoFitError(SpectrumError):
    pass


class AllocationConflictError(SpectrumError):
    pass


class DoubleFreeError(SpectrumError):
    pass


@dataclass(frozen=True)
class SlotBlock:
    """A contiguous run of slots: ``start`` (0-based) through ``start+length-1``."""

    start: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.length < 1:
            raise ValueError(f"invalid slot block ({self.start}, {self.length})")

    @property
    def end(self) -> int:
        """One past the last slot index."""
        return self.start + self.length

    def mask(self) -> int:
        return ((1 << self.length) - 1) << self.start

    def overlaps(self, other: "SlotBlock") -> bool:
        return self.start < other.end and other.start < self.end


class SpectrumBitmap:
    """Fixed-length free/busy bitmap over ``size`` slots (free = 1)."""

    __slots__ = ("bits", "size")

    def __init__(self, size: int, bits: int | None = None):
        if size < 1:
            raise ValueError("bitmap size must be >= 1")
        self.size = size
        self.bits = ((1 << size) - 1) if bits is None else bits
        if self.bits < 0 or self.bits >> size:
            raise ValueError("bits do not fit in the declared size")

    @classmethod
    def from_string(cls, s: str) -> "SpectrumBitmap":
        """Parse "1101..." with slot 0 leftmost."""
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"bad bitmap character {ch!r}")
        return cls(len(s), bits)

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.size))

    def copy(self) -> "SpectrumBitmap":
        return SpectrumBitmap(self.size, self.bits)

    def free_count(self) -> int:
        return self.bits.bit_count()

    def busy_count(self) -> int:
        return self.size - self.bits.bit_count()

    def is_free(self, block: SlotBlock) -> bool:
        m = block.mask()
        return block.end <= self.size and self.bits & m == m

    def is_busy(self, block: SlotBlock) -> bool:
        return block.end <= self.size and self.bits & block.mask() == 0

    def set_busy(self, block: SlotBlock) -> None:
        self.bits &= ~block.mask()

    def set_free(self, block: SlotBlock) -> None:
        self.bits |= block.mask()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SpectrumBitmap)
            and self.size == other.size
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.size, self.bits))

    def __repr__(self) -> str:
        return f"SpectrumBitmap({self.to_string()!r})"


def intersect(a: SpectrumBitmap, b: SpectrumBitmap) -> SpectrumBitmap:
    """Bitwise AND of two equal-length bitmaps (spectrum continuity)."""
    if a.size != b.size:
        raise LengthMismatchError(f"bitmap lengths differ: {a.size} != {b.size}")
    return SpectrumBitmap(a.size, a.bits & b.bits)


def _run_mask(bits: int, need: int) -> int:
    # After the loop, bit i is set iff slots i..i+need-1 are all free.
    m = bits
    shift = 1
    remaining = need - 1
    while remaining > 0:
        step = min(shift, remaining)
        m &= m >> step
        remaining -= step
        shift *= 2
    return m


def is_feasible(bitmap: SpectrumBitmap, need: int) -> bool:
    """True iff the bitmap holds ``need`` consecutive free slots somewhere."""
    if need < 1:
        raise ValueError("need must be >= 1")
    if need > bitmap.size:
        return False
    return _run_mask(bitmap.bits, need) != 0


def first_fit(bitmap: SpectrumBitmap, need: int) -> SlotBlock:
    """Lowest-start block of exactly ``need`` free slots."""
    if need < 1:
        raise ValueError("need must be >= 1")
    m = _run_mask(bitmap.bits, need) if need <= bitmap.size else 0
    if m == 0:
        raise NoFitError(f"no run of {need} free slots")
    start = (m & -m).bit_length() - 1
    return SlotBlock(start, need)


def demand_to_slots(rate_gbps: float, slot_ghz: float, guard_ghz: float = 0.0) -> int:
    """Slots needed for a demand, guard band rounded up separately."""
    if rate_gbps <= 0 or slot_ghz <= 0 or guard_ghz < 0:
        raise ValueError("rate and slot width must be positive, guard non-negative")
    return math.ceil(rate_gbps / slot_ghz) + math.ceil(guard_ghz / slot_ghz)


def allocate(bitmaps: list[SpectrumBitmap], block: SlotBlock) -> None:
    """Mark ``block`` busy on every bitmap, atomically (all links or none)."""
    for i, bm in enumerate(bitmaps):
        if not bm.is_free(block):
            for undone in bitmaps[:i]:
                undone.set_free(block)
            raise AllocationConflictError(
                f"slots {block.start}..{block.end - 1} not free on link {i} of path"
            )
        bm.set_busy(block)


def release(bitmaps: list[SpectrumBitmap], block: SlotBlock) -> None:
    """Free ``block`` on every bitmap; rejects freeing slots that are not busy."""
    for bm in bitmaps:
        if not bm.is_busy(block):
            raise DoubleFreeError(
                f"slots {block.start}..{block.end - 1} are not fully allocated"
            )
    for bm in bitmaps:
        bm.set_free(block)
