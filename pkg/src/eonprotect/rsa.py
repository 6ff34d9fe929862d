"""Routing and spectrum assignment over consecutive slots.

Candidate paths are enumerated breadth-first (hop count order).  Each
partial path carries the running intersection of its link bitmaps and the
running product of its link availabilities; branches whose intersection can
no longer host the requested contiguous block are pruned immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .spectrum import SlotBlock, SpectrumBitmap, allocate, first_fit, is_feasible
from .topology import Link, NetworkGraph


@dataclass(frozen=True)
class LightpathRequest:
    s: str
    d: str
    slots_needed: int
    k: int = 5
    arrival_s: float = 0.0
    holding_s: float = 0.0
    rate_gbps: float = 0.0

    def __post_init__(self) -> None:
        if self.s == self.d:
            raise ValueError("source and destination must differ")
        if self.slots_needed < 1 or self.k < 1:
            raise ValueError("slots_needed and k must be >= 1")


@dataclass(frozen=True)
class CandidatePath:
    vertices: tuple[str, ...]
    links: tuple[Link, ...]
    bitmap: SpectrumBitmap
    availability: float

    @property
    def hops(self) -> int:
        return len(self.links)

    def link_ids(self) -> frozenset[str]:
        return frozenset(link.id for link in self.links)


def candidate_paths(
    g: NetworkGraph,
    s: str,
    d: str,
    slots_needed: int,
    k: int,
) -> list[CandidatePath]:
    """Up to k loop-free paths s->d with >= slots_needed contiguous common slots.

    Paths come out in breadth-first order, so hop counts are non-decreasing.
    Returns as soon as k paths are collected; empty list when nothing fits.
    """
    if s not in g.adjacency or d not in g.adjacency:
        raise KeyError(f"unknown vertex in request {s}->{d}")
    size = g.slot_count
    if slots_needed > size:
        return []
    all_free = (1 << size) - 1
    found: list[CandidatePath] = []
    # frontier entries: (vertices, links, intersected bits, availability)
    frontier: list[tuple[tuple[str, ...], tuple[Link, ...], int, float]] = [
        ((s,), (), all_free, 1.0)
    ]
    while frontier:
        nxt: list[tuple[tuple[str, ...], tuple[Link, ...], int, float]] = []
        for verts, links, bits, avail in frontier:
            u = verts[-1]
            for v, link in g.neighbors(u):
                if v in verts:
                    continue
                new_bits = bits & link.bitmap.bits
                if not is_feasible(SpectrumBitmap(size, new_bits), slots_needed):
                    continue
                new_avail = avail * link.availability
                if v == d:
                    found.append(
                        CandidatePath(
                            verts + (v,), links + (link,),
                            SpectrumBitmap(size, new_bits), new_avail,
                        )
                    )
                    if len(found) == k:
                        return found
                else:
                    nxt.append((verts + (v,), links + (link,), new_bits, new_avail))
        frontier = nxt
    return found


def select_best(paths: list[CandidatePath]) -> CandidatePath:
    """Highest availability; ties go to fewer hops, then vertex order."""
    if not paths:
        raise ValueError("no candidate paths to select from")
    return min(paths, key=lambda p: (-p.availability, p.hops, p.vertices))


@dataclass
class ProvisionResult:
    """Outcome of one provisioning attempt."""

    blocked: bool
    path: CandidatePath | None = None
    block: SlotBlock | None = None
    a_p_max: float = 0.0
    a_pp_max: float = 0.0
    needs_protection: bool = False
    protected: bool = False
    backup_paths: list = field(default_factory=list)
    protected_links: list = field(default_factory=list)


def rsacs_with_protection(
    g: NetworkGraph,
    lr: LightpathRequest,
    a_th: float,
    mode: str,
    wp_id: str,
    backup_registry=None,
    cycle_set=None,
) -> ProvisionResult:
    """Provision a working path, then protect it if its availability is low.

    The working path is kept even when protection cannot reach the
    threshold; the result records whether the threshold was met.
    """
    if not 0.0 < a_th <= 1.0:
        raise ValueError("a_th must lie in (0, 1]")
    if mode not in ("none", "dsbpss", "dcycles"):
        raise ValueError(f"unknown protection mode {mode!r}")

    paths = candidate_paths(g, lr.s, lr.d, lr.slots_needed, lr.k)
    if not paths:
        return ProvisionResult(blocked=True)
    best = select_best(paths)
    block = first_fit(best.bitmap, lr.slots_needed)
    allocate([link.bitmap for link in best.links], block)

    result = ProvisionResult(
        blocked=False, path=best, block=block,
        a_p_max=best.availability, a_pp_max=best.availability,
    )
    if best.availability >= a_th:
        result.protected = False
        return result

    result.needs_protection = True
    if mode == "dsbpss":
        from .dsbpss import provision_backups

        backups, a_pp = provision_backups(
            g, lr, best, backup_registry, wp_id, best.availability, a_th
        )
        result.backup_paths = backups
        result.a_pp_max = a_pp
        result.protected = a_pp >= a_th
    elif mode == "dcycles":
        from .dcycles import provision_cycles

        protected_links, a_pp = provision_cycles(
            g, lr, best, cycle_set, wp_id, best.availability, a_th
        )
        result.protected_links = protected_links or []
        result.a_pp_max = a_pp
        result.protected = a_pp >= a_th
    return result
