"""Optical network graph: links with spectrum bitmaps and availabilities.

Vertices are plain strings.  A link is identified by the sorted pair of its
endpoint names joined with "-", so the graph is simple by construction.
Link lengths are carried for reporting only; routing and availability never
consume them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectrum import SpectrumBitmap

DEFAULT_SLOT_COUNT = 320
DEFAULT_MTTF_H = 8760.0


class TopologyError(Exception):
    pass


class TopologyParseError(TopologyError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateLinkError(TopologyError):
    pass


class DisconnectedGraphError(TopologyError):
    pass


class UnknownLinkError(TopologyError):
    pass


def link_id(u: str, v: str) -> str:
    a, b = sorted((u, v))
    return f"{a}-{b}"


def _mttr_for(availability: float, mttf_h: float) -> float:
    return mttf_h * (1.0 - availability) / availability


@dataclass
class Link:
    """One bidirectional fiber link with its spectrum state."""

    id: str
    u: str
    v: str
    length_km: float
    mttf_h: float
    mttr_h: float
    bitmap: SpectrumBitmap

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise TopologyError(f"self-loop on vertex {self.u}")
        if self.length_km <= 0:
            raise TopologyError(f"non-positive length on link {self.id}")
        if self.mttf_h <= 0 or self.mttr_h < 0:
            raise TopologyError(f"bad mttf/mttr on link {self.id}")

    @property
    def availability(self) -> float:
        return self.mttf_h / (self.mttf_h + self.mttr_h)

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u

    def copy(self) -> "Link":
        return Link(
            self.id, self.u, self.v, self.length_km,
            self.mttf_h, self.mttr_h, self.bitmap.copy(),
        )


class AvailabilityPolicy:
    """Assigns per-link availabilities; subclasses define the draw."""

    def availabilities(self, n: int) -> list[float]:
        raise NotImplementedError


@dataclass
class UniformAvailability(AvailabilityPolicy):
    """Every link gets the same availability."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 < self.value <= 1.0:
            raise ValueError("availability must lie in (0, 1]")

    def availabilities(self, n: int) -> list[float]:
        return [self.value] * n


@dataclass
class JitteredAvailability(AvailabilityPolicy):
    """Per-link availabilities drawn uniformly around a target average.

    The jitter half-width is half the gap between the target and the next
    "nine" level (1 - (1-a)/10), clipped so no link exceeds 1.  The draw is
    seeded for reproducibility.
    """

    target: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.target <= 1.0:
            raise ValueError("availability must lie in (0, 1]")

    @property
    def half_width(self) -> float:
        next_nine = 1.0 - (1.0 - self.target) / 10.0
        return (next_nine - self.target) / 2.0

    def availabilities(self, n: int) -> list[float]:
        rng = np.random.default_rng(self.seed)
        lo = self.target - self.half_width
        hi = min(self.target + self.half_width, 1.0)
        return [float(a) for a in rng.uniform(lo, hi, size=n)]


@dataclass
class NetworkGraph:
    """Undirected simple graph of optical links."""

    slot_count: int = DEFAULT_SLOT_COUNT
    vertices: list[str] = field(default_factory=list)
    links: dict[str, Link] = field(default_factory=dict)
    adjacency: dict[str, list[str]] = field(default_factory=dict)

    def add_vertex(self, name: str) -> None:
        if name not in self.adjacency:
            self.vertices.append(name)
            self.adjacency[name] = []

    def add_link(
        self,
        u: str,
        v: str,
        length_km: float,
        availability: float = 1.0,
        mttf_h: float = DEFAULT_MTTF_H,
    ) -> Link:
        lid = link_id(u, v)
        if lid in self.links:
            raise DuplicateLinkError(f"link {lid} already present")
        self.add_vertex(u)
        self.add_vertex(v)
        link = Link(
            lid, *sorted((u, v)), length_km,
            mttf_h, _mttr_for(availability, mttf_h),
            SpectrumBitmap(self.slot_count),
        )
        self.links[lid] = link
        self.adjacency[u].append(lid)
        self.adjacency[v].append(lid)
        return link

    def link_between(self, u: str, v: str) -> Link | None:
        return self.links.get(link_id(u, v))

    def neighbors(self, u: str) -> list[tuple[str, Link]]:
        """Adjacent (vertex, link) pairs, sorted by vertex name."""
        out = [(self.links[lid].other(u), self.links[lid]) for lid in self.adjacency[u]]
        out.sort(key=lambda t: t[0])
        return out

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            u = stack.pop()
            for v, _ in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.vertices)

    def busy_slot_count(self) -> int:
        return sum(link.bitmap.busy_count() for link in self.links.values())

    def all_free(self) -> bool:
        return self.busy_slot_count() == 0

    def copy(self) -> "NetworkGraph":
        g = NetworkGraph(self.slot_count)
        g.vertices = list(self.vertices)
        g.links = {lid: link.copy() for lid, link in self.links.items()}
        g.adjacency = {v: list(lids) for v, lids in self.adjacency.items()}
        return g

    def structure(self) -> tuple:
        """Vertices, endpoints and lengths only; ignores spectrum and availability."""
        return (
            tuple(sorted(self.vertices)),
            tuple(sorted((l.id, l.length_km) for l in self.links.values())),
        )


# 14-node, 22-link NSFNET with distances in km.
NSFNET_LINKS = [
    ("1", "2", 1050), ("1", "3", 1500), ("1", "8", 2400),
    ("2", "3", 600), ("2", "4", 750),
    ("3", "6", 1800),
    ("4", "5", 600), ("4", "11", 1950),
    ("5", "6", 1200), ("5", "7", 600),
    ("6", "10", 1050), ("6", "14", 1800),
    ("7", "8", 750), ("7", "10", 1350),
    ("8", "9", 750),
    ("9", "10", 750), ("9", "12", 300), ("9", "13", 300),
    ("11", "12", 600), ("11", "13", 750),
    ("12", "14", 300), ("13", "14", 150),
]


def build_nsfnet(
    slot_count: int = DEFAULT_SLOT_COUNT,
    policy: AvailabilityPolicy | None = None,
    mttf_h: float = DEFAULT_MTTF_H,
) -> NetworkGraph:
    """The built-in 14-node/22-link NSFNET, all slots free."""
    if slot_count < 1:
        raise ValueError("slot_count must be >= 1")
    if policy is None:
        policy = UniformAvailability(1.0)
    g = NetworkGraph(slot_count)
    for n in range(1, 15):
        g.add_vertex(str(n))
    avails = policy.availabilities(len(NSFNET_LINKS))
    for (u, v, km), a in zip(NSFNET_LINKS, avails):
        g.add_link(u, v, km, availability=a, mttf_h=mttf_h)
    return g


def load_topology(
    text: str,
    slot_count: int = DEFAULT_SLOT_COUNT,
    policy: AvailabilityPolicy | None = None,
    mttf_h: float = DEFAULT_MTTF_H,
) -> NetworkGraph:
    """Parse the line-based topology format.

    Lines: ``node <name>``, ``link <u> <v> <length_km> [availability]``,
    ``#`` starts a comment.  Links without an explicit availability get one
    from ``policy``.
    """
    g = NetworkGraph(slot_count)
    pending: list[tuple[int, str, str, float, float | None]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 2:
                raise TopologyParseError(line_no, "node takes exactly one name")
            g.add_vertex(parts[1])
        elif parts[0] == "link":
            if len(parts) not in (4, 5):
                raise TopologyParseError(line_no, "link takes: u v length_km [availability]")
            u, v = parts[1], parts[2]
            try:
                km = float(parts[3])
                a = float(parts[4]) if len(parts) == 5 else None
            except ValueError as exc:
                raise TopologyParseError(line_no, str(exc)) from exc
            if a is not None and not 0.0 < a <= 1.0:
                raise TopologyParseError(line_no, "availability must lie in (0, 1]")
            pending.append((line_no, u, v, km, a))
        else:
            raise TopologyParseError(line_no, f"unknown directive {parts[0]!r}")

    n_missing = sum(1 for item in pending if item[4] is None)
    drawn = iter(policy.availabilities(n_missing) if policy and n_missing else [])
    for line_no, u, v, km, a in pending:
        if a is None:
            if policy is None:
                raise TopologyParseError(
                    line_no, f"link {u} {v} has no availability and no policy was given"
                )
            a = next(drawn)
        try:
            g.add_link(u, v, km, availability=a, mttf_h=mttf_h)
        except DuplicateLinkError as exc:
            raise TopologyParseError(line_no, str(exc)) from exc
    if not g.is_connected():
        raise DisconnectedGraphError("topology is not connected")
    return g


def remove_links(g: NetworkGraph, links: list[Link]) -> NetworkGraph:
    """Working copy of ``g`` with the given links absent; ``g`` is unchanged."""
    ids = []
    for link in links:
        if link.id not in g.links:
            raise UnknownLinkError(f"link {link.id} not in graph")
        ids.append(link.id)
    gone = set(ids)
    out = NetworkGraph(g.slot_count)
    out.vertices = list(g.vertices)
    out.links = {lid: link.copy() for lid, link in g.links.items() if lid not in gone}
    out.adjacency = {
        v: [lid for lid in lids if lid not in gone] for v, lids in g.adjacency.items()
    }
    return out
