"""Shared backup path protection with slot sharing.

A working path whose availability misses the threshold gets one or more
link-disjoint backup paths.  Backup slots reserved on a link may be shared
by several backup paths as long as every working path protected by those
slots is pairwise link-disjoint: a single link failure then affects at most
one of them, so the shared slots are never claimed twice.

Sharing is tracked per ShareGroup: one contiguous slot run on one link plus
the set of working paths it protects.  When a new reservation partially
overlaps an existing group, the group is split at the overlap boundaries so
that every group keeps a single well-defined member set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .rsa import CandidatePath, LightpathRequest, candidate_paths, select_best
from .spectrum import SlotBlock, first_fit, is_feasible, SpectrumBitmap
from .availability import ava_dsbpss_update
from .topology import Link, NetworkGraph, remove_links


class UnknownWorkingPathError(Exception):
    pass


@dataclass(frozen=True)
class BackupPath:
    id: str
    wp_id: str
    vertices: tuple[str, ...]
    links: tuple[Link, ...]
    block: SlotBlock
    availability: float

    def link_ids(self) -> frozenset[str]:
        return frozenset(link.id for link in self.links)


@dataclass
class ShareGroup:
    id: int
    backup_link: str
    block: SlotBlock
    protected_wps: set[str] = field(default_factory=set)
    owner_backups: set[str] = field(default_factory=set)

    def copy(self) -> "ShareGroup":
        return ShareGroup(
            self.id, self.backup_link, self.block,
            set(self.protected_wps), set(self.owner_backups),
        )


class BackupRegistry:
    """All live shared-backup state: groups per link and backups per working path."""

    def __init__(self) -> None:
        self.groups: dict[int, ShareGroup] = {}
        self.by_link: dict[str, list[int]] = {}
        self.by_wp: dict[str, list[BackupPath]] = {}
        self.wp_links: dict[str, frozenset[str]] = {}
        self.wp_groups: dict[str, set[int]] = {}
        self._gid = itertools.count(1)
        self._bpid = itertools.count(1)

    def is_empty(self) -> bool:
        return not self.groups and not self.by_wp

    def register_wp(self, wp_id: str, links: frozenset[str]) -> None:
        self.wp_links[wp_id] = links
        self.by_wp.setdefault(wp_id, [])
        self.wp_groups.setdefault(wp_id, set())

    def groups_on(self, link_id: str) -> list[ShareGroup]:
        return sorted(
            (self.groups[gid] for gid in self.by_link.get(link_id, [])),
            key=lambda grp: grp.block.start,
        )

    def conflicting_wps(self, new_wp_links: frozenset[str]) -> frozenset[str]:
        """Working paths that share a link with the newcomer (Cond. I/IV)."""
        return frozenset(
            wp for wp, links in self.wp_links.items() if links & new_wp_links
        )

    def can_share(self, group: ShareGroup, new_wp_links: frozenset[str]) -> bool:
        """Shareable iff the newcomer is link-disjoint from every protected WP."""
        return group.protected_wps.isdisjoint(self.conflicting_wps(new_wp_links))

    def join(self, group: ShareGroup, wp_id: str, bp_id: str) -> None:
        group.protected_wps.add(wp_id)
        group.owner_backups.add(bp_id)
        self.wp_groups.setdefault(wp_id, set()).add(group.id)

    def leave(self, group: ShareGroup, wp_id: str, bp_id: str | None = None) -> None:
        group.protected_wps.discard(wp_id)
        if bp_id is None:
            group.owner_backups = {
                bp for bp in group.owner_backups if not bp.startswith(f"{wp_id}/")
            }
        else:
            group.owner_backups.discard(bp_id)
        self.wp_groups.get(wp_id, set()).discard(group.id)

    def _add_group(self, group: ShareGroup) -> None:
        self.groups[group.id] = group
        self.by_link.setdefault(group.backup_link, []).append(group.id)
        for wp in group.protected_wps:
            self.wp_groups.setdefault(wp, set()).add(group.id)

    def _drop_group(self, group: ShareGroup) -> None:
        del self.groups[group.id]
        self.by_link[group.backup_link].remove(group.id)
        for wp in group.protected_wps:
            self.wp_groups.get(wp, set()).discard(group.id)

    def new_group(self, link_id: str, block: SlotBlock) -> ShareGroup:
        group = ShareGroup(next(self._gid), link_id, block)
        self._add_group(group)
        return group

    def split_group(self, group: ShareGroup, at: list[int]) -> list[ShareGroup]:
        """Split a group at the given interior slot boundaries, keeping members."""
        bounds = sorted({group.block.start, group.block.end, *at})
        pieces = []
        for lo, hi in zip(bounds, bounds[1:]):
            piece = ShareGroup(
                next(self._gid), group.backup_link, SlotBlock(lo, hi - lo),
                set(group.protected_wps), set(group.owner_backups),
            )
            pieces.append(piece)
        self._drop_group(group)
        for piece in pieces:
            self._add_group(piece)
        return pieces


def free_backup_slots(
    g_pruned: NetworkGraph,
    reg: BackupRegistry,
    new_wp_links: frozenset[str],
) -> NetworkGraph:
    """Search copy of the pruned graph with shareable backup slots marked free."""
    g = g_pruned.copy()
    conflicts = reg.conflicting_wps(new_wp_links)
    for lid, link in g.links.items():
        for gid in reg.by_link.get(lid, ()):
            group = reg.groups[gid]
            if group.protected_wps.isdisjoint(conflicts):
                link.bitmap.set_free(group.block)
    return g


def _reserve_on_link(
    reg: BackupRegistry,
    link: Link,
    block: SlotBlock,
    wp_id: str,
    bp_id: str,
    undo: list,
) -> None:
    """Claim ``block`` on one real link: join shareable groups, allocate the rest."""
    claimed = 0
    for group in reg.groups_on(link.id):
        if not group.block.overlaps(block):
            continue
        # The search bitmap only exposed shareable slots, so any overlap
        # must come from a shareable group.
        assert reg.can_share(group, reg.wp_links[wp_id])
        cuts = [b for b in (block.start, block.end)
                if group.block.start < b < group.block.end]
        pieces = [group]
        if cuts:
            snapshot = group.copy()
            pieces = reg.split_group(group, cuts)
            undo.append(("split", snapshot, [p.id for p in pieces]))
        for piece in pieces:
            if piece.block.overlaps(block):
                reg.join(piece, wp_id, bp_id)
                undo.append(("join", piece.id, wp_id, bp_id))
                claimed += piece.block.length
    if claimed == block.length:
        return
    # Remaining slots were genuinely free: mark busy, one new group per run.
    free_mask = block.mask() & link.bitmap.bits
    while free_mask:
        start = (free_mask & -free_mask).bit_length() - 1
        end = start
        while free_mask >> end & 1:
            end += 1
        run = SlotBlock(start, end - start)
        link.bitmap.set_busy(run)
        group = reg.new_group(link.id, run)
        reg.join(group, wp_id, bp_id)
        undo.append(("alloc", link, run, group.id))
        free_mask &= ~run.mask()


def _rollback(reg: BackupRegistry, undo: list) -> None:
    for entry in reversed(undo):
        tag = entry[0]
        if tag == "alloc":
            _, link, run, gid = entry
            link.bitmap.set_free(run)
            reg._drop_group(reg.groups[gid])
        elif tag == "join":
            _, gid, wp_id, bp_id = entry
            reg.leave(reg.groups[gid], wp_id, bp_id)
        elif tag == "split":
            _, snapshot, piece_ids = entry
            for pid in piece_ids:
                reg._drop_group(reg.groups[pid])
            reg._add_group(snapshot)


def provision_backups(
    g: NetworkGraph,
    lr: LightpathRequest,
    best_path: CandidatePath,
    reg: BackupRegistry,
    wp_id: str,
    a_pp_max: float,
    a_th: float,
) -> tuple[list[BackupPath], float]:
    """Stack link-disjoint shared backups until the threshold is met.

    Returns (backup paths, final availability).  If the candidates run out
    first, every reservation made here is rolled back and ([], original
    availability) is returned.
    """
    wp_links = best_path.link_ids()
    reg.register_wp(wp_id, wp_links)
    search_g = free_backup_slots(remove_links(g, list(best_path.links)), reg, wp_links)
    candidates = candidate_paths(search_g, lr.s, lr.d, lr.slots_needed, lr.k)

    a_pp = a_pp_max
    undo: list = []
    backups: list[BackupPath] = []
    while a_pp < a_th:
        if not candidates:
            _rollback(reg, undo)
            if not reg.by_wp.get(wp_id):
                release_wp(reg, wp_id, g)
            return [], a_pp_max
        chosen = select_best(candidates)
        candidates.remove(chosen)
        # Earlier reservations in this call may have consumed slots the
        # stale candidate bitmap still shows free; re-intersect on the live
        # search graph before committing.
        bits = (1 << search_g.slot_count) - 1
        for link in chosen.links:
            bits &= search_g.links[link.id].bitmap.bits
        live = SpectrumBitmap(search_g.slot_count, bits)
        if not is_feasible(live, lr.slots_needed):
            continue
        block = first_fit(live, lr.slots_needed)
        bp_id = f"{wp_id}/bp{next(reg._bpid)}"
        for link in chosen.links:
            _reserve_on_link(reg, g.links[link.id], block, wp_id, bp_id, undo)
            # Own reservations are not shareable with this same WP.
            search_g.links[link.id].bitmap.set_busy(block)
        bp = BackupPath(
            bp_id, wp_id, chosen.vertices,
            tuple(g.links[link.id] for link in chosen.links),
            block, chosen.availability,
        )
        backups.append(bp)
        a_pp = ava_dsbpss_update(a_pp, chosen.availability)
    reg.by_wp[wp_id] = backups
    return backups, a_pp


def release_wp(reg: BackupRegistry, wp_id: str, g: NetworkGraph) -> None:
    """Remove a departed working path from all its share groups.

    Groups left without protected working paths free their slots.
    """
    if wp_id not in reg.wp_links:
        raise UnknownWorkingPathError(wp_id)
    for gid in list(reg.wp_groups.get(wp_id, ())):
        group = reg.groups[gid]
        reg.leave(group, wp_id)
        if not group.protected_wps:
            g.links[group.backup_link].bitmap.set_free(group.block)
            reg._drop_group(group)
    reg.by_wp.pop(wp_id, None)
    reg.wp_groups.pop(wp_id, None)
    del reg.wp_links[wp_id]
