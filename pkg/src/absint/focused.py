"""Exact per-block cache analysis over younger-set antichains.

For one focus block the cache set is abstracted to "absent" or "present with
this set of younger blocks" — nothing else affects whether the next access to
the focus hits.  Collections of these configurations are kept as antichains:
for deciding whether a later miss is possible only maximal younger-sets
matter (a superset reaches eviction whenever a subset does), and for a later
hit only minimal ones.  Running the fixpoint once per orientation therefore
answers exists-miss and exists-hit exactly with respect to the control-flow
model, which is what the classifications below are built from.

The absent flag is only trusted from the KEEP_MAX run: the KEEP_MIN run drops
superset configurations, which can hide evictions that happen later (a
concrete instance demonstrating this lives in the regression tests).
"""

from __future__ import annotations

from dataclasses import dataclass

from .agebounds import ApproxClass, classify_all_approx
from .antichain import Antichain, Orientation
from .cfg import AccessLabel, Cfg
from .lru import Classification, InitPolicy

import itertools


@dataclass(frozen=True)
class BlockView:
    """Focused abstract state: may the block be absent, and with which
    younger-sets may it be present.  (False, empty) means unreached."""

    may_absent: bool
    younger: Antichain

    def is_bottom(self) -> bool:
        return not self.may_absent and len(self.younger) == 0

    def join(self, other: "BlockView") -> "BlockView":
        return BlockView(self.may_absent or other.may_absent, self.younger.union(other.younger))


def transfer(view: BlockView, accessed: int, focus: int, n: int) -> BlockView:
    """One access, on interned block indices.

    Accessing the focus makes it present and youngest.  Accessing another
    block leaves younger-sets containing it unchanged, grows the ones that
    still have room, and evicts the focus from the full ones.
    """
    if view.is_bottom():
        return view
    if accessed == focus:
        return BlockView(False, Antichain(view.younger.orientation, (0,)))
    bit = 1 << accessed
    limit = n - 1
    absent = view.may_absent
    out = Antichain.empty(view.younger.orientation)
    for mask in view.younger:
        if mask & bit:
            out = out.insert(mask)
        elif mask.bit_count() < limit:
            out = out.insert(mask | bit)
        else:
            absent = True
    return BlockView(absent, out)


def _initial_view(
    n: int,
    orientation: Orientation,
    init: InitPolicy,
    others: tuple[int, ...],
) -> BlockView:
    if init is InitPolicy.EMPTY:
        return BlockView(True, Antichain.empty(orientation))
    if orientation is Orientation.KEEP_MIN:
        return BlockView(True, Antichain(orientation, (0,)))
    size = min(n - 1, len(others))
    masks = sorted(sum(1 << i for i in combo) for combo in itertools.combinations(others, size))
    return BlockView(True, Antichain(orientation, tuple(masks)))


def analyze_block(
    cfg: Cfg,
    focus: str,
    n: int,
    orientation: Orientation,
    init: InitPolicy = InitPolicy.EMPTY,
) -> dict[str, BlockView]:
    """Least fixpoint of the focused transfer for one block.

    Blocks are interned to bit indices in sorted order, with one extra index
    for the fresh block of the unknown-initial-contents policy.  Non-access
    edges are no-ops.
    """
    blocks = cfg.blocks()
    if focus not in blocks:
        blocks = tuple(sorted(blocks + (focus,)))
    index = {b: i for i, b in enumerate(blocks)}
    focus_idx = index[focus]
    others = tuple(i for i in range(len(blocks) + 1) if i != focus_idx)

    bottom = BlockView(False, Antichain.empty(orientation))
    views: dict[str, BlockView] = {loc: bottom for loc in cfg.locations}
    views[cfg.entry] = _initial_view(n, orientation, init, others)
    work = [cfg.entry]
    while work:
        loc = work.pop(0)
        cur = views[loc]
        for edge in cfg.out(loc):
            if isinstance(edge.label, AccessLabel):
                out = transfer(cur, index[edge.label.block], focus_idx, n)
            else:
                out = cur
            old = views[edge.dst]
            new = old.join(out)
            if new != old:
                views[edge.dst] = new
                if edge.dst not in work:
                    work.append(edge.dst)
    return views


def classify_exact(
    cfg: Cfg, n: int, init: InitPolicy = InitPolicy.EMPTY, foci: set[str] | None = None
) -> dict[int, Classification]:
    """Exact classification: exists-miss from the KEEP_MAX run's absent flag,
    exists-hit from nonemptiness of the KEEP_MIN run's antichain."""
    wanted = cfg.blocks() if foci is None else tuple(sorted(foci))
    result: dict[int, Classification] = {}
    for focus in wanted:
        vmax = analyze_block(cfg, focus, n, Orientation.KEEP_MAX, init)
        vmin = analyze_block(cfg, focus, n, Orientation.KEEP_MIN, init)
        for edge in cfg.access_edges():
            label = edge.label
            assert isinstance(label, AccessLabel)
            if label.block != focus:
                continue
            exists_miss = vmax[edge.src].may_absent
            exists_hit = len(vmin[edge.src].younger) > 0
            if exists_hit and exists_miss:
                result[label.site] = Classification.VARIABLE
            elif exists_hit:
                result[label.site] = Classification.ALWAYS_HIT
            elif exists_miss:
                result[label.site] = Classification.ALWAYS_MISS
            else:
                result[label.site] = Classification.UNREACHABLE
    return result


_APPROX_TO_EXACT = {
    ApproxClass.ALWAYS_HIT: Classification.ALWAYS_HIT,
    ApproxClass.ALWAYS_MISS: Classification.ALWAYS_MISS,
}


def classify_pipeline(
    cfg: Cfg, n: int, init: InitPolicy = InitPolicy.EMPTY
) -> dict[int, tuple[Classification, str]]:
    """Prefilter with the cheap bounds, run the exact analysis only for blocks
    that still have unresolved sites, and tag each verdict with its source."""
    approx = classify_all_approx(cfg, n, init)
    result: dict[int, tuple[Classification, str]] = {}
    unresolved_blocks: set[str] = set()
    for edge in cfg.access_edges():
        label = edge.label
        assert isinstance(label, AccessLabel)
        verdict = approx[label.site]
        if verdict is ApproxClass.UNKNOWN:
            unresolved_blocks.add(label.block)
        else:
            result[label.site] = (_APPROX_TO_EXACT[verdict], "approx")
    if unresolved_blocks:
        exact = classify_exact(cfg, n, init, foci=unresolved_blocks)
        for site, verdict in exact.items():
            if site not in result:
                result[site] = (verdict, "exact")
    return result
