"""Cheap must/may age analysis used as a prefilter for the exact analysis.

Classical LRU age bounds:

* must map: block -> upper bound on its age (0..N-1).  A block in the must
  map is present, with at most that age, in every concrete state.
* may map: block -> lower bound on its age while present.  A block absent
  from the may map occurs in no concrete state at all.

Both are sound and cheap, but joins lose ordering information, so some
always-hit / always-miss sites come out Unknown; those are what the exact
analysis is for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .cfg import AccessLabel, Cfg
from .lru import InitPolicy


class ApproxClass(Enum):
    ALWAYS_HIT = "always-hit"
    ALWAYS_MISS = "always-miss"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class AgeBounds:
    must: dict[str, int] = field(default_factory=dict)
    may: dict[str, int] = field(default_factory=dict)

    def join(self, other: "AgeBounds") -> "AgeBounds":
        must = {
            b: max(k, other.must[b])
            for b, k in self.must.items()
            if b in other.must
        }
        may = dict(other.may)
        for b, k in self.may.items():
            may[b] = min(k, may[b]) if b in may else k
        return AgeBounds(must, may)


def _transfer(bounds: AgeBounds, block: str, n: int) -> AgeBounds:
    # Upper bounds: a block ages only when something at least as young as its
    # bound allows the accessed block to have been older; with kb the accessed
    # block's prior upper bound (infinite if unbounded), k < kb forces k+1.
    kb = bounds.must.get(block)
    must: dict[str, int] = {}
    for b, k in bounds.must.items():
        if b == block:
            continue
        nk = k + 1 if (kb is None or k < kb) else k
        if nk < n:
            must[b] = nk
    must[block] = 0
    # Lower bounds: ages never decrease; they provably increase when the
    # accessed block's prior lower bound is at least the block's own (distinct
    # blocks have distinct ages).  A block absent from the may map is absent
    # from every state, which ages everything present.
    lb = bounds.may.get(block)
    may: dict[str, int] = {}
    for b, k in bounds.may.items():
        if b == block:
            continue
        nk = k + 1 if (lb is None or lb >= k) else k
        if nk < n:
            may[b] = nk
    may[block] = 0
    return AgeBounds(must, may)


def initial_bounds(cfg: Cfg, init: InitPolicy) -> AgeBounds:
    if init is InitPolicy.EMPTY:
        return AgeBounds({}, {})
    return AgeBounds({}, {b: 0 for b in cfg.blocks()})


def analyze_approx(
    cfg: Cfg, n: int, init: InitPolicy = InitPolicy.EMPTY
) -> dict[str, AgeBounds | None]:
    """Fixpoint of the must/may transfer; None marks unreached locations."""
    bounds: dict[str, AgeBounds | None] = {loc: None for loc in cfg.locations}
    bounds[cfg.entry] = initial_bounds(cfg, init)
    work = [cfg.entry]
    while work:
        loc = work.pop(0)
        cur = bounds[loc]
        assert cur is not None
        for edge in cfg.out(loc):
            if isinstance(edge.label, AccessLabel):
                out = _transfer(cur, edge.label.block, n)
            else:
                out = cur
            old = bounds[edge.dst]
            new = out if old is None else old.join(out)
            if new != old:
                bounds[edge.dst] = new
                if edge.dst not in work:
                    work.append(edge.dst)
    return bounds


def classify_approx(bounds: AgeBounds | None, block: str, n: int) -> ApproxClass:
    """Classify one access from the bounds at its source location."""
    if bounds is None:
        return ApproxClass.UNKNOWN
    if block in bounds.must:
        return ApproxClass.ALWAYS_HIT
    if block not in bounds.may:
        return ApproxClass.ALWAYS_MISS
    return ApproxClass.UNKNOWN


def classify_all_approx(
    cfg: Cfg, n: int, init: InitPolicy = InitPolicy.EMPTY
) -> dict[int, ApproxClass]:
    bounds = analyze_approx(cfg, n, init)
    out: dict[int, ApproxClass] = {}
    for edge in cfg.access_edges():
        label = edge.label
        assert isinstance(label, AccessLabel)
        out[label.site] = classify_approx(bounds[edge.src], label.block, n)
    return out
