"""Ground-truth LRU semantics for one cache set.

A cache-set state is a sequence of at most N distinct block ids, youngest
first.  ``collect_states`` computes the exact collecting semantics (the set
of reachable states per location) by explicit enumeration, and
``classify_oracle`` derives per-site hit/miss classifications from it.  This
module is the reference every other cache analysis is validated against, so
it must stay exact: exceeding the state budget is an error, never an
approximation.
"""

from __future__ import annotations

import itertools
from enum import Enum

from .cfg import AccessLabel, Cfg

CacheState = tuple[str, ...]

#: Name used for the extra block of the "unknown initial contents" policy.
OTHER_BLOCK = "~other"


class InitPolicy(Enum):
    EMPTY = "empty"
    UNKNOWN = "unknown"


class Classification(Enum):
    ALWAYS_HIT = "always-hit"
    ALWAYS_MISS = "always-miss"
    VARIABLE = "variable"
    UNREACHABLE = "unreachable"


class OracleBudgetError(Exception):
    """The explicit-state oracle would need more states than allowed."""


def access(state: CacheState, block: str, n: int) -> CacheState:
    """Access `block`: it becomes youngest; on a fill, the oldest is evicted."""
    if n < 1:
        raise ValueError("associativity must be at least 1")
    if len(state) > n:
        raise ValueError("state longer than associativity")
    if block in state:
        rest = tuple(b for b in state if b != block)
        return (block,) + rest
    return ((block,) + state)[:n]


def is_hit(state: CacheState, block: str) -> bool:
    return block in state


def initial_states(blocks: tuple[str, ...], n: int, init: InitPolicy) -> set[CacheState]:
    if init is InitPolicy.EMPTY:
        return {()}
    universe = tuple(blocks) + (OTHER_BLOCK,)
    states: set[CacheState] = set()
    for r in range(min(n, len(universe)) + 1):
        states.update(itertools.permutations(universe, r))
    return states


def collect_states(
    cfg: Cfg,
    n: int,
    init: InitPolicy = InitPolicy.EMPTY,
    budget: int = 1_000_000,
    seed_states: set[CacheState] | None = None,
) -> dict[str, set[CacheState]]:
    """Least fixpoint of the concrete transfer over sets of cache states.

    Non-access edges are treated as no-ops (guard erasure), so graphs built
    from full programs can be passed directly.  `seed_states` overrides the
    entry seeding derived from `init`.
    """
    seeds = initial_states(cfg.blocks(), n, init) if seed_states is None else set(seed_states)
    reached: dict[str, set[CacheState]] = {cfg.entry: set(seeds)}
    total = len(seeds)
    if total > budget:
        raise OracleBudgetError(f"state budget {budget} exceeded at entry")
    # Frontier-based propagation: only states not yet seen at a location are
    # pushed across its outgoing edges.
    frontier: list[tuple[str, CacheState]] = [(cfg.entry, s) for s in sorted(seeds)]
    transfer_cache: dict[tuple[CacheState, str], CacheState] = {}
    while frontier:
        loc, state = frontier.pop()
        for edge in cfg.out(loc):
            if isinstance(edge.label, AccessLabel):
                key = (state, edge.label.block)
                nxt = transfer_cache.get(key)
                if nxt is None:
                    nxt = access(state, edge.label.block, n)
                    transfer_cache[key] = nxt
            else:
                nxt = state
            dst_states = reached.setdefault(edge.dst, set())
            if nxt not in dst_states:
                dst_states.add(nxt)
                total += 1
                if total > budget:
                    raise OracleBudgetError(f"state budget {budget} exceeded")
                frontier.append((edge.dst, nxt))
    return reached


def classify_oracle(
    cfg: Cfg,
    n: int,
    init: InitPolicy = InitPolicy.EMPTY,
    budget: int = 1_000_000,
) -> dict[int, Classification]:
    """Exact classification of every access site against `collect_states`."""
    reached = collect_states(cfg, n, init, budget)
    result: dict[int, Classification] = {}
    for edge in cfg.access_edges():
        label = edge.label
        assert isinstance(label, AccessLabel)
        states = reached.get(edge.src, set())
        if not states:
            result[label.site] = Classification.UNREACHABLE
            continue
        hit_possible = any(label.block in s for s in states)
        miss_possible = any(label.block not in s for s in states)
        if hit_possible and miss_possible:
            result[label.site] = Classification.VARIABLE
        elif hit_possible:
            result[label.site] = Classification.ALWAYS_HIT
        else:
            result[label.site] = Classification.ALWAYS_MISS
    return result
