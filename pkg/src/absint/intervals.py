"""Textbook interval analysis: evaluation, guard refinement, widening and
narrowing over a labeled CFG.

Bounds are mathematical integers extended with symbolic infinities (no
floats anywhere).  The chaotic iteration widens at back-edge targets after a
configurable number of plain joins, then performs simultaneous decreasing
passes ("narrowing" in its simplest form: re-run the transfer from the
stabilized state and add the entry contribution).  Assertion verdicts are
read off the final state: an assertion is proved when refining with its
negation yields the unreachable environment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cfg import AssignLabel, AssumeLabel, Cfg, back_edge_targets
from .lang import BinOp, Cond, CondNondet, Const, Expr, Nondet, Var, negate_cond


class _Inf:
    """Symbolic infinity, totally ordered against integers."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __lt__(self, other):
        if isinstance(other, _Inf):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self < other or self is other

    def __gt__(self, other):
        if isinstance(other, _Inf):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self > other or self is other

    def __neg__(self):
        return NEG_INF if self.sign > 0 else POS_INF

    def __repr__(self):
        return "+oo" if self.sign > 0 else "-oo"


POS_INF = _Inf(1)
NEG_INF = _Inf(-1)

Bound = int | _Inf


def badd(a, b):
    """Extended addition; infinities absorb (never add opposite infinities)."""
    if isinstance(a, _Inf):
        if isinstance(b, _Inf) and b.sign != a.sign:
            raise ValueError("adding opposite infinities")
        return a
    if isinstance(b, _Inf):
        return b
    return a + b


def bneg(a):
    return -a


@dataclass(frozen=True)
class Interval:
    lo: Bound
    hi: Bound

    @staticmethod
    def make(lo, hi) -> "Interval":
        if lo > hi:
            return EMPTY
        return Interval(lo, hi)

    @staticmethod
    def top() -> "Interval":
        return TOP

    @staticmethod
    def const(c: int) -> "Interval":
        return Interval(c, c)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, v: int) -> bool:
        return self.lo <= v and v <= self.hi

    def join(self, other: "Interval") -> "Interval":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        return Interval.make(max(self.lo, other.lo), min(self.hi, other.hi))

    def subset(self, other: "Interval") -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def __repr__(self):
        if self.is_empty:
            return "empty"
        return f"[{self.lo}, {self.hi}]"


EMPTY = Interval(POS_INF, NEG_INF)
TOP = Interval(NEG_INF, POS_INF)


def widen(old: Interval, new: Interval) -> Interval:
    """Unstable bounds escape to infinity; always an upper bound of both."""
    if old.is_empty:
        return new
    if new.is_empty:
        return old
    lo = old.lo if old.lo <= new.lo else NEG_INF
    hi = old.hi if old.hi >= new.hi else POS_INF
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbstractEnv:
    """Per-variable intervals; any empty component collapses to unreachable."""

    intervals: tuple[tuple[str, Interval], ...] = ()
    bottom: bool = False

    @staticmethod
    def unreachable() -> "AbstractEnv":
        return BOTTOM_ENV

    @staticmethod
    def of(mapping: Mapping[str, Interval]) -> "AbstractEnv":
        items = tuple(sorted(mapping.items()))
        if any(iv.is_empty for _, iv in items):
            return BOTTOM_ENV
        return AbstractEnv(items)

    def as_dict(self) -> dict[str, Interval]:
        return dict(self.intervals)

    def get(self, var: str) -> Interval:
        for name, iv in self.intervals:
            if name == var:
                return iv
        return TOP

    def set(self, var: str, iv: Interval) -> "AbstractEnv":
        if self.bottom:
            return self
        if iv.is_empty:
            return BOTTOM_ENV
        d = self.as_dict()
        d[var] = iv
        return AbstractEnv(tuple(sorted(d.items())))

    def join(self, other: "AbstractEnv") -> "AbstractEnv":
        if self.bottom:
            return other
        if other.bottom:
            return self
        a, b = self.as_dict(), other.as_dict()
        return AbstractEnv.of({v: a.get(v, TOP).join(b.get(v, TOP)) for v in set(a) | set(b)})

    def widen(self, other: "AbstractEnv") -> "AbstractEnv":
        if self.bottom:
            return other
        if other.bottom:
            return self
        a, b = self.as_dict(), other.as_dict()
        return AbstractEnv.of({v: widen(a.get(v, TOP), b.get(v, TOP)) for v in set(a) | set(b)})


BOTTOM_ENV = AbstractEnv((), True)


def eval_expr(e: Expr, env: AbstractEnv) -> Interval:
    if env.bottom:
        return EMPTY
    if isinstance(e, Const):
        return Interval.const(e.value)
    if isinstance(e, Var):
        return env.get(e.name)
    if isinstance(e, Nondet):
        return TOP
    if isinstance(e, BinOp):
        left = eval_expr(e.left, env)
        right = eval_expr(e.right, env)
        if left.is_empty or right.is_empty:
            return EMPTY
        if e.op == "+":
            return Interval(badd(left.lo, right.lo), badd(left.hi, right.hi))
        return Interval(badd(left.lo, bneg(right.hi)), badd(left.hi, bneg(right.lo)))
    raise TypeError(f"unknown expression {e!r}")


def _bound_for(op: str, other: Interval) -> Interval:
    """States satisfying `x op other` for some value of `other`."""
    if op == "<":
        return Interval(NEG_INF, badd(other.hi, -1))
    if op == "<=":
        return Interval(NEG_INF, other.hi)
    if op == ">":
        return Interval(badd(other.lo, 1), POS_INF)
    if op == ">=":
        return Interval(other.lo, POS_INF)
    if op == "==":
        return other
    return TOP  # != handled separately


def _refine_var(env: AbstractEnv, var: str, op: str, other: Interval) -> AbstractEnv:
    cur = env.get(var)
    if op == "!=":
        # Only a definite single value can shave an endpoint.
        if not other.is_empty and other.lo == other.hi:
            c = other.lo
            if cur.lo == c:
                return env.set(var, Interval.make(badd(c, 1), cur.hi))
            if cur.hi == c:
                return env.set(var, Interval.make(cur.lo, badd(c, -1)))
        return env
    return env.set(var, cur.meet(_bound_for(op, other)))


_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def _feasible(op: str, left: Interval, right: Interval) -> bool:
    if left.is_empty or right.is_empty:
        return False
    if op == "<":
        return left.lo < right.hi
    if op == "<=":
        return left.lo <= right.hi
    if op == ">":
        return left.hi > right.lo
    if op == ">=":
        return left.hi >= right.lo
    if op == "==":
        return not left.meet(right).is_empty
    # !=: only two equal singletons are definitely equal
    return not (left.lo == left.hi == right.lo == right.hi)


def filter_cond(c: Cond, env: AbstractEnv) -> AbstractEnv:
    """Sound refinement by a condition.

    Keeps every state of `env` satisfying the condition.  Comparisons refine
    bare-variable sides exactly (with integer tightening of strict bounds);
    compound sides only contribute the feasibility check.  `*` filters
    nothing.
    """
    if env.bottom or isinstance(c, CondNondet):
        return env
    left = eval_expr(c.left, env)
    right = eval_expr(c.right, env)
    if not _feasible(c.op, left, right):
        return BOTTOM_ENV
    out = env
    if isinstance(c.left, Var):
        out = _refine_var(out, c.left.name, c.op, right)
    if isinstance(c.right, Var) and not out.bottom:
        out = _refine_var(out, c.right.name, _FLIP[c.op], left)
    return out


# ---------------------------------------------------------------------------
# Fixpoint engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssertVerdict:
    sid: int
    loc: str
    proved: bool


@dataclass(frozen=True)
class AnalysisResult:
    envs: dict[str, AbstractEnv]
    asserts: tuple[AssertVerdict, ...]


def _edge_transfer(label, env: AbstractEnv) -> AbstractEnv:
    if env.bottom:
        return env
    if isinstance(label, AssignLabel):
        return env.set(label.var, eval_expr(label.expr, env))
    if isinstance(label, AssumeLabel):
        return filter_cond(label.cond, env)
    return env


def check_cache_free(cfg: Cfg) -> None:
    if cfg.has_access():
        raise ValueError("numeric analyses require a cache-free graph")


def analyze(
    cfg: Cfg,
    entry_env: AbstractEnv,
    widen_delay: int = 0,
    narrow_passes: int = 0,
) -> AnalysisResult:
    check_cache_free(cfg)
    widen_points = back_edge_targets(cfg)
    envs: dict[str, AbstractEnv] = {loc: BOTTOM_ENV for loc in cfg.locations}
    incoming: dict[str, list] = {loc: [] for loc in cfg.locations}
    for e in cfg.edges:
        incoming[e.dst].append(e)

    def candidate(loc: str, state: dict[str, AbstractEnv]) -> AbstractEnv:
        acc = entry_env if loc == cfg.entry else BOTTOM_ENV
        for e in incoming[loc]:
            acc = acc.join(_edge_transfer(e.label, state[e.src]))
        return acc

    # widen_delay counts actual updates at a widening point, not visits
    joins_done: dict[str, int] = {loc: 0 for loc in cfg.locations}
    work = list(cfg.locations)
    while work:
        loc = work.pop(0)
        cand = candidate(loc, envs)
        old = envs[loc]
        if loc in widen_points and joins_done[loc] > widen_delay:
            new = old.widen(old.join(cand))
        else:
            new = old.join(cand)
        if new != old:
            joins_done[loc] += 1
            envs[loc] = new
            for e in cfg.out(loc):
                if e.dst not in work:
                    work.append(e.dst)

    for _ in range(narrow_passes):
        # Simultaneous decreasing pass from the current post-fixpoint.
        envs = {loc: candidate(loc, envs) for loc in cfg.locations}

    verdicts = []
    for site in cfg.asserts:
        refuted = filter_cond(negate_cond(site.cond), envs[site.loc])
        verdicts.append(AssertVerdict(site.sid, site.loc, refuted.bottom))
    return AnalysisResult(envs, tuple(verdicts))


def entry_environment(program) -> AbstractEnv:
    """Default entry state: initialized declarations pinned, the rest top."""
    return AbstractEnv.of(
        {d.name: Interval.const(d.init.value) if d.init is not None else TOP for d in program.decls}
    )


__all__ = [
    "POS_INF",
    "NEG_INF",
    "badd",
    "Interval",
    "EMPTY",
    "TOP",
    "widen",
    "AbstractEnv",
    "BOTTOM_ENV",
    "eval_expr",
    "filter_cond",
    "analyze",
    "AnalysisResult",
    "AssertVerdict",
    "entry_environment",
]
