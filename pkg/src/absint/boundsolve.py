"""Exact least-fixpoint solving of min/max/plus-constant bound equations.

Programs in a restricted fragment (assignments ``v = c`` and ``v = v + c``,
guards comparing ``v`` with constants, joins, loops) induce one equation per
location for the least inductive upper bound of ``v`` there: guards that cap
the bound contribute ``min``, joins contribute ``max``, increments add a
constant, and the entry contributes its bound as a constant.  Lower bounds
come from the same machinery run on the negated program (``v -> -v``), so
there is a single solving code path.

Two independent solvers compute the least solution over ZZ extended with
symbolic infinities:

* ``solve_exhaustive`` enumerates argument selections of every min/max node,
  solves each induced chain system, and keeps solutions that actually solve
  the original equations; the pointwise least survivor is the least fixpoint.
* ``solve_policy_iteration`` ascends through selections of the max nodes
  only, solving each induced min-system by Kleene iteration with a jump to
  +oo past the largest value any finite fixpoint component can take.

Both must agree with each other and, on bounded programs, with the
explicit-state enumeration ``bounded_concrete_oracle``.

A caveat that matters for exactness: an equation in this language cannot
express "bottom unless the guard is satisfiable" (every expressible map moves
by at most one when its input moves by one, but that gate needs an infinite
jump).  Guards therefore refine only the bound they cap and pass through
otherwise, which matches the least inductive invariant exactly whenever every
guard edge is live at that invariant; a dead guard can only make the solved
bound larger, never smaller.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping

from .cfg import AccessLabel, AssignLabel, AssumeLabel, Cfg, Nop
from .intervals import NEG_INF, POS_INF, _Inf, Interval
from .lang import BinOp, Cmp, CondNondet, Const, Expr, Var, pretty_cond
from .lru import OracleBudgetError

Value = int | _Inf


class UnsupportedConstructError(Exception):
    """The graph leaves the extractable fragment; names the offending label."""


class CapExceededError(Exception):
    """The exhaustive solver refuses systems with too many min/max nodes."""


class RangeExceededError(Exception):
    """The concrete oracle saw a value outside its declared range."""


# ---------------------------------------------------------------------------
# Expressions and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BConst:
    value: Value


@dataclass(frozen=True)
class BRef:
    name: str


@dataclass(frozen=True)
class BAdd:
    expr: "BoundExpr"
    offset: int


@dataclass(frozen=True)
class BMin:
    left: "BoundExpr"
    right: "BoundExpr"


@dataclass(frozen=True)
class BMax:
    left: "BoundExpr"
    right: "BoundExpr"


BoundExpr = BConst | BRef | BAdd | BMin | BMax


def vadd(a: Value, c: int) -> Value:
    return a if isinstance(a, _Inf) else a + c


def badd_expr(e: BoundExpr, c: int) -> BoundExpr:
    if c == 0:
        return e
    if isinstance(e, BConst):
        return BConst(vadd(e.value, c))
    if isinstance(e, BAdd):
        return badd_expr(e.expr, e.offset + c)
    return BAdd(e, c)


def bmin(a: BoundExpr, b: BoundExpr) -> BoundExpr:
    if a == b:
        return a
    if isinstance(a, BConst):
        if a.value is POS_INF:
            return b
        if a.value is NEG_INF:
            return a
        if isinstance(b, BConst):
            return a if a.value <= b.value else b
    if isinstance(b, BConst):
        if b.value is POS_INF:
            return a
        if b.value is NEG_INF:
            return b
    return BMin(a, b)


def bmax(a: BoundExpr, b: BoundExpr) -> BoundExpr:
    if a == b:
        return a
    if isinstance(a, BConst):
        if a.value is NEG_INF:
            return b
        if a.value is POS_INF:
            return a
        if isinstance(b, BConst):
            return a if a.value >= b.value else b
    if isinstance(b, BConst):
        if b.value is NEG_INF:
            return a
        if b.value is POS_INF:
            return b
    return BMax(a, b)


@dataclass(frozen=True)
class BoundSystem:
    """Equations in insertion order; every referenced variable is defined."""

    equations: tuple[tuple[str, BoundExpr], ...]

    def as_dict(self) -> dict[str, BoundExpr]:
        return dict(self.equations)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.equations)


def eval_bexpr(e: BoundExpr, valuation: Mapping[str, Value]) -> Value:
    if isinstance(e, BConst):
        return e.value
    if isinstance(e, BRef):
        return valuation[e.name]
    if isinstance(e, BAdd):
        return vadd(eval_bexpr(e.expr, valuation), e.offset)
    if isinstance(e, BMin):
        return min(eval_bexpr(e.left, valuation), eval_bexpr(e.right, valuation))
    if isinstance(e, BMax):
        return max(eval_bexpr(e.left, valuation), eval_bexpr(e.right, valuation))
    raise TypeError(f"unknown bound expression {e!r}")


def is_fixpoint(system: BoundSystem, valuation: Mapping[str, Value]) -> bool:
    return all(eval_bexpr(rhs, valuation) == valuation[name] for name, rhs in system.equations)


# ---------------------------------------------------------------------------
# Extraction from CFGs
# ---------------------------------------------------------------------------


def _expr_shape(e: Expr, var: str) -> tuple[str, int]:
    """Classify an assignment right-hand side as ("const", c) or ("inc", c)."""
    if isinstance(e, Const):
        return ("const", e.value)
    if isinstance(e, Var) and e.name == var:
        return ("inc", 0)
    if isinstance(e, BinOp) and isinstance(e.left, Var) and e.left.name == var and isinstance(e.right, Const):
        return ("inc", e.right.value if e.op == "+" else -e.right.value)
    if isinstance(e, BinOp) and e.op == "+" and isinstance(e.right, Var) and e.right.name == var and isinstance(e.left, Const):
        return ("inc", e.left.value)
    raise UnsupportedConstructError(f"assignment to {var!r} outside the fragment: {e!r}")


def _guard_atom(cond: Cmp, var: str) -> tuple[str, int] | None:
    """Normalize to (relop, c) meaning `var relop c`.  Constant comparisons
    yield None when identically true and ("false", 0) when identically
    false."""
    left, op, right = cond.left, cond.op, cond.right
    if isinstance(left, Const) and isinstance(right, Const):
        holds = {
            "<": left.value < right.value,
            "<=": left.value <= right.value,
            "==": left.value == right.value,
            "!=": left.value != right.value,
            ">=": left.value >= right.value,
            ">": left.value > right.value,
        }[op]
        return None if holds else ("false", 0)
    if isinstance(left, Var) and isinstance(right, Const):
        if left.name != var:
            raise UnsupportedConstructError(f"guard on foreign variable: {pretty_cond(cond)!r}")
        return (op, right.value)
    if isinstance(left, Const) and isinstance(right, Var):
        if right.name != var:
            raise UnsupportedConstructError(f"guard on foreign variable: {pretty_cond(cond)!r}")
        flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}
        return (flip[op], left.value)
    raise UnsupportedConstructError(f"guard outside the fragment: {pretty_cond(cond)!r}")


def extract_upper_bounds(
    cfg: Cfg, var: str, entry_bound: Value, negate: bool = False
) -> BoundSystem:
    """One equation per location for the least upper bound of `var`.

    With ``negate=True`` the graph is read as operating on ``-var`` (constants
    and increments flip sign, guard directions reverse), which turns the same
    extraction into a lower-bound solver; `entry_bound` must already be the
    bound of the negated variable in that case.
    """
    sign = -1 if negate else 1
    contribs: dict[str, list[BoundExpr]] = {loc: [] for loc in cfg.locations}
    for edge in cfg.edges:
        base: BoundExpr = BRef(edge.src)
        label = edge.label
        if isinstance(label, Nop):
            expr = base
        elif isinstance(label, AccessLabel):
            raise UnsupportedConstructError("memory access in a numeric fragment graph")
        elif isinstance(label, AssignLabel):
            if label.var != var:
                raise UnsupportedConstructError(
                    f"assignment to foreign variable {label.var!r}"
                )
            shape, c = _expr_shape(label.expr, var)
            expr = BConst(sign * c) if shape == "const" else badd_expr(base, sign * c)
        elif isinstance(label, AssumeLabel):
            cond = label.cond
            if isinstance(cond, CondNondet):
                expr = base
            else:
                atom = _guard_atom(cond, var)
                if atom is None:
                    expr = base
                elif atom[0] == "false":
                    expr = BConst(NEG_INF)
                else:
                    op, c = atom
                    if op in ("==", "!="):
                        # An equality's complement shaves one endpoint, which
                        # no min/max/plus-constant expression can do exactly.
                        raise UnsupportedConstructError(
                            f"(dis)equality guard outside the fragment: {pretty_cond(cond)!r}"
                        )
                    if negate:
                        op = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}[op]
                        c = -c
                    if op == "<":
                        expr = bmin(base, BConst(c - 1))
                    elif op == "<=":
                        expr = bmin(base, BConst(c))
                    else:  # > or >=: no upper refinement is expressible
                        expr = base
        else:
            raise UnsupportedConstructError(f"unknown label {label!r}")
        contribs[edge.dst].append(expr)
    equations: list[tuple[str, BoundExpr]] = []
    for loc in cfg.locations:
        if loc == cfg.entry:
            rhs: BoundExpr = BConst(entry_bound)
        else:
            ins = contribs[loc]
            rhs = BConst(NEG_INF)
            for e in ins:
                rhs = bmax(rhs, e)
        equations.append((loc, rhs))
    return BoundSystem(tuple(equations))


# ---------------------------------------------------------------------------
# Textual dump format
# ---------------------------------------------------------------------------


def dump_expr(e: BoundExpr) -> str:
    if isinstance(e, BConst):
        if isinstance(e.value, _Inf):
            return "+oo" if e.value.sign > 0 else "-oo"
        return str(e.value)
    if isinstance(e, BRef):
        return e.name
    if isinstance(e, BAdd):
        if e.offset >= 0:
            return f"{dump_expr(e.expr)} + {e.offset}"
        return f"{dump_expr(e.expr)} - {-e.offset}"
    if isinstance(e, BMin):
        return f"min({dump_expr(e.left)}, {dump_expr(e.right)})"
    if isinstance(e, BMax):
        return f"max({dump_expr(e.left)}, {dump_expr(e.right)})"
    raise TypeError(f"unknown bound expression {e!r}")


def dump_system(system: BoundSystem) -> str:
    return "".join(f"{name} = {dump_expr(rhs)}\n" for name, rhs in system.equations)


_TOKEN_RE = re.compile(r"\s*(min\(|max\(|[+-]?\d+|\+oo|-oo|[A-Za-z_][A-Za-z0-9_]*|[(),+-])")


class _ExprParser:
    def __init__(self, text: str):
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ValueError(f"cannot tokenize bound expression at {text[pos:]!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, t: str) -> None:
        got = self.next()
        if got != t:
            raise ValueError(f"expected {t!r}, got {got!r}")

    def expr(self) -> BoundExpr:
        e = self.primary()
        while True:
            nxt = self.peek()
            if nxt in ("+", "-"):
                op = self.next()
                t = self.next()
                if not re.fullmatch(r"[+-]?\d+", t):
                    raise ValueError(f"expected integer offset, got {t!r}")
                off = int(t)
                e = badd_expr(e, off if op == "+" else -off)
            elif nxt is not None and re.fullmatch(r"[+-]\d+", nxt):
                # unspaced offsets tokenize as one signed number
                e = badd_expr(e, int(self.next()))
            else:
                return e

    def primary(self) -> BoundExpr:
        t = self.next()
        if t in ("min(", "max("):
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return BMin(left, right) if t == "min(" else BMax(left, right)
        if t == "+oo":
            return BConst(POS_INF)
        if t == "-oo":
            return BConst(NEG_INF)
        if re.fullmatch(r"[+-]?\d+", t):
            return BConst(int(t))
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t):
            return BRef(t)
        raise ValueError(f"unexpected token {t!r}")


def parse_system(text: str) -> BoundSystem:
    equations = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, rhs = line.partition("=")
        p = _ExprParser(rhs)
        e = p.expr()
        if p.peek() is not None:
            raise ValueError(f"trailing tokens in {raw!r}")
        equations.append((name.strip(), e))
    return BoundSystem(tuple(equations))


# ---------------------------------------------------------------------------
# Exhaustive case analysis
# ---------------------------------------------------------------------------


def _selector_nodes(system: BoundSystem) -> list[tuple[str, tuple[int, ...]]]:
    nodes: list[tuple[str, tuple[int, ...]]] = []

    def walk(e: BoundExpr, name: str, path: tuple[int, ...]) -> None:
        if isinstance(e, (BMin, BMax)):
            nodes.append((name, path))
            walk(e.left, name, path + (0,))
            walk(e.right, name, path + (1,))
        elif isinstance(e, BAdd):
            walk(e.expr, name, path + (0,))

    for name, rhs in system.equations:
        walk(rhs, name, ())
    return nodes


def _resolve(e: BoundExpr, name: str, path: tuple[int, ...], pick) -> tuple[str, object, int]:
    """Reduce under a selection to ("const", v, 0) or ("ref", w, offset)."""
    if isinstance(e, BConst):
        return ("const", e.value, 0)
    if isinstance(e, BRef):
        return ("ref", e.name, 0)
    if isinstance(e, BAdd):
        kind, payload, off = _resolve(e.expr, name, path + (0,), pick)
        if kind == "const":
            return ("const", vadd(payload, e.offset), 0)
        return ("ref", payload, off + e.offset)
    chosen = pick(name, path)
    child = e.left if chosen == 0 else e.right
    return _resolve(child, name, path + (chosen,), pick)


def _resolve_links(
    names: tuple[str, ...], links: dict[str, tuple[str, object, int]]
) -> tuple[dict[str, tuple], int]:
    """Resolve the functional graph of a selection.

    Returns per-variable either ("const", value) or ("cycle", k, offset):
    the variable equals the k-th cycle's representative plus offset.  Walks
    each chain once; all members of a walked path relate linearly to its
    terminal.
    """
    resolution: dict[str, tuple] = {}
    n_cycles = 0
    for start in names:
        if start in resolution:
            continue
        path: list[str] = []
        depth: dict[str, int] = {}
        shift: list[int] = []  # shift[i]: start = path[i] + shift[i]
        cur = start
        acc = 0
        terminal: tuple | None = None
        while True:
            if cur in resolution:
                res = resolution[cur]
                if res[0] == "const":
                    base = res[1]
                    terminal = ("const", base, acc)
                else:
                    terminal = ("cycle", res[1], res[2], acc)
                break
            if cur in depth:
                # Closed cycle entered at depth[cur]; its members (and the
                # prefix leading in) all relate to the representative `cur`.
                k = n_cycles
                n_cycles += 1
                rep_shift = shift[depth[cur]]
                for v, s in zip(path, shift):
                    # v = rep + (rep_shift - s)
                    resolution[v] = ("cycle", k, rep_shift - s)
                terminal = None
                break
            depth[cur] = len(path)
            path.append(cur)
            shift.append(acc)
            kind, payload, off = links[cur]
            if kind == "const":
                terminal = ("const", payload, acc + off)
                break
            acc += off
            cur = payload
        if terminal is not None:
            if terminal[0] == "const":
                _, base, end_shift = terminal
                for v, s in zip(path, shift):
                    resolution[v] = (
                        "const",
                        base if isinstance(base, _Inf) else base + (end_shift - s),
                    )
            else:
                _, k, rep_off, end_shift = terminal
                for v, s in zip(path, shift):
                    resolution[v] = ("cycle", k, rep_off + (end_shift - s))
    return resolution, n_cycles


def solve_exhaustive(system: BoundSystem, cap: int = 20) -> dict[str, Value]:
    """Least solution by enumerating argument selections of all min/max nodes.

    Each selection reduces every equation to a constant or a single-variable
    chain.  Chains grounded in constants propagate directly; closed cycles
    are tried at both infinities.  Assembled valuations are kept only if they
    solve the original system, which makes every survivor a genuine fixpoint.
    The least fixpoint is always among the survivors: picking, per node, an
    argument that attains the extremum both at the least fixpoint and at its
    Kleene stage yields constant-grounded chains for every finite component
    (the stage strictly decreases along the selected links) and
    sign-homogeneous cycles for the infinite ones.  The pointwise minimum of
    the survivors is therefore the answer and must itself be a survivor.
    """
    nodes = _selector_nodes(system)
    if len(nodes) > cap:
        raise CapExceededError(f"{len(nodes)} min/max nodes exceed the cap of {cap}")
    names = system.names()
    rhs_map = system.as_dict()
    candidates: list[dict[str, Value]] = []
    seen: set[tuple] = set()
    for bits in itertools.product((0, 1), repeat=len(nodes)):
        selection = dict(zip(nodes, bits))

        def pick(name: str, path: tuple[int, ...]) -> int:
            return selection[(name, path)]

        links = {name: _resolve(rhs_map[name], name, (), pick) for name in names}
        resolution, n_cycles = _resolve_links(names, links)
        for combo in itertools.product((NEG_INF, POS_INF), repeat=n_cycles):
            val: dict[str, Value] = {}
            for v in names:
                res = resolution[v]
                if res[0] == "const":
                    val[v] = res[1]
                else:
                    val[v] = combo[res[1]]  # infinities absorb the offset
            if is_fixpoint(system, val):
                key = tuple(_sort_key(val[n]) for n in names)
                if key not in seen:
                    seen.add(key)
                    candidates.append(val)
    if not candidates:
        raise RuntimeError("no selection yields a fixpoint; the system is inconsistent")
    least = {n: min((c[n] for c in candidates), key=_sort_key) for n in names}
    if not any(c == least for c in candidates):
        raise RuntimeError("pointwise minimum of fixpoints is not itself a fixpoint")
    return least


def _sort_key(v: Value):
    if isinstance(v, _Inf):
        return (v.sign, 0)
    return (0, v)


# ---------------------------------------------------------------------------
# Ascending policy iteration
# ---------------------------------------------------------------------------


def _max_nodes(system: BoundSystem) -> list[tuple[str, tuple[int, ...], BMax]]:
    out: list[tuple[str, tuple[int, ...], BMax]] = []

    def walk(e: BoundExpr, name: str, path: tuple[int, ...]) -> None:
        if isinstance(e, BMax):
            out.append((name, path, e))
            walk(e.left, name, path + (0,))
            walk(e.right, name, path + (1,))
        elif isinstance(e, BMin):
            walk(e.left, name, path + (0,))
            walk(e.right, name, path + (1,))
        elif isinstance(e, BAdd):
            walk(e.expr, name, path + (0,))

    for name, rhs in system.equations:
        walk(rhs, name, ())
    return out


def _eval_with_policy(
    e: BoundExpr,
    valuation: Mapping[str, Value],
    policy: Mapping[tuple[str, tuple[int, ...]], int],
    name: str,
    path: tuple[int, ...],
) -> Value:
    if isinstance(e, BConst):
        return e.value
    if isinstance(e, BRef):
        return valuation[e.name]
    if isinstance(e, BAdd):
        return vadd(_eval_with_policy(e.expr, valuation, policy, name, path + (0,)), e.offset)
    if isinstance(e, BMin):
        return min(
            _eval_with_policy(e.left, valuation, policy, name, path + (0,)),
            _eval_with_policy(e.right, valuation, policy, name, path + (1,)),
        )
    chosen = policy[(name, path)]
    child = e.left if chosen == 0 else e.right
    return _eval_with_policy(child, valuation, policy, name, path + (chosen,))


def _finite_bound(system: BoundSystem) -> int:
    """Values beyond this are jumped to +oo during the inner Kleene solves.

    A finite least-fixpoint component is derivable through constant-grounded
    chains, so max |const| plus the total |offset| mass bounds it; the extra
    per-variable factor is slack for values pinned across improvement rounds.
    An undershoot cannot corrupt results silently: the final valuation is
    checked to be a fixpoint of the original system.
    """
    max_const = 0
    total_off = 0

    def walk(e: BoundExpr) -> None:
        nonlocal max_const, total_off
        if isinstance(e, BConst) and not isinstance(e.value, _Inf):
            max_const = max(max_const, abs(e.value))
        elif isinstance(e, BAdd):
            total_off += abs(e.offset)
            walk(e.expr)
        elif isinstance(e, (BMin, BMax)):
            walk(e.left)
            walk(e.right)

    for _, rhs in system.equations:
        walk(rhs)
    return max_const + (len(system.equations) + 2) * (total_off + 1)


def solve_policy_iteration(system: BoundSystem) -> dict[str, Value]:
    """Ascending policy iteration over the max nodes.

    Starting from the all--oo valuation and a policy attaining each max
    there, repeatedly solve the induced min-only system for its least
    solution above the current valuation (Kleene iteration; values exceeding
    the finite-fixpoint bound jump to +oo), then switch any max node whose
    other argument is strictly larger.  Values only ascend and each policy
    strictly improves, so this terminates at the least fixpoint.
    """
    names = system.names()
    rhs_map = system.as_dict()
    maxnodes = _max_nodes(system)
    rho: dict[str, Value] = {n: NEG_INF for n in names}
    policy: dict[tuple[str, tuple[int, ...]], int] = {}
    for name, path, node in maxnodes:
        lval = eval_bexpr(node.left, rho)
        rval = eval_bexpr(node.right, rho)
        policy[(name, path)] = 0 if lval >= rval else 1

    deps: dict[str, set[str]] = {n: set() for n in names}

    def refs(e: BoundExpr, acc: set[str]) -> None:
        if isinstance(e, BRef):
            acc.add(e.name)
        elif isinstance(e, BAdd):
            refs(e.expr, acc)
        elif isinstance(e, (BMin, BMax)):
            refs(e.left, acc)
            refs(e.right, acc)

    for name, rhs in system.equations:
        acc: set[str] = set()
        refs(rhs, acc)
        for r in acc:
            deps[r].add(name)

    bound = _finite_bound(system)
    while True:
        # Least solution of the induced min-system above rho.
        work = list(names)
        while work:
            v = work.pop(0)
            nv = _eval_with_policy(rhs_map[v], rho, policy, v, ())
            if not isinstance(nv, _Inf) and nv > bound:
                nv = POS_INF
            if nv > rho[v]:
                rho[v] = nv
                for d in sorted(deps[v]):
                    if d not in work:
                        work.append(d)
        improved = False
        for name, path, node in maxnodes:
            sel = policy[(name, path)]
            lval = eval_bexpr(node.left, rho)
            rval = eval_bexpr(node.right, rho)
            if sel == 0 and rval > lval:
                policy[(name, path)] = 1
                improved = True
            elif sel == 1 and lval > rval:
                policy[(name, path)] = 0
                improved = True
        if not improved:
            break
    if not is_fixpoint(system, rho):
        raise RuntimeError("policy iteration did not land on a fixpoint")
    return rho


# ---------------------------------------------------------------------------
# Explicit-state oracle and the combined interval view
# ---------------------------------------------------------------------------


def bounded_concrete_oracle(
    cfg: Cfg,
    var: str,
    entry: Interval,
    value_range: tuple[int, int] = (-1024, 1100),
    budget: int = 1_000_000,
) -> dict[str, tuple[int, int] | None]:
    """Exact per-location hull of the reachable values of `var`.

    Enumerates (location, store) pairs explicitly over all declared
    variables.  Every enumerated value must stay within `value_range`
    (otherwise the program is not oracle-suitable and RangeExceededError is
    raised); nondeterministic expressions are rejected, nondeterministic
    branch conditions explore both sides.
    """
    lo, hi = value_range
    variables = cfg.variables if cfg.variables else (var,)
    if var not in variables:
        raise ValueError(f"unknown variable {var!r}")
    if any(v != var for v in variables):
        raise UnsupportedConstructError(
            "the concrete oracle requires a single-variable program"
        )
    if entry.is_empty:
        return {loc: None for loc in cfg.locations}
    if isinstance(entry.lo, _Inf) or isinstance(entry.hi, _Inf):
        raise RangeExceededError("entry interval must be finite for enumeration")
    if entry.lo < lo or entry.hi > hi:
        raise RangeExceededError(f"entry interval {entry} outside {value_range}")
    seeds = list(range(entry.lo, entry.hi + 1))

    def check(value: int) -> int:
        if value < lo or value > hi:
            raise RangeExceededError(f"value {value} outside {value_range}")
        return value

    reached: dict[str, set[int]] = {loc: set() for loc in cfg.locations}
    reached[cfg.entry] = set(seeds)
    frontier = [(cfg.entry, v) for v in sorted(seeds)]
    total = len(seeds)
    while frontier:
        loc, value = frontier.pop()
        for edge in cfg.out(loc):
            label = edge.label
            out_values: list[int] = []
            if isinstance(label, Nop):
                out_values = [value]
            elif isinstance(label, AccessLabel):
                raise UnsupportedConstructError("memory access in a numeric graph")
            elif isinstance(label, AssignLabel):
                if label.var != var:
                    raise UnsupportedConstructError(
                        f"assignment to foreign variable {label.var!r}"
                    )
                shape, c = _expr_shape(label.expr, var)
                out_values = [check(c if shape == "const" else value + c)]
            elif isinstance(label, AssumeLabel):
                cond = label.cond
                if isinstance(cond, CondNondet):
                    out_values = [value]
                else:
                    atom = _guard_atom(cond, var)
                    if atom is None:
                        out_values = [value]
                    elif atom[0] == "false":
                        out_values = []
                    else:
                        op, c = atom
                        holds = {
                            "<": value < c,
                            "<=": value <= c,
                            "==": value == c,
                            "!=": value != c,
                            ">=": value >= c,
                            ">": value > c,
                        }[op]
                        out_values = [value] if holds else []
            for nv in out_values:
                if nv not in reached[edge.dst]:
                    reached[edge.dst].add(nv)
                    total += 1
                    if total > budget:
                        raise OracleBudgetError(f"state budget {budget} exceeded")
                    frontier.append((edge.dst, nv))
    return {
        loc: (min(vals), max(vals)) if vals else None for loc, vals in reached.items()
    }


def solve_intervals_exact(
    cfg: Cfg, var: str, entry: Interval, solver=solve_policy_iteration
) -> dict[str, Interval]:
    """Exact least-invariant intervals for `var` from the two bound systems."""
    upper = solver(extract_upper_bounds(cfg, var, entry.hi))
    neg_entry_hi = bneg_value(entry.lo)
    lower_neg = solver(extract_upper_bounds(cfg, var, neg_entry_hi, negate=True))
    out: dict[str, Interval] = {}
    for loc in cfg.locations:
        hi = upper[loc]
        lo = bneg_value(lower_neg[loc])
        if hi is NEG_INF or lo is POS_INF:
            out[loc] = Interval(POS_INF, NEG_INF)
        else:
            out[loc] = Interval.make(lo, hi)
    return out


def bneg_value(v: Value) -> Value:
    return -v


def inline_equation(system: BoundSystem, target: str) -> BoundExpr:
    """Substitute away every variable except `target`.

    Works when every cycle of the system passes through `target` (a single
    loop); references to other locations on a second cycle raise ValueError.
    """
    rhs_map = system.as_dict()

    def expand(e: BoundExpr, stack: tuple[str, ...]) -> BoundExpr:
        if isinstance(e, BConst):
            return e
        if isinstance(e, BRef):
            if e.name == target:
                return e
            if e.name in stack:
                raise ValueError(f"cycle through {e.name!r} does not pass the target")
            return expand(rhs_map[e.name], stack + (e.name,))
        if isinstance(e, BAdd):
            return badd_expr(expand(e.expr, stack), e.offset)
        if isinstance(e, BMin):
            return bmin(expand(e.left, stack), expand(e.right, stack))
        if isinstance(e, BMax):
            return bmax(expand(e.left, stack), expand(e.right, stack))
        raise TypeError(f"unknown bound expression {e!r}")

    return expand(rhs_map[target], (target,))
