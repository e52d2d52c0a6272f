"""Symbolic rewriting propagated alongside the interval analysis.

A rewrite map is an ordered list of rules ``var -> expr`` populated in
chronological order by assignments.  Evaluating an expression both as written
and after rewriting and simplification, then intersecting the two interval
results, recovers relational facts a non-relational domain loses (the classic
``y = x; z = x - y`` gives z = [0, 0] instead of [-1, 1]).

The combination is deliberately kept in its plain form: guards are filtered
through original and rewritten conditions but rules are never inverted, and
the map join at control-flow merges keeps syntactically common rules only.
This preserves a documented oddity of the approach: truncating rewrite chains
can make results strictly more precise (see ``analyze_combined`` with
``truncate_depth``), i.e. the transfer is not monotone in the amount of
symbolic information carried.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cfg import AssignLabel, AssumeLabel, Cfg, back_edge_targets
from .intervals import (
    BOTTOM_ENV,
    AbstractEnv,
    AnalysisResult,
    AssertVerdict,
    check_cache_free,
    eval_expr,
    filter_cond,
)
from .lang import (
    BinOp,
    Cmp,
    Cond,
    CondNondet,
    Const,
    Expr,
    Nondet,
    Var,
    expr_has_nondet,
    expr_vars,
    negate_cond,
)


@dataclass(frozen=True)
class RewriteMap:
    """Ordered rules var -> deterministic Expr, acyclic as a substitution
    system (no rule's right-hand side depends, transitively, on its own
    left-hand side), which guarantees rewriting terminates."""

    rules: tuple[tuple[str, Expr], ...] = ()

    def lookup(self, var: str) -> Expr | None:
        for name, e in self.rules:
            if name == var:
                return e
        return None

    def drop_mentioning(self, var: str) -> "RewriteMap":
        return RewriteMap(
            tuple(
                (name, e)
                for name, e in self.rules
                if name != var and var not in expr_vars(e)
            )
        )

    def join(self, other: "RewriteMap") -> "RewriteMap":
        common = set(other.rules)
        return RewriteMap(tuple(r for r in self.rules if r in common))


def _linear_form(e: Expr, sign: int, coeffs: dict[str, int], nondets: list[int]) -> int:
    """Accumulate coefficients; returns the constant term contribution."""
    if isinstance(e, Const):
        return sign * e.value
    if isinstance(e, Var):
        coeffs[e.name] = coeffs.get(e.name, 0) + sign
        return 0
    if isinstance(e, Nondet):
        nondets.append(sign)
        return 0
    if isinstance(e, BinOp):
        left = _linear_form(e.left, sign, coeffs, nondets)
        right = _linear_form(e.right, sign if e.op == "+" else -sign, coeffs, nondets)
        return left + right
    raise TypeError(f"unknown expression {e!r}")


def simplify(e: Expr) -> Expr:
    """Canonical linear form: variables in name order (with multiplicity),
    then any nondeterministic occurrences, then the constant term."""
    coeffs: dict[str, int] = {}
    nondets: list[int] = []
    const = _linear_form(e, 1, coeffs, nondets)
    terms: list[tuple[int, Expr]] = []
    for name in sorted(coeffs):
        c = coeffs[name]
        for _ in range(abs(c)):
            terms.append((1 if c > 0 else -1, Var(name)))
    for s in nondets:
        terms.append((s, Nondet()))
    if not terms:
        return Const(const)
    out: Expr | None = None
    for s, t in terms:
        if out is None:
            out = t if s > 0 else BinOp("-", Const(0), t)
        else:
            out = BinOp("+" if s > 0 else "-", out, t)
    if const != 0:
        out = BinOp("+" if const > 0 else "-", out, Const(abs(const)))
    return out


def _substitute(e: Expr, m: RewriteMap, budget: int | None) -> Expr:
    """Replace variables by their rules; a budget of k allows k successive
    rule applications along any chain (None is unlimited; acyclicity bounds
    the recursion either way)."""
    if budget is not None and budget <= 0:
        return e
    if isinstance(e, Var):
        rhs = m.lookup(e.name)
        if rhs is None:
            return e
        return _substitute(rhs, m, None if budget is None else budget - 1)
    if isinstance(e, BinOp):
        return BinOp(
            e.op, _substitute(e.left, m, budget), _substitute(e.right, m, budget)
        )
    return e


def rewrite_and_simplify(m: RewriteMap, e: Expr, max_chain: int | None = None) -> Expr:
    return simplify(_substitute(e, m, max_chain))


def record(m: RewriteMap, var: str, e: Expr) -> RewriteMap:
    """Chronological recording of an assignment.

    The old value of `var` is dead: rules mentioning it on either side are
    dropped.  A deterministic right-hand side is stored fully rewritten
    through the pre-assignment map (so it refers to current values only);
    a nondeterministic one merely invalidates.  A self-referential residue
    (e.g. ``x = x + 1`` with no rule for x) cannot be expressed as a rule
    about current values and also just invalidates.
    """
    if expr_has_nondet(e):
        return m.drop_mentioning(var)
    flat = rewrite_and_simplify(m, e)
    out = m.drop_mentioning(var)
    if var in expr_vars(flat):
        return out
    return RewriteMap(out.rules + ((var, flat),))


def _record_raw(m: RewriteMap, var: str, e: Expr) -> RewriteMap:
    # Truncated mode stores right-hand sides unrewritten; chains are capped
    # at evaluation time instead.
    if expr_has_nondet(e):
        return m.drop_mentioning(var)
    flat = simplify(e)
    out = m.drop_mentioning(var)
    if var in expr_vars(flat):
        return out
    return RewriteMap(out.rules + ((var, flat),))


def _rewritten_cond(c: Cond, m: RewriteMap, max_chain: int | None) -> Cond:
    if isinstance(c, CondNondet):
        return c
    return Cmp(
        c.op,
        rewrite_and_simplify(m, c.left, max_chain),
        rewrite_and_simplify(m, c.right, max_chain),
    )


@dataclass(frozen=True)
class _State:
    env: AbstractEnv
    rules: RewriteMap

    def is_bottom(self) -> bool:
        return self.env.bottom


_BOTTOM_STATE = _State(BOTTOM_ENV, RewriteMap())


def analyze_combined(
    cfg: Cfg,
    entry_env: AbstractEnv,
    truncate_depth: int | None = None,
    widen_delay: int = 0,
    narrow_passes: int = 0,
) -> AnalysisResult:
    """Interval analysis with the rewrite map carried along.

    Assignments and guards are evaluated on the original expression and on
    its rewritten, simplified form; the meet of the two interval results is
    used.  With ``truncate_depth=d``, stored rules keep their raw right-hand
    sides and evaluation follows at most ``d`` rule applications along any
    chain; the default follows chains exhaustively with rules stored
    pre-flattened.
    """
    check_cache_free(cfg)
    widen_points = back_edge_targets(cfg)
    depth = truncate_depth

    def transfer(label, state: _State) -> _State:
        if state.is_bottom():
            return _BOTTOM_STATE
        env, rules = state.env, state.rules
        if isinstance(label, AssignLabel):
            plain = eval_expr(label.expr, env)
            symbolic = eval_expr(rewrite_and_simplify(rules, label.expr, depth), env)
            new_env = env.set(label.var, plain.meet(symbolic))
            if new_env.bottom:
                return _BOTTOM_STATE
            recorder = record if depth is None else _record_raw
            return _State(new_env, recorder(rules, label.var, label.expr))
        if isinstance(label, AssumeLabel):
            env = filter_cond(label.cond, env)
            env = filter_cond(_rewritten_cond(label.cond, rules, depth), env)
            return _State(env, rules) if not env.bottom else _BOTTOM_STATE
        return state

    def join(a: _State, b: _State) -> _State:
        if a.is_bottom():
            return b
        if b.is_bottom():
            return a
        return _State(a.env.join(b.env), a.rules.join(b.rules))

    incoming: dict[str, list] = {loc: [] for loc in cfg.locations}
    for e in cfg.edges:
        incoming[e.dst].append(e)
    entry_state = _State(entry_env, RewriteMap())

    def candidate(loc: str, states: dict[str, _State]) -> _State:
        acc = entry_state if loc == cfg.entry else _BOTTOM_STATE
        for e in incoming[loc]:
            acc = join(acc, transfer(e.label, states[e.src]))
        return acc

    states: dict[str, _State] = {loc: _BOTTOM_STATE for loc in cfg.locations}
    joins_done = {loc: 0 for loc in cfg.locations}
    work = list(cfg.locations)
    while work:
        loc = work.pop(0)
        cand = candidate(loc, states)
        old = states[loc]
        merged = join(old, cand)
        if loc in widen_points and joins_done[loc] > widen_delay:
            new = _State(old.env.widen(merged.env), merged.rules)
        else:
            new = merged
        if new != old:
            joins_done[loc] += 1
            states[loc] = new
            for e in cfg.out(loc):
                if e.dst not in work:
                    work.append(e.dst)

    for _ in range(narrow_passes):
        states = {loc: candidate(loc, states) for loc in cfg.locations}

    envs = {loc: s.env for loc, s in states.items()}
    verdicts = []
    for site in cfg.asserts:
        refuted = filter_cond(negate_cond(site.cond), envs[site.loc])
        verdicts.append(AssertVerdict(site.sid, site.loc, refuted.bottom))
    return AnalysisResult(envs, tuple(verdicts))
