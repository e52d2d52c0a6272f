from __future__ import annotations

import random

import pytest

from absint.cfg import build_cfg
from absint.intervals import (
    BOTTOM_ENV,
    EMPTY,
    NEG_INF,
    POS_INF,
    TOP,
    AbstractEnv,
    Interval,
    analyze,
    entry_environment,
    eval_expr,
    filter_cond,
    widen,
)
from absint.lang import BinOp, Cmp, Const, Nondet, Var, parse_program
from helpers import RangeBlown, concrete_stores, random_program

RING = """
int i;
while (0 < 1) {
  if (*) {
    i = i + 1;
    if (i > 42) {
      i = 0;
    }
  }
  assert (i < 1000);
}
"""


def env_of(**kw):
    return AbstractEnv.of({k: v for k, v in kw.items()})


def test_eval_difference():
    env = env_of(x=Interval(0, 1), y=Interval(0, 1))
    assert eval_expr(BinOp("-", Var("x"), Var("y")), env) == Interval(-1, 1)


def test_eval_constant():
    assert eval_expr(Const(7), env_of()) == Interval(7, 7)


def test_eval_shift():
    env = env_of(x=Interval(0, 41))
    assert eval_expr(BinOp("+", Var("x"), Const(1)), env) == Interval(1, 42)


def test_eval_nondet_is_top():
    assert eval_expr(Nondet(), env_of()) == TOP


def test_filter_exact_constant_guard():
    env = env_of(i=Interval(0, 43))
    out = filter_cond(Cmp(">", Var("i"), Const(42)), env)
    assert out.get("i") == Interval(43, 43)


def test_filter_tightens_strict_bound_over_integers():
    env = env_of(j=TOP)
    out = filter_cond(Cmp(">", Var("j"), Const(0)), env)
    assert out.get("j") == Interval(1, POS_INF)


def test_filter_empty_intersection_is_unreachable():
    env = env_of(i=Interval(0, 10))
    assert filter_cond(Cmp(">", Var("i"), Const(42)), env).bottom


def test_filter_nondet_is_identity():
    from absint.lang import CondNondet

    env = env_of(i=Interval(3, 4))
    assert filter_cond(CondNondet(), env) == env


def test_filter_refines_both_variable_sides():
    env = env_of(x=Interval(0, 9), y=Interval(5, 20))
    out = filter_cond(Cmp(">", Var("x"), Var("y")), env)
    assert out.get("x") == Interval(6, 9)
    assert out.get("y") == Interval(5, 8)


def test_filter_equality_and_disequality():
    env = env_of(x=Interval(0, 9))
    assert filter_cond(Cmp("==", Var("x"), Const(4)), env).get("x") == Interval(4, 4)
    assert filter_cond(Cmp("!=", Var("x"), Const(0)), env).get("x") == Interval(1, 9)
    assert filter_cond(Cmp("!=", Var("x"), Const(5)), env).get("x") == Interval(0, 9)


def test_widen_unstable_upper():
    assert widen(Interval(0, 0), Interval(0, 1)) == Interval(0, POS_INF)


def test_widen_stable():
    iv = Interval(3, 9)
    assert widen(iv, iv) == iv


def test_widen_unstable_lower():
    assert widen(Interval(0, 10), Interval(-1, 10)) == Interval(NEG_INF, 10)


def test_widen_is_upper_bound_and_stabilizes():
    rng = random.Random(98)
    for _ in range(300):
        def rand_iv():
            lo = rng.randint(-20, 20)
            return Interval(lo, lo + rng.randint(0, 15))

        acc = rand_iv()
        changes = 0
        for _ in range(10):
            nxt = rand_iv()
            out = widen(acc, nxt)
            assert acc.subset(out) and nxt.subset(out)
            if out != acc:
                changes += 1
            acc = out
        assert changes <= 2  # each bound can only escape to infinity once


def loop_head(cfg):
    from absint.cfg import back_edge_targets

    targets = back_edge_targets(cfg)
    assert len(targets) == 1
    return targets.pop()


def test_ring_widen_only():
    cfg = build_cfg(parse_program(RING))
    result = analyze(cfg, env_of(i=Interval(0, 0)), widen_delay=0, narrow_passes=0)
    assert result.envs[loop_head(cfg)].get("i") == Interval(0, POS_INF)
    assert result.asserts[0].proved is False


def test_ring_one_narrowing_pass():
    cfg = build_cfg(parse_program(RING))
    result = analyze(cfg, env_of(i=Interval(0, 0)), widen_delay=0, narrow_passes=1)
    assert result.envs[loop_head(cfg)].get("i") == Interval(0, 999)
    assert result.asserts[0].proved is False


def test_ring_nonmonotone_precondition():
    """Identical analysis options; a strictly larger entry set proves the
    assertion the point entry cannot."""
    cfg = build_cfg(parse_program(RING))
    precise = analyze(cfg, env_of(i=Interval(0, 0)), widen_delay=0, narrow_passes=0)
    coarse = analyze(cfg, env_of(i=Interval(0, 42)), widen_delay=0, narrow_passes=0)
    assert precise.asserts[0].proved is False
    assert coarse.asserts[0].proved is True
    assert coarse.envs[loop_head(cfg)].get("i") == Interval(0, 42)


def test_widen_delay_recovers_exact_two_phase_loop():
    # i alternates 0/1; one join before widening keeps the loop head finite
    text = "int i = 0; while (*) { if (i == 0) { i = 1; } else { i = 0; } }"
    cfg = build_cfg(parse_program(text))
    program = parse_program(text)
    eager = analyze(cfg, entry_environment(program), widen_delay=0, narrow_passes=0)
    delayed = analyze(cfg, entry_environment(program), widen_delay=2, narrow_passes=0)
    head = loop_head(cfg)
    assert delayed.envs[head].get("i") == Interval(0, 1)
    assert eager.envs[head].get("i").hi is POS_INF


def test_assert_in_unreachable_code_is_vacuously_proved():
    text = "int i = 0; if (i > 5) { assert (i < 0); }"
    cfg = build_cfg(parse_program(text))
    result = analyze(cfg, env_of(i=Interval(0, 0)))
    assert result.asserts[0].proved is True


def test_rejects_cache_programs():
    cfg = build_cfg(parse_program("access(a);"))
    with pytest.raises(ValueError):
        analyze(cfg, env_of())


def test_soundness_against_concrete_enumeration():
    """Every store the explicit enumerator reaches lies inside the analyzed
    intervals, for random programs staying in the enumerator's range."""
    rng = random.Random(6021)
    checked = 0
    attempts = 0
    while checked < 120 and attempts < 1200:
        attempts += 1
        program = random_program(rng)
        cfg = build_cfg(program)
        entry = {
            d.name: (d.init.value if d.init is not None else rng.randint(-3, 3))
            for d in program.decls
        }
        try:
            stores = concrete_stores(cfg, entry)
        except RangeBlown:
            continue
        checked += 1
        env0 = AbstractEnv.of({v: Interval.const(c) for v, c in entry.items()})
        for delay, passes in ((0, 0), (1, 1)):
            result = analyze(cfg, env0, widen_delay=delay, narrow_passes=passes)
            for loc, tuples in stores.items():
                envl = result.envs[loc]
                if tuples:
                    assert not envl.bottom, loc
                for t in tuples:
                    for who, value in zip(cfg.variables, t):
                        assert envl.get(who).contains(value), (loc, who, value)
    assert checked >= 100
