import itertools

import pytest
from hypothesis import given, settings, strategies as st

from uchoo import oracle
from uchoo.engine import (
    Budget,
    BudgetExceeded,
    EvalError,
    Failure,
    Machine,
    Program,
    ScriptedIO,
    State,
    Success,
    commit_assert,
    eval_expr,
    match_atom,
    parse_input_value,
    run,
)
from uchoo.generate import random_case
from uchoo.parser import parse_def, parse_goal
from uchoo.syntax import (
    TRUE,
    Assign,
    AtomGoal,
    BinOp,
    Call,
    Choice,
    Clause,
    DSeq,
    Field,
    Ident,
    Int,
    Seq,
    Str,
    Var,
    dseq,
    substitute,
    symbols,
)
from uchoo.trace import Tracer

BIG = Budget(100_000, 1_000)


def machine(defs, inputs=()):
    return Machine(defs, ScriptedIO(inputs), BIG, Tracer())


# -- run ---------------------------------------------------------------------


def test_templeu_medical(program, source):
    io = ScriptedIO(["medical"])
    out = run(program("templeU"), source("templeU").main, io)
    assert isinstance(out, Success)
    assert io.output == ["$4,000"]
    assert out.final.state.bindings == {"major": Ident("medical"), "tuition": Str("$4,000")}


def test_templeu_unknown_major_fails(program, source):
    p = program("templeU")
    # independent check: none of the three branches declares major == law
    branches = p.defs.branches
    assert not any(
        isinstance(c, Clause) and c.head == Field("major", Ident("law"))
        for b in branches
        for c in (b.first, b.second)
    )
    out = run(p, source("templeU").main, ScriptedIO(["law"]))
    assert isinstance(out, Failure)


@pytest.mark.parametrize("name", ["templeU", "smartphone", "switch"])
def test_true_is_identity(program, name):
    p = program(name)
    p = Program(p.defs, State({"z": Int(4)}))
    out = run(p, TRUE)
    assert isinstance(out, Success) and out.final == p


# -- exec_goal -----------------------------------------------------------------


def test_sequential_assignment():
    g = Seq(Assign("x", Int(1)), Assign("y", BinOp("+", Ident("x"), Int(2))))
    out = run(Program(None), g)
    # by hand: x := 1, then y := 1 + 2
    assert out.final.state.bindings == {"x": Int(1), "y": Int(3)}


def test_field_goal_against_smartphone(program):
    p = program("smartphone")
    for start in ({}, {"speaker": Ident("off")}, {"speaker": Ident("on")}):
        out = run(Program(p.defs, State(start)), AtomGoal(Field("speaker", Ident("on"))))
        assert isinstance(out, Success)
        assert out.final.state["speaker"] == Ident("on")


def test_unbound_variable_fails_branch():
    out = run(Program(None), Assign("x", Ident("y")))
    assert isinstance(out, Failure)
    assert any(e.detail == "unbound variable y" for e in out.trace.of_kind("failure"))


def test_known_symbol_evaluates_to_itself(program):
    out = run(program("switch"), parse_goal("x = on"))
    assert out.final.state["x"] == Ident("on")


def test_call_arguments_are_values_not_lookups():
    defs = parse_def("p(v) = got = v")
    out = run(Program(defs), parse_goal("p(bob)"))
    assert out.final.state["got"] == Ident("bob")
    # once substituted into an expression position the symbol is looked up
    out = run(Program(defs, State({"bob": Int(1)})), parse_goal("p(bob)"))
    assert out.final.state["got"] == Int(1)


def test_print_renders_values():
    io = ScriptedIO()
    run(Program(None), parse_goal('x = 7; print(x); print("a b"); s = "q"; print(s); log("hi")'), io)
    assert io.output == ["7", "a b", "q", "hi"]


def test_read_without_declaration_assigns():
    io = ScriptedIO(["42", "hello", "two words"])
    out = run(Program(None), parse_goal("read(a); read(b); read(c)"), io)
    assert out.final.state.bindings == {"a": Int(42), "b": Ident("hello"), "c": Str("two words")}


def test_read_at_end_of_input_fails():
    out = run(Program(None), parse_goal("read(a)"), ScriptedIO([]))
    assert isinstance(out, Failure)


def test_parse_input_value():
    assert parse_input_value(" -3\n") == Int(-3)
    assert parse_input_value("medical\n") == Ident("medical")
    assert parse_input_value("$4,000") == Str("$4,000")
    assert parse_input_value("while") == Str("while")


def test_input_is_not_replayed_on_backtracking():
    # the first read fails to select anything, the second line is then used by the next read
    defs = parse_def("uchoo(k == 1, k == 2)")
    io = ScriptedIO(["1", "2"])
    out = run(Program(defs), parse_goal("read(k); read(m)"), io)
    assert out.final.state.bindings == {"k": Int(1), "m": Int(2)}


def test_while_with_field_condition():
    g = parse_goal("n = 0; go == 1; while (go == 1) n = n + 1; p(n + 0) endwhile")
    defs = parse_def("uchoo(go == 1); p(3) = go = 0; p(k) = true")
    out = run(Program(defs), g)
    assert isinstance(out, Success)
    assert out.final.state.bindings == {"n": Int(3), "go": Int(0)}


def test_while_with_call_condition_commits_its_state():
    defs = parse_def("more() = left == 1; seen = 1")
    g = parse_goal("left = 1; while (more()) left = 0 endwhile")
    out = run(Program(defs), g)
    assert out.final.state.bindings == {"left": Int(0), "seen": Int(1)}


def test_while_body_failure_fails_the_loop():
    out = run(Program(None), parse_goal("while true x = y endwhile"))
    assert isinstance(out, Failure)


# -- backchain -------------------------------------------------------------------


def test_backchain_playmusic(program):
    p = program("smartphone")
    m = machine(p.defs)
    sols = list(m.backchain(p.defs, p, Call("playmusic", (Int(10),)), 0))
    assert len(sols) == 1
    assert sols[0].state["speaker"] == Ident("on")
    assert m.tracer.finish("success").of_kind("rule-applied")[0].rule is not None
    assert any(e.detail == "[10/x]" and e.rule == 3 for e in m.tracer.finish("success").events)


def test_backchain_choice_picks_second_branch():
    d = Choice((Clause(Field("sw", Ident("on")), TRUE), Clause(Field("sw", Ident("off")), TRUE)))
    m = machine(d)
    sols = list(m.backchain(d, Program(d), Field("sw", Ident("off")), 0))
    assert [s.state.bindings for s in sols] == [{"sw": Ident("off")}]
    commits = m.tracer.finish("success").of_kind("branch-commit")
    assert [e.detail for e in commits] == ["2 of uchoo#1"]


def test_backchain_dseq_falls_through_to_second():
    failing = Clause(Call("other", ()), TRUE)
    succeeding = Clause(Call("p", ()), Assign("hit", Int(1)))
    d = DSeq(failing, succeeding)
    # independent check: the first head cannot match p()
    assert match_atom(failing.head, Call("p", ())) is None
    sols = list(machine(d).backchain(d, Program(d), Call("p", ()), 0))
    assert [s.state.bindings for s in sols] == [{"hit": Int(1)}]


def test_backchain_enumerates_all_solutions_in_order():
    d = parse_def("p() = v = 1; uchoo(p() = v = 2, p() = v = 3); p() = v = 4")
    sols = list(machine(d).backchain(d, Program(d), Call("p", ()), 0))
    assert [s.state["v"] for s in sols] == [Int(1), Int(2), Int(3), Int(4)]


def test_nested_uchoo_are_independent_choice_points():
    d = parse_def("uchoo(uchoo(a == 1, a == 2); b == 9, a == 3)")
    out = run(Program(d), parse_goal("a == 2"))
    assert out.final.state.bindings == {"a": Int(2), "b": Int(9)}
    choice_ids = {e.detail for e in out.trace.of_kind("choice-enter")}
    assert choice_ids == {"uchoo#1", "uchoo#2"}


# -- match_atom -------------------------------------------------------------------


def brute_match(head, call):
    """Try every assignment of call arguments to the head's parameters."""
    names = sorted({a.name for a in head.args if isinstance(a, Var)})
    found = []
    for combo in dict.fromkeys(itertools.product(call.args, repeat=len(names))):
        env = dict(zip(names, combo))
        inst = Clause(head)
        for n, v in env.items():
            inst = substitute(inst, n, v)
        if inst.head == call:
            found.append(env)
    return found


@pytest.mark.parametrize(
    "head, call",
    [
        (Call("p", (Var("x"), Int(3))), Call("p", (Int(7), Int(3)))),
        (Call("p", (Var("x"),)), Call("p", (Int(5),))),
        (Call("p", (Var("x"), Var("x"))), Call("p", (Int(1), Int(2)))),
        (Call("p", (Var("x"), Var("x"))), Call("p", (Int(2), Int(2)))),
        (Call("p", (Var("x"), Ident("on"))), Call("p", (Ident("on"), Ident("off")))),
        (Call("p", ()), Call("q", ())),
        (Call("p", (Var("x"),)), Call("p", (Int(1), Int(2)))),
    ],
)
def test_match_atom_against_brute_force(head, call):
    expected = brute_match(head, call) if len(head.args) == len(call.args) and head.name == call.name else []
    got = match_atom(head, call)
    assert (got is None) == (not expected)
    if got is not None:
        assert [got] == expected


def test_match_atom_examples():
    assert match_atom(Call("p", (Var("x"), Int(3))), Call("p", (Int(7), Int(3)))) == {"x": Int(7)}
    assert match_atom(Call("p", (Var("x"),)), Call("p", (Int(5),))) == {"x": Int(5)}
    assert match_atom(Call("p", (Var("x"), Var("x"))), Call("p", (Int(1), Int(2)))) is None
    assert match_atom(Field("a", Int(1)), Field("a", Int(1))) == {}
    assert match_atom(Field("a", Int(1)), Field("b", Int(1))) is None
    assert match_atom(Field("a", Int(1)), Call("a", (Int(1),))) is None


# -- eval_expr --------------------------------------------------------------------


def test_eval_examples():
    assert eval_expr(State({"x": Int(1)}), BinOp("+", Ident("x"), Int(2))) == Int(3)
    assert eval_expr(State(), Int(5)) == Int(5)
    assert eval_expr(State({"tuition": Str("$4,000")}), Ident("tuition")) == Str("$4,000")


@pytest.mark.parametrize("a", range(-7, 8))
@pytest.mark.parametrize("b", [-3, -2, -1, 1, 2, 3])
def test_division_truncates_toward_zero(a, b):
    got = eval_expr(State(), BinOp("/", Int(a), Int(b))).value
    assert got == int(a / b)


@pytest.mark.parametrize(
    "expr, message",
    [
        (BinOp("/", Int(1), Int(0)), "division by zero"),
        (BinOp("+", Ident("y"), Int(1)), "unbound variable y"),
        (BinOp("+", Str("a"), Int(1)), "type mismatch"),
        (Var("x"), "unbound parameter x"),
    ],
)
def test_eval_errors(expr, message):
    with pytest.raises(EvalError, match=message):
        eval_expr(State(), expr)


# -- commit_assert ----------------------------------------------------------------


def test_commit_assert_examples():
    branch = dseq(Clause(Field("major", Ident("medical"))), Clause(Field("tuition", Str("$4,000"))))
    assert commit_assert(State(), branch).bindings == {
        "major": Ident("medical"),
        "tuition": Str("$4,000"),
    }
    s = State({"k": Int(1)})
    proc = Clause(Call("p", (Var("x"),)), Assign("k", Int(2)))
    assert commit_assert(s, proc) == s
    assert commit_assert(State({"speaker": Ident("on")}), Clause(Field("speaker", Ident("off")))).bindings == {
        "speaker": Ident("off")
    }


def test_commit_assert_skips_fields_with_bodies():
    branch = dseq(Clause(Field("a", Int(1)), Assign("z", Int(0))), Clause(Field("b", Int(2))))
    assert commit_assert(State(), branch).bindings == {"b": Int(2)}


# -- budgets ----------------------------------------------------------------------


def test_step_budget(program, source):
    out = run(program("smartphone"), source("smartphone").main, budget=Budget(max_steps=50))
    assert isinstance(out, BudgetExceeded) and "max-steps" in out.reason
    assert out.trace.outcome == "budget-exceeded"


def test_depth_budget():
    g = parse_goal("; ".join(f"a{i} = {i}" for i in range(30)))
    assert isinstance(run(Program(None), g, budget=Budget(max_depth=10)), BudgetExceeded)
    assert isinstance(run(Program(None), g, budget=Budget(max_depth=40)), Success)


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(0, 1)


# -- properties -------------------------------------------------------------------

cases = st.builds(random_case, st.randoms(use_true_random=False))


@settings(max_examples=150)
@given(cases)
def test_rule8_identity(case):
    out = run(case.program, TRUE)
    assert isinstance(out, Success) and out.final == case.program


@settings(max_examples=150)
@given(cases, st.sampled_from(["a", "b", "fresh"]), st.randoms(use_true_random=False))
def test_rule9_single_binding_update(case, var, rng):
    from uchoo.generate import _expr

    expr = _expr(rng, ())
    out = run(case.program, Assign(var, expr))
    try:
        value = eval_expr(case.program.state, expr, symbols(case.program.defs))
    except EvalError:
        assert isinstance(out, Failure)
        return
    expected = dict(case.program.state.bindings)
    expected[var] = value
    assert isinstance(out, Success)
    assert out.final.state.bindings == expected


@settings(max_examples=150)
@given(cases, cases)
def test_rule10_compositionality(c1, c2):
    p, g1, g2 = c1.program, c1.goal, c2.goal
    first = run(p, g1, budget=BIG)
    if not isinstance(first, Success):
        return
    second = run(first.final, g2, budget=BIG)
    if not isinstance(second, Success):
        return
    both = run(p, Seq(g1, g2), budget=BIG)
    assert isinstance(both, Success)
    assert both.final == second.final


PROBE = Call("probe", ())


def with_probe(case, var, value):
    """Prepend a uchoo whose first branch assigns and then fails."""
    failing = Clause(PROBE, Seq(Assign(var, value), AtomGoal(Field("never", Ident("set")))))
    fallback = Clause(PROBE, TRUE)
    return Program(DSeq(Choice((failing, fallback)), case.program.defs), case.program.state)


@settings(max_examples=150)
@given(cases, st.sampled_from(["a", "b", "trail"]), st.integers(50, 99))
def test_backtracking_restores_state(case, var, n):
    p = with_probe(case, var, Int(n))
    out = run(p, AtomGoal(PROBE), budget=BIG)
    assert isinstance(out, Success)
    assert out.final.state == case.program.state
    assert "1 of uchoo#1" in [e.detail for e in out.trace.of_kind("backtrack")]
    assert [e.detail for e in out.trace.of_kind("branch-commit")][-1] == "2 of uchoo#1"


@settings(max_examples=150)
@given(cases)
def test_failure_completeness(case):
    out = run(case.program, case.goal, budget=BIG)
    if not oracle.enumerate(case.program, case.goal):
        assert isinstance(out, Failure)


@settings(max_examples=100)
@given(cases)
def test_determinism(case):
    a = run(case.program, case.goal, budget=BIG)
    b = run(case.program, case.goal, budget=BIG)
    assert a == b


@settings(max_examples=100)
@given(cases, st.integers(1, 400))
def test_budget_monotonicity(case, steps):
    small = run(case.program, case.goal, budget=Budget(steps, 1_000))
    if isinstance(small, Success):
        for bigger in (steps + 1, steps * 2, 100_000):
            assert run(case.program, case.goal, budget=Budget(bigger, 1_000)) == small
