"""Random C^uchoo programs for property tests and oracle sweeps.

Two families:

* :func:`random_case` builds small terminating programs in the loop-free,
  input-free fragment the oracle understands.  Procedures are ranked and a
  body may only call lower-ranked procedures, so every search is finite.
* :func:`random_source` builds arbitrary parser-normal ASTs (every construct,
  awkward literals) for round-trip testing.  These are never executed.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .engine import Program, State
from .syntax import (
    KEYWORDS,
    TRUE,
    Assign,
    AtomGoal,
    BinOp,
    Call,
    Choice,
    Clause,
    Def,
    Field,
    Forall,
    Goal,
    Ident,
    Int,
    Log,
    Module,
    Print,
    Read,
    Str,
    Term,
    Var,
    While,
    dseq,
    seq,
)

FIELDS = ("a", "b")
SYMBOLS = ("on", "off")
# name -> arity; a procedure may only call procedures listed before it
PROCS = (("p", 1), ("q", 0), ("r", 1))
PARAM = "x"


@dataclass
class Case:
    program: Program
    goal: Goal
    choice_points: int


def _value(rng: random.Random) -> Term:
    if rng.random() < 0.5:
        return Int(rng.randint(0, 1))
    return Ident(rng.choice(SYMBOLS))


def _expr(rng: random.Random, params: tuple[str, ...], depth: int = 0) -> Term:
    roll = rng.random()
    if depth < 2 and roll < 0.3:
        op = rng.choice("+-*/")
        return BinOp(op, _expr(rng, params, depth + 1), _expr(rng, params, depth + 1))
    if roll < 0.55:
        return Int(rng.randint(0, 3))
    if params and roll < 0.7:
        return Var(rng.choice(params))
    return Ident(rng.choice(FIELDS))


def _call(rng: random.Random, name: str, arity: int, params) -> Call:
    args = []
    for _ in range(arity):
        if params and rng.random() < 0.3:
            args.append(Var(rng.choice(params)))
        else:
            args.append(_value(rng))
    return Call(name, tuple(args))


def _goal_item(rng, callable_procs, params, allow_fields=True) -> Goal:
    roll = rng.random()
    if allow_fields and roll < 0.4:
        v = Var(rng.choice(params)) if params and rng.random() < 0.2 else _value(rng)
        return AtomGoal(Field(rng.choice(FIELDS), v))
    if callable_procs and roll < 0.65:
        name, arity = rng.choice(callable_procs)
        return AtomGoal(_call(rng, name, arity, params))
    if roll < 0.9:
        return Assign(rng.choice(FIELDS), _expr(rng, params))
    return TRUE


def _goal(rng, callable_procs, params, n_max=3, allow_fields=True) -> Goal:
    n = rng.randint(1, n_max)
    return seq(*(_goal_item(rng, callable_procs, params, allow_fields) for _ in range(n)))


def _clause(rng: random.Random) -> Def:
    if rng.random() < 0.45:
        # field definition: a fact, or a body that only assigns
        head = Field(rng.choice(FIELDS), _value(rng))
        body = TRUE if rng.random() < 0.6 else _goal(rng, (), (), 2, allow_fields=False)
        return Clause(head, body)
    rank = rng.randrange(len(PROCS))
    name, arity = PROCS[rank]
    callable_procs = PROCS[:rank]
    if arity and rng.random() < 0.7:
        head = Call(name, (Var(PARAM),))
        params: tuple[str, ...] = (PARAM,)
    else:
        head = Call(name, tuple(_value(rng) for _ in range(arity)))
        params = ()
    body = TRUE if rng.random() < 0.25 else _goal(rng, callable_procs, params)
    d: Def = Clause(head, body)
    return Forall(PARAM, d) if params else d


def random_case(rng: random.Random, max_choices: int = 3, max_branches: int = 3) -> Case:
    """A terminating program, a goal and an initial state.

    At most ``max_choices`` uchoo blocks, each with at most ``max_branches``
    branches.
    """
    budget = rng.randint(0, max_choices)
    used = 0
    items: list[Def] = []
    for _ in range(rng.randint(2, 5)):
        if used < budget and rng.random() < 0.5:
            used += 1
            branches = []
            for _ in range(rng.randint(2, max_branches)):
                parts = [_clause(rng) for _ in range(rng.randint(1, 2))]
                branches.append(dseq(*parts))
            items.append(Choice(tuple(branches)))
        else:
            items.append(_clause(rng))
    state = {f: _value(rng) for f in FIELDS if rng.random() < 0.5}
    goal = _goal(rng, PROCS, (), 3)
    return Case(Program(dseq(*items), State(state)), goal, used)


# -- round-trip ASTs -----------------------------------------------------------

_NAMES = ("a", "b", "speaker", "major", "tuition", "sw", "n1", "on", "off", "x_y")
_PARAMS = ("x", "y", "z")


def _name(rng: random.Random) -> str:
    if rng.random() < 0.8:
        return rng.choice(_NAMES)
    while True:
        s = rng.choice(string.ascii_letters + "_") + "".join(
            rng.choice(string.ascii_letters + string.digits + "_") for _ in range(rng.randint(0, 5))
        )
        if s not in KEYWORDS and s not in _PARAMS:
            return s


def _text(rng: random.Random) -> str:
    alphabet = "ab $,.%;=()-\"\\\t\nμ"
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))


def _rt_term(rng, params, depth=0) -> Term:
    roll = rng.random()
    if depth < 3 and roll < 0.25:
        return BinOp(rng.choice("+-*/"), _rt_term(rng, params, depth + 1), _rt_term(rng, params, depth + 1))
    if roll < 0.45:
        return Int(rng.randint(-20, 2000))
    if roll < 0.6:
        return Str(_text(rng))
    if params and roll < 0.75:
        return Var(rng.choice(params))
    return Ident(_name(rng))


def _rt_atom(rng, params):
    if rng.random() < 0.5:
        return Field(_name(rng), _rt_term(rng, params))
    return Call(_name(rng), tuple(_rt_term(rng, params) for _ in range(rng.randint(0, 3))))


def _rt_goal_item(rng, params, depth) -> Goal:
    roll = rng.random()
    if roll < 0.1:
        return TRUE
    if roll < 0.35:
        return AtomGoal(_rt_atom(rng, params))
    if roll < 0.55:
        return Assign(_name(rng), _rt_term(rng, params))
    if roll < 0.62:
        return Read(_name(rng))
    if roll < 0.72:
        return Print(_rt_term(rng, params))
    if roll < 0.82:
        return Log(_text(rng))
    if depth < 2:
        cond = TRUE if rng.random() < 0.3 else _rt_atom(rng, params)
        return While(cond, _rt_goal(rng, params, depth + 1))
    return TRUE


def _rt_goal(rng, params=(), depth=0) -> Goal:
    return seq(*(_rt_goal_item(rng, params, depth) for _ in range(rng.randint(1, 3))))


def _rt_clause(rng) -> Def:
    if rng.random() < 0.4:
        head = Field(_name(rng), _rt_term(rng, ()))
        body = TRUE if rng.random() < 0.5 else _rt_goal(rng)
        return Clause(head, body)
    # parser-normal: identifiers in a call head are parameters, quantified in order
    args = []
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.5:
            args.append(Var(rng.choice(_PARAMS)))
        else:
            args.append(rng.choice([Int(rng.randint(-5, 50)), Str(_text(rng))]))
    params = tuple(dict.fromkeys(a.name for a in args if isinstance(a, Var)))
    body = TRUE if rng.random() < 0.3 else _rt_goal(rng, params)
    d: Def = Clause(Call(_name(rng), tuple(args)), body)
    for p in reversed(params):
        d = Forall(p, d)
    return d


def _rt_def(rng, depth=0) -> Def:
    items = []
    for _ in range(rng.randint(1, 3)):
        if depth < 2 and rng.random() < 0.3:
            items.append(Choice(tuple(_rt_def(rng, depth + 1) for _ in range(rng.randint(1, 3)))))
        else:
            items.append(_rt_clause(rng))
    return dseq(*items)


def random_source(rng: random.Random):
    """A parser-normal SourceFile AST."""
    from .parser import SourceFile

    names = []
    for _ in range(rng.randint(0, 2)):
        n = _name(rng)
        if n not in names:
            names.append(n)
    modules = tuple(Module(n, _rt_def(rng)) for n in names)
    return SourceFile(modules, _rt_goal(rng))
