"""Brute-force reference semantics used to check the engine.

Rather than searching, this module *replays*: given a vector of branch indices
it runs a fully deterministic interpreter that consumes one index at every
choice point (a definition sequence split or a uchoo block).  Running out of
indices reports how many alternatives the next choice point has, and
:func:`enumerate` grows the vector tree from there, collecting every vector
whose replay succeeds.

Nothing here is shared with :mod:`uchoo.engine`; only the AST types are
common.  The fragment covered is the loop-free, input-free one: ``read`` and
``while`` are rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .syntax import (
    Assign,
    AtomGoal,
    BinOp,
    Call,
    Choice,
    Clause,
    DSeq,
    Field,
    Forall,
    Ident,
    Int,
    Log,
    Print,
    Read,
    Seq,
    Str,
    TrueGoal,
    Var,
    While,
)


class OracleBoundExceeded(Exception):
    pass


class OracleUnsupported(ValueError):
    pass


@dataclass(frozen=True)
class DerivationChoiceVector:
    choices: tuple[tuple[str, int], ...]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for _, i in self.choices)


@dataclass(frozen=True)
class OracleDerivation:
    vector: DerivationChoiceVector
    bindings: dict


class _NeedChoice(Exception):
    def __init__(self, n: int):
        self.n = n


class _Dead(Exception):
    """This replay has no derivation."""


def _collect_constants(node, out: set) -> None:
    def val(t):
        if isinstance(t, Ident):
            out.add(t.name)

    def atom(a):
        if isinstance(a, Call):
            for t in a.args:
                val(t)
        elif isinstance(a, Field):
            val(a.value)

    if node is None:
        return
    if isinstance(node, Clause):
        atom(node.head)
        _collect_constants(node.body, out)
    elif isinstance(node, (DSeq, Seq)):
        _collect_constants(node.first, out)
        _collect_constants(node.second, out)
    elif isinstance(node, Forall):
        _collect_constants(node.body, out)
    elif isinstance(node, Choice):
        for b in node.branches:
            _collect_constants(b, out)
    elif isinstance(node, AtomGoal):
        atom(node.atom)
    elif isinstance(node, While):
        atom(node.cond)
        _collect_constants(node.body, out)


def _arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise _Dead
    # C semantics: the quotient truncates toward zero
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _fold(t):
    """Constant-fold a term with no state; None when it needs a lookup."""
    if isinstance(t, BinOp):
        a, b = _fold(t.left), _fold(t.right)
        if isinstance(a, Int) and isinstance(b, Int):
            try:
                return Int(_arith(t.op, a.value, b.value))
            except _Dead:
                return None
        return None
    return t


def _replace(node, env: dict):
    """Instantiate parameters by rebuilding the node bottom-up."""
    if isinstance(node, Var):
        return env.get(node.name, node)
    if isinstance(node, BinOp):
        return BinOp(node.op, _replace(node.left, env), _replace(node.right, env))
    if isinstance(node, Call):
        return Call(node.name, tuple(_replace(a, env) for a in node.args))
    if isinstance(node, Field):
        return Field(node.var, _replace(node.value, env))
    if isinstance(node, AtomGoal):
        return AtomGoal(_replace(node.atom, env))
    if isinstance(node, Assign):
        return Assign(node.var, _replace(node.expr, env))
    if isinstance(node, Print):
        return Print(_replace(node.expr, env))
    if isinstance(node, Seq):
        return Seq(_replace(node.first, env), _replace(node.second, env))
    if isinstance(node, Clause):
        return Clause(_replace(node.head, env), _replace(node.body, env))
    return node


def _head_vars(head) -> list[str]:
    found = []

    def walk(t):
        if isinstance(t, Var) and t.name not in found:
            found.append(t.name)
        elif isinstance(t, BinOp):
            walk(t.left)
            walk(t.right)

    for t in head.args if isinstance(head, Call) else (head.value,):
        walk(t)
    return found


def _same_head(head, atom) -> bool:
    if isinstance(head, Call) and isinstance(atom, Call):
        return (
            head.name == atom.name
            and len(head.args) == len(atom.args)
            and all(_fold(h) == a for h, a in zip(head.args, atom.args))
        )
    if isinstance(head, Field) and isinstance(atom, Field):
        return head.var == atom.var and _fold(head.value) == atom.value
    return False


class _Replay:
    def __init__(self, defs, constants, vector, depth_limit):
        self.defs = defs
        self.constants = constants
        self.vector = vector
        self.depth_limit = depth_limit
        self.cursor = 0
        self.taken: list[tuple[str, int]] = []

    def pick(self, label: str, n: int) -> int:
        if self.cursor == len(self.vector):
            raise _NeedChoice(n)
        i = self.vector[self.cursor]
        self.cursor += 1
        self.taken.append((f"{label}@{len(self.taken)}", i))
        return i

    # values

    def expr(self, state: dict, t):
        if isinstance(t, (Int, Str)):
            return t
        if isinstance(t, Ident):
            if t.name in state:
                return state[t.name]
            if t.name in self.constants or t in state.values():
                return t
            raise _Dead
        if isinstance(t, BinOp):
            a, b = self.expr(state, t.left), self.expr(state, t.right)
            if not (isinstance(a, Int) and isinstance(b, Int)):
                raise _Dead
            return Int(_arith(t.op, a.value, b.value))
        raise _Dead  # a parameter that was never instantiated

    def value(self, state: dict, t):
        if isinstance(t, (Int, Str, Ident)):
            return t
        return self.expr(state, t)

    # execution

    def ex(self, state: dict, g, depth: int) -> dict:
        if depth > self.depth_limit:
            raise _Dead
        if isinstance(g, TrueGoal):
            return state
        if isinstance(g, Assign):
            new = dict(state)
            new[g.var] = self.expr(state, g.expr)
            return new
        if isinstance(g, Seq):
            mid = self.ex(state, g.first, depth + 1)
            return self.ex(mid, g.second, depth + 1)
        if isinstance(g, AtomGoal):
            a = g.atom
            if isinstance(a, Call):
                atom = Call(a.name, tuple(self.value(state, t) for t in a.args))
            else:
                atom = Field(a.var, self.value(state, a.value))
                if a.var in state and state[a.var] == atom.value:
                    return state
            if self.defs is None:
                raise _Dead
            return self.bc(self.defs, state, atom, depth + 1)
        if isinstance(g, Print):
            self.expr(state, g.expr)
            return state
        if isinstance(g, Log):
            return state
        if isinstance(g, (Read, While)):
            raise OracleUnsupported(f"oracle cannot run {type(g).__name__}")
        raise TypeError(g)

    def bc(self, d, state: dict, atom, depth: int) -> dict:
        if depth > self.depth_limit:
            raise _Dead
        if isinstance(d, Forall):
            params = []
            inner = d
            while isinstance(inner, Forall):
                params.append(inner.var)
                inner = inner.body
            if not isinstance(inner, Clause):
                raise OracleUnsupported("parameters must scope over a single clause")
            return self.clause(inner, state, atom, depth)
        if isinstance(d, Clause):
            return self.clause(d, state, atom, depth)
        if isinstance(d, DSeq):
            side = self.pick("dseq", 2)
            return self.bc(d.second if side else d.first, state, atom, depth + 1)
        if isinstance(d, Choice):
            i = self.pick("uchoo", len(d.branches))
            branch = d.branches[i]
            after = dict(self.bc(branch, state, atom, depth + 1))
            for fact in _facts(branch):
                after[fact.var] = _fold(fact.value)
            return after
        raise TypeError(d)

    def clause(self, c: Clause, state: dict, atom, depth: int) -> dict:
        names = _head_vars(c.head)
        if isinstance(atom, Call):
            pool = list(dict.fromkeys(atom.args))
        else:
            pool = [atom.value]
        hits = []
        for combo in itertools.product(pool, repeat=len(names)):
            inst = _replace(c, dict(zip(names, combo)))
            if _same_head(inst.head, atom):
                hits.append(inst)
        if not hits:
            raise _Dead
        assert len(hits) == 1, hits
        return self.ex(state, hits[0].body, depth + 1)


def _facts(branch) -> list[Field]:
    if isinstance(branch, DSeq):
        return _facts(branch.first) + _facts(branch.second)
    if (
        isinstance(branch, Clause)
        and isinstance(branch.head, Field)
        and isinstance(branch.body, TrueGoal)
        and isinstance(_fold(branch.head.value), (Int, Str, Ident))
    ):
        return [branch.head]
    return []


def enumerate(p, g, depth: int = 64, max_replays: int = 100_000, max_choices: int = 64):
    """Every successful derivation of goal ``g`` from program ``p``.

    Returns a list of :class:`OracleDerivation` in lexicographic order of
    choice vectors; an empty list means no derivation exists within ``depth``.
    """
    constants: set = set()
    _collect_constants(p.defs, constants)
    _collect_constants(g, constants)
    start = dict(p.state.bindings)
    found = []
    stack: list[tuple[int, ...]] = [()]
    replays = 0
    while stack:
        vec = stack.pop()
        replays += 1
        if replays > max_replays:
            raise OracleBoundExceeded(f"more than {max_replays} replays")
        if len(vec) > max_choices:
            raise OracleBoundExceeded(f"more than {max_choices} choice points on one path")
        r = _Replay(p.defs, constants, vec, depth)
        try:
            final = r.ex(start, g, 0)
        except _NeedChoice as need:
            stack.extend(vec + (i,) for i in reversed(range(need.n)))
            continue
        except _Dead:
            continue
        found.append(OracleDerivation(DerivationChoiceVector(tuple(r.taken)), final))
    found.sort(key=lambda d: d.vector.indices)
    return found
