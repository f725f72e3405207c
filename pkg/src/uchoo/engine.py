"""Execution and backchaining for C^uchoo.

The two judgements of the operational semantics map onto two generator
methods of :class:`Machine`:

* ``exec_goal(prog, goal)`` yields every program ``prog'`` such that the goal
  executes successfully from ``prog`` (execution phase);
* ``backchain(d, prog, atom)`` yields every ``prog'`` obtained by resolving the
  ground atom against definition ``d`` (backchaining phase).

Generators give depth-first search with chronological backtracking for free:
asking a suspended generator for its next solution *is* backtracking into its
most recent choice point.  States are immutable, so resuming an older choice
point automatically sees the state as it was when that choice was made.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Protocol, Union

from .syntax import (
    TRUE,
    Assign,
    AtomGoal,
    BinOp,
    Call,
    Choice,
    Clause,
    Def,
    DSeq,
    Field,
    Forall,
    Goal,
    Ident,
    Int,
    KEYWORDS,
    Log,
    Print,
    Read,
    Seq,
    Str,
    Term,
    TrueGoal,
    Var,
    While,
    field_names,
    pretty,
    render_value,
    substitute,
    symbols,
)
from .trace import Derivation, Tracer

# rule numbers, as in the numbered definition of ex/bc
R_CALL, R_FIELD, R_FORALL, R_LEFT, R_RIGHT, R_CHOICE, R_ATOM, R_TRUE, R_ASSIGN, R_SEQ = range(1, 11)


# -- machine state -------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class State:
    """Variable bindings (the machine state θ).  Never mutated after construction."""

    bindings: Mapping[str, Term] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bindings", dict(self.bindings))

    def __contains__(self, name: str) -> bool:
        return name in self.bindings

    def __getitem__(self, name: str) -> Term:
        return self.bindings[name]

    def get(self, name: str, default=None):
        return self.bindings.get(name, default)

    def set(self, name: str, value: Term) -> State:
        b = dict(self.bindings)
        b[name] = value
        return State(b)

    def holds_symbol(self, name: str) -> bool:
        return Ident(name) in self.bindings.values()

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Program:
    """A definition (all module declarations joined in file order) plus a state."""

    defs: Def | None
    state: State = field(default_factory=State)


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000
    max_depth: int = 200

    def __post_init__(self):
        if self.max_steps < 1 or self.max_depth < 1:
            raise ValueError("budget limits must be at least 1")


@dataclass(frozen=True)
class Success:
    final: Program
    trace: Derivation


@dataclass(frozen=True)
class Failure:
    trace: Derivation


@dataclass(frozen=True)
class BudgetExceeded:
    trace: Derivation
    reason: str


Outcome = Union[Success, Failure, BudgetExceeded]


class EvalError(Exception):
    pass


class _OutOfBudget(Exception):
    pass


# -- I/O ----------------------------------------------------------------------


class IoPort(Protocol):
    def next_input(self) -> str | None: ...

    def emit(self, text: str) -> None: ...


class ScriptedIO:
    """Inputs from a list, outputs collected in ``self.output``."""

    def __init__(self, inputs=()):
        self._inputs = list(inputs)
        self._pos = 0
        self.output: list[str] = []

    def next_input(self) -> str | None:
        if self._pos >= len(self._inputs):
            return None
        self._pos += 1
        return self._inputs[self._pos - 1]

    def emit(self, text: str) -> None:
        self.output.append(text)


class StreamIO:
    def __init__(self, infile, outfile):
        self.infile = infile
        self.outfile = outfile

    def next_input(self) -> str | None:
        line = self.infile.readline()
        return line if line else None

    def emit(self, text: str) -> None:
        self.outfile.write(text + "\n")
        self.outfile.flush()


_INT_RE = re.compile(r"-?\d+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_input_value(raw: str) -> Term:
    """Interpret one line of user input as a ground value."""
    text = raw.strip()
    if _INT_RE.fullmatch(text):
        return Int(int(text))
    if _IDENT_RE.fullmatch(text) and text not in KEYWORDS:
        return Ident(text)
    return Str(text)


def display(value: Term) -> str:
    """What ``print`` writes: strings without quotes, everything else as written."""
    if isinstance(value, Str):
        return value.value
    return render_value(value)


# -- evaluation ---------------------------------------------------------------


def _c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def eval_expr(s: State, e: Term, constants=frozenset()) -> Term:
    """Evaluate an expression to a ground value.

    An identifier reads the state; if unbound it stands for itself only when it
    is a known symbol constant (``constants``, or already held as a value in
    ``s``).  Raises :class:`EvalError` otherwise.
    """
    if isinstance(e, (Int, Str)):
        return e
    if isinstance(e, Ident):
        if e.name in s:
            return s[e.name]
        if e.name in constants or s.holds_symbol(e.name):
            return e
        raise EvalError(f"unbound variable {e.name}")
    if isinstance(e, Var):
        raise EvalError(f"unbound parameter {e.name}")
    if isinstance(e, BinOp):
        left = eval_expr(s, e.left, constants)
        right = eval_expr(s, e.right, constants)
        if not (isinstance(left, Int) and isinstance(right, Int)):
            raise EvalError(
                f"type mismatch: {render_value(left)} {e.op} {render_value(right)}"
            )
        a, b = left.value, right.value
        if e.op == "+":
            return Int(a + b)
        if e.op == "-":
            return Int(a - b)
        if e.op == "*":
            return Int(a * b)
        if b == 0:
            raise EvalError("division by zero")
        return Int(_c_div(a, b))
    raise TypeError(f"not a term: {e!r}")


def eval_value(s: State, t: Term, constants=frozenset()) -> Term:
    """Evaluate a term in value position (field value, call argument).

    Bare identifiers there are symbol constants and are not looked up.
    """
    if isinstance(t, (Int, Str, Ident)):
        return t
    return eval_expr(s, t, constants)


def _literal(t: Term) -> Term:
    if isinstance(t, BinOp):
        try:
            return eval_expr(State(), t)
        except EvalError:
            return t
    return t


def match_atom(head, call) -> dict[str, Term] | None:
    """One-way match of a clause head against a ground atom.

    Returns the parameter bindings, or None when the head does not apply.
    """
    if isinstance(head, Call) and isinstance(call, Call):
        if head.name != call.name or len(head.args) != len(call.args):
            return None
        sigma: dict[str, Term] = {}
        for h, c in zip(head.args, call.args):
            if isinstance(h, Var):
                if h.name in sigma and sigma[h.name] != c:
                    return None
                sigma[h.name] = c
            elif _literal(h) != c:
                return None
        return sigma
    if isinstance(head, Field) and isinstance(call, Field):
        if head.var != call.var:
            return None
        if isinstance(head.value, Var):
            return {head.value.name: call.value}
        return {} if _literal(head.value) == call.value else None
    return None


def _spine(d: Def) -> list[Def]:
    if isinstance(d, DSeq):
        return _spine(d.first) + _spine(d.second)
    return [d]


def committed_fields(branch: Def) -> list[tuple[str, Term]]:
    """Field facts ``x == v`` on the top-level sequence spine of a uchoo branch."""
    out = []
    for d in _spine(branch):
        if isinstance(d, Clause) and isinstance(d.head, Field) and d.body == TRUE:
            v = _literal(d.head.value)
            if not isinstance(v, (Var, BinOp)):
                out.append((d.head.var, v))
    return out


def commit_assert(s: State, branch: Def) -> State:
    """Install the field facts of a chosen branch into the state."""
    for name, value in committed_fields(branch):
        s = s.set(name, value)
    return s


# -- search --------------------------------------------------------------------


class Machine:
    """One run's search engine.  Not shared between runs."""

    def __init__(self, defs, io: IoPort, budget: Budget, tracer: Tracer, constants=frozenset()):
        self.defs = defs
        self.io = io
        self.budget = budget
        self.tracer = tracer
        self.constants = frozenset(constants)
        self.fields = field_names(defs)
        self.steps = 0
        self._choice_ids = 0

    def _tick(self, depth: int) -> None:
        self.steps += 1
        if self.steps > self.budget.max_steps:
            raise _OutOfBudget(f"max-steps {self.budget.max_steps} exceeded")
        if depth > self.budget.max_depth:
            raise _OutOfBudget(f"max-depth {self.budget.max_depth} exceeded")

    def _ev(self, kind, detail="", depth=0, rule=None):
        self.tracer.emit(kind, detail, depth, rule)

    def _update(self, prog: Program, changes: list[tuple[str, Term]], depth: int) -> Program:
        s = prog.state
        for name, value in changes:
            if s.get(name) != value:
                s = s.set(name, value)
                self._ev("state-update", f"{name}={render_value(value)}", depth)
        return Program(prog.defs, s)

    # execution phase

    def exec_goal(self, prog: Program, g: Goal, depth: int = 0) -> Iterator[Program]:
        self._tick(depth)
        if isinstance(g, TrueGoal):
            self._ev("rule-applied", "true", depth, R_TRUE)
            yield prog
        elif isinstance(g, Assign):
            try:
                value = eval_expr(prog.state, g.expr, self.constants)
            except EvalError as exc:
                self._ev("failure", str(exc), depth)
                return
            self._ev("rule-applied", f"{g.var} = {render_value(value)}", depth, R_ASSIGN)
            yield self._update(prog, [(g.var, value)], depth)
        elif isinstance(g, Seq):
            self._ev("rule-applied", "seqand", depth, R_SEQ)
            for mid in self.exec_goal(prog, g.first, depth + 1):
                yield from self.exec_goal(mid, g.second, depth + 1)
        elif isinstance(g, AtomGoal):
            try:
                atom = self._ground(prog.state, g.atom)
            except EvalError as exc:
                self._ev("failure", str(exc), depth)
                return
            yield from self.solve_atom(prog, atom, depth)
        elif isinstance(g, Read):
            yield from self._read(prog, g.var, depth)
        elif isinstance(g, Print):
            try:
                value = eval_expr(prog.state, g.expr, self.constants)
            except EvalError as exc:
                self._ev("failure", str(exc), depth)
                return
            text = display(value)
            self.io.emit(text)
            self._ev("io-emit", text, depth)
            yield prog
        elif isinstance(g, Log):
            self.io.emit(g.message)
            self._ev("io-emit", g.message, depth)
            yield prog
        elif isinstance(g, While):
            yield from self._while(prog, g, depth)
        else:
            raise TypeError(f"not a goal: {g!r}")

    def _ground(self, s: State, atom):
        if isinstance(atom, Call):
            return Call(atom.name, tuple(eval_value(s, a, self.constants) for a in atom.args))
        return Field(atom.var, eval_value(s, atom.value, self.constants))

    def solve_atom(self, prog: Program, atom, depth: int) -> Iterator[Program]:
        """A ground atom: a boolean test against the state, else a procedure call."""
        if isinstance(atom, Field) and prog.state.get(atom.var) == atom.value:
            self._ev("rule-applied", f"{pretty(atom)} holds", depth)
            yield prog
            return
        self._ev("rule-applied", pretty(atom), depth, R_ATOM)
        if self.defs is not None:
            yield from self.backchain(self.defs, prog, atom, depth + 1)

    def _read(self, prog: Program, name: str, depth: int) -> Iterator[Program]:
        raw = self.io.next_input()
        if raw is None:
            self._ev("failure", f"read({name}): end of input", depth)
            return
        value = parse_input_value(raw)
        self._ev("io-read", f"{name}={render_value(value)}", depth)
        if name in self.fields:
            yield from self.solve_atom(prog, Field(name, value), depth + 1)
        else:
            self._ev("rule-applied", f"{name} = {render_value(value)}", depth, R_ASSIGN)
            yield self._update(prog, [(name, value)], depth)

    def _first(self, gen: Iterator[Program]) -> Program | None:
        try:
            return next(gen, None)
        finally:
            gen.close()

    def _while(self, prog: Program, g: While, depth: int) -> Iterator[Program]:
        while True:
            self._tick(depth)
            cond = g.cond
            if isinstance(cond, TrueGoal):
                holds = True
            elif isinstance(cond, Field):
                try:
                    atom = self._ground(prog.state, cond)
                except EvalError as exc:
                    self._ev("failure", str(exc), depth)
                    return
                holds = prog.state.get(atom.var) == atom.value
            else:
                try:
                    atom = self._ground(prog.state, cond)
                except EvalError as exc:
                    self._ev("failure", str(exc), depth)
                    return
                after = self._first(self.solve_atom(prog, atom, depth + 1))
                holds = after is not None
                if holds:
                    prog = after
            if not holds:
                self._ev("rule-applied", f"while ({pretty(cond)}) exits", depth)
                yield prog
                return
            self._ev("rule-applied", f"while ({pretty(cond)}) iterates", depth)
            after = self._first(self.exec_goal(prog, g.body, depth + 1))
            if after is None:
                self._ev("failure", "while body failed", depth)
                return
            prog = after

    # backchaining phase

    def backchain(self, d: Def, prog: Program, atom, depth: int) -> Iterator[Program]:
        self._tick(depth)
        if isinstance(d, Clause):
            sigma = match_atom(d.head, atom)
            if sigma is None:
                return
            clause = d
            for name, value in sigma.items():
                self._ev("rule-applied", f"[{render_value(value)}/{name}]", depth, R_FORALL)
                clause = substitute(clause, name, value)
            rule = R_CALL if isinstance(atom, Call) else R_FIELD
            self._ev("rule-applied", pretty(atom), depth, rule)
            yield from self.exec_goal(prog, clause.body, depth + 1)
        elif isinstance(d, Forall):
            # instantiation happens when the clause head is matched
            yield from self.backchain(d.body, prog, atom, depth + 1)
        elif isinstance(d, DSeq):
            self._ev("rule-applied", "left", depth, R_LEFT)
            yield from self.backchain(d.first, prog, atom, depth + 1)
            self._ev("rule-applied", "right", depth, R_RIGHT)
            yield from self.backchain(d.second, prog, atom, depth + 1)
        elif isinstance(d, Choice):
            self._choice_ids += 1
            cid = f"uchoo#{self._choice_ids}"
            self._ev("choice-enter", cid, depth, R_CHOICE)
            for i, branch in enumerate(d.branches, 1):
                self._ev("branch-try", f"{i} of {cid}", depth)
                for after in self.backchain(branch, prog, atom, depth + 1):
                    self._ev("branch-commit", f"{i} of {cid}", depth)
                    yield self._update(after, committed_fields(branch), depth)
                self._ev("backtrack", f"{i} of {cid}", depth)
        else:
            raise TypeError(f"not a definition: {d!r}")


def run(
    p: Program,
    g: Goal,
    io: IoPort | None = None,
    budget: Budget | None = None,
    constants=None,
) -> Outcome:
    """Execute goal ``g`` against program ``p``; first solution wins."""
    io = io if io is not None else ScriptedIO()
    budget = budget or Budget()
    if constants is None:
        constants = symbols(p.defs) | symbols(g)
    tracer = Tracer()
    machine = Machine(p.defs, io, budget, tracer, constants)
    gen = machine.exec_goal(p, g, 0)
    try:
        final = next(gen, None)
    except _OutOfBudget as exc:
        tracer.emit("failure", f"budget exceeded: {exc}")
        return BudgetExceeded(tracer.finish("budget-exceeded"), str(exc))
    finally:
        gen.close()
    if final is None:
        tracer.emit("failure", "no derivation")
        return Failure(tracer.finish("failure"))
    return Success(final, tracer.finish("success"))


def join_modules(modules) -> Def | None:
    decls = [m.decls for m in modules]
    if not decls:
        return None
    out = decls[-1]
    for d in reversed(decls[:-1]):
        out = DSeq(d, out)
    return out


def load(source) -> Program:
    """Program for a parsed :class:`~uchoo.parser.SourceFile`, with empty state."""
    return Program(join_modules(source.modules), State())
