"""Abstract syntax for C^uchoo: terms, goals (G-formulas), definitions (D-formulas).

All nodes are frozen dataclasses, so structural equality and hashing come for
free and values can be shared between choice points without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

KEYWORDS = frozenset(
    {"module", "uchoo", "true", "main", "while", "endwhile", "read", "print", "log"}
)


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Ident:
    """A bare identifier: a symbol constant or a reference to a state variable."""

    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Var:
    """A procedure parameter, bound by an enclosing Forall."""

    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in ("+", "-", "*", "/"):
            raise ValueError(f"unknown operator {self.op!r}")


Term = Union[Ident, Int, Str, Var, BinOp]


# -- atoms -------------------------------------------------------------------


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Field:
    var: str
    value: Term


Atom = Union[Call, Field]


# -- goals -------------------------------------------------------------------


@dataclass(frozen=True)
class TrueGoal:
    pass


TRUE = TrueGoal()


@dataclass(frozen=True)
class AtomGoal:
    atom: Atom


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Term


@dataclass(frozen=True)
class Seq:
    first: Goal
    second: Goal


@dataclass(frozen=True)
class Read:
    var: str


@dataclass(frozen=True)
class Print:
    expr: Term


@dataclass(frozen=True)
class Log:
    message: str


@dataclass(frozen=True)
class While:
    cond: Union[Call, Field, TrueGoal]
    body: Goal


Goal = Union[TrueGoal, AtomGoal, Assign, Seq, Read, Print, Log, While]


# -- definitions -------------------------------------------------------------


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: Goal = TRUE


@dataclass(frozen=True)
class DSeq:
    first: Def
    second: Def


@dataclass(frozen=True)
class Forall:
    var: str
    body: Def


@dataclass(frozen=True)
class Choice:
    branches: tuple[Def, ...]

    def __post_init__(self):
        if not self.branches:
            raise ValueError("uchoo needs at least one branch")


Def = Union[Clause, DSeq, Forall, Choice]


@dataclass(frozen=True)
class Module:
    name: str
    decls: Def


class UnboundVariableError(ValueError):
    """A definition mentions a parameter no enclosing Forall binds."""

    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is not bound by any parameter")
        self.name = name


def seq(*goals: Goal) -> Goal:
    """Right-associated sequence of one or more goals."""
    if not goals:
        return TRUE
    out = goals[-1]
    for g in reversed(goals[:-1]):
        out = Seq(g, out)
    return out


def dseq(*defs: Def) -> Def:
    out = defs[-1]
    for d in reversed(defs[:-1]):
        out = DSeq(d, out)
    return out


# -- groundness and substitution --------------------------------------------


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, BinOp):
        return is_ground(t.left) and is_ground(t.right)
    return True


def _sub_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, BinOp):
        return BinOp(t.op, _sub_term(t.left, var, value), _sub_term(t.right, var, value))
    return t


def _sub_atom(a, var: str, value: Term):
    if isinstance(a, Call):
        return Call(a.name, tuple(_sub_term(x, var, value) for x in a.args))
    if isinstance(a, Field):
        return Field(a.var, _sub_term(a.value, var, value))
    return a  # TRUE as a while condition


def _sub_goal(g: Goal, var: str, value: Term) -> Goal:
    if isinstance(g, AtomGoal):
        return AtomGoal(_sub_atom(g.atom, var, value))
    if isinstance(g, Assign):
        return Assign(g.var, _sub_term(g.expr, var, value))
    if isinstance(g, Seq):
        return Seq(_sub_goal(g.first, var, value), _sub_goal(g.second, var, value))
    if isinstance(g, Print):
        return Print(_sub_term(g.expr, var, value))
    if isinstance(g, While):
        return While(_sub_atom(g.cond, var, value), _sub_goal(g.body, var, value))
    return g


def substitute(d: Def, var: str, t: Term) -> Def:
    """Replace free occurrences of parameter ``var`` in ``d`` by the ground term ``t``.

    An inner ``Forall`` over the same name shadows ``var`` and is left alone.
    """
    if isinstance(d, Clause):
        return Clause(_sub_atom(d.head, var, t), _sub_goal(d.body, var, t))
    if isinstance(d, DSeq):
        return DSeq(substitute(d.first, var, t), substitute(d.second, var, t))
    if isinstance(d, Forall):
        if d.var == var:
            return d
        return Forall(d.var, substitute(d.body, var, t))
    if isinstance(d, Choice):
        return Choice(tuple(substitute(b, var, t) for b in d.branches))
    raise TypeError(f"not a definition: {d!r}")


# -- free variables ----------------------------------------------------------


def _term_vars(t: Term, out: list[str]) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, BinOp):
        _term_vars(t.left, out)
        _term_vars(t.right, out)


def _atom_vars(a, out: list[str]) -> None:
    if isinstance(a, Call):
        for x in a.args:
            _term_vars(x, out)
    elif isinstance(a, Field):
        _term_vars(a.value, out)


def _goal_vars(g: Goal, out: list[str]) -> None:
    if isinstance(g, AtomGoal):
        _atom_vars(g.atom, out)
    elif isinstance(g, Assign):
        _term_vars(g.expr, out)
    elif isinstance(g, Print):
        _term_vars(g.expr, out)
    elif isinstance(g, Seq):
        _goal_vars(g.first, out)
        _goal_vars(g.second, out)
    elif isinstance(g, While):
        _atom_vars(g.cond, out)
        _goal_vars(g.body, out)


def free_vars(node) -> set[str]:
    """Parameters occurring free in a definition, goal, atom or term."""
    if isinstance(node, Clause):
        out: list[str] = []
        _atom_vars(node.head, out)
        _goal_vars(node.body, out)
        return set(out)
    if isinstance(node, DSeq):
        return free_vars(node.first) | free_vars(node.second)
    if isinstance(node, Forall):
        return free_vars(node.body) - {node.var}
    if isinstance(node, Choice):
        return set().union(*(free_vars(b) for b in node.branches))
    out = []
    if isinstance(node, (Call, Field)):
        _atom_vars(node, out)
    elif isinstance(node, (Ident, Int, Str, Var, BinOp)):
        _term_vars(node, out)
    else:
        _goal_vars(node, out)
    return set(out)


def check_closed(d: Def) -> None:
    free = free_vars(d)
    if free:
        raise UnboundVariableError(sorted(free)[0])


# -- symbol constants --------------------------------------------------------


def _value_idents(t: Term, out: set[str]) -> None:
    if isinstance(t, Ident):
        out.add(t.name)


def _atom_symbols(a, out: set[str]) -> None:
    if isinstance(a, Call):
        for x in a.args:
            _value_idents(x, out)
    elif isinstance(a, Field):
        _value_idents(a.value, out)


def _goal_symbols(g: Goal, out: set[str]) -> None:
    if isinstance(g, AtomGoal):
        _atom_symbols(g.atom, out)
    elif isinstance(g, Seq):
        _goal_symbols(g.first, out)
        _goal_symbols(g.second, out)
    elif isinstance(g, While):
        _atom_symbols(g.cond, out)
        _goal_symbols(g.body, out)


def symbols(node) -> frozenset[str]:
    """Identifiers used in value position (field values, call arguments).

    These are the names an expression may use as symbol constants.
    """
    out: set[str] = set()

    def walk(d):
        if isinstance(d, Clause):
            _atom_symbols(d.head, out)
            _goal_symbols(d.body, out)
        elif isinstance(d, DSeq):
            walk(d.first)
            walk(d.second)
        elif isinstance(d, Forall):
            walk(d.body)
        elif isinstance(d, Choice):
            for b in d.branches:
                walk(b)
        elif d is not None:
            _goal_symbols(d, out)

    walk(node)
    return frozenset(out)


def field_names(d: Def | None) -> frozenset[str]:
    """Names of every field declared by a field clause head in ``d``."""
    out: set[str] = set()

    def walk(d):
        if isinstance(d, Clause):
            if isinstance(d.head, Field):
                out.add(d.head.var)
        elif isinstance(d, DSeq):
            walk(d.first)
            walk(d.second)
        elif isinstance(d, Forall):
            walk(d.body)
        elif isinstance(d, Choice):
            for b in d.branches:
                walk(b)

    walk(d)
    return frozenset(out)


# -- pretty printing ---------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def quote(s: str) -> str:
    body = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def _pretty_term(t: Term) -> str:
    if isinstance(t, (Ident, Var)):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Str):
        return quote(t.value)
    if isinstance(t, BinOp):
        p = _PREC[t.op]
        left = _pretty_term(t.left)
        if isinstance(t.left, BinOp) and _PREC[t.left.op] < p:
            left = f"({left})"
        right = _pretty_term(t.right)
        if isinstance(t.right, BinOp) and _PREC[t.right.op] <= p:
            right = f"({right})"
        return f"{left} {t.op} {right}"
    raise TypeError(f"not a term: {t!r}")


def _pretty_atom(a) -> str:
    if isinstance(a, Call):
        return f"{a.name}({', '.join(_pretty_term(x) for x in a.args)})"
    if isinstance(a, Field):
        return f"{a.var} == {_pretty_term(a.value)}"
    if isinstance(a, TrueGoal):
        return "true"
    raise TypeError(f"not an atom: {a!r}")


def _pretty_goal(g: Goal) -> str:
    if isinstance(g, TrueGoal):
        return "true"
    if isinstance(g, AtomGoal):
        return _pretty_atom(g.atom)
    if isinstance(g, Assign):
        return f"{g.var} = {_pretty_term(g.expr)}"
    if isinstance(g, Seq):
        return f"{_pretty_goal(g.first)}; {_pretty_goal(g.second)}"
    if isinstance(g, Read):
        return f"read({g.var})"
    if isinstance(g, Print):
        return f"print({_pretty_term(g.expr)})"
    if isinstance(g, Log):
        return f"log({quote(g.message)})"
    if isinstance(g, While):
        return f"while ({_pretty_atom(g.cond)}) {_pretty_goal(g.body)} endwhile"
    raise TypeError(f"not a goal: {g!r}")


def _pretty_def(d: Def, after_body: bool = False) -> tuple[str, bool]:
    """Text for ``d`` and whether that text ends inside an open clause body.

    ``after_body`` says the preceding text ends in an open body; a bodiless
    clause printed there would be read as one more goal of that body, so it
    gets an explicit ``= true``.
    """
    if isinstance(d, Clause):
        head = _pretty_atom(d.head)
        if d.body == TRUE:
            if after_body:
                return f"{head} = true", True
            return head, False
        return f"{head} = {_pretty_goal(d.body)}", True
    if isinstance(d, Forall):
        return _pretty_def(d.body, after_body)
    if isinstance(d, DSeq):
        left, open_body = _pretty_def(d.first, after_body)
        right, open_body = _pretty_def(d.second, open_body)
        return f"{left}; {right}", open_body
    if isinstance(d, Choice):
        return f"uchoo({', '.join(_pretty_def(b)[0] for b in d.branches)})", False
    raise TypeError(f"not a definition: {d!r}")


def pretty(node) -> str:
    """Concrete syntax for any AST node; the parser reads it back unchanged."""
    if isinstance(node, Module):
        return f"module {node.name}\n  {_pretty_def(node.decls)[0]}\n"
    if isinstance(node, (Clause, DSeq, Forall, Choice)):
        return _pretty_def(node)[0]
    if isinstance(node, (Call, Field)):
        return _pretty_atom(node)
    if isinstance(node, (Ident, Int, Str, Var, BinOp)):
        return _pretty_term(node)
    if hasattr(node, "modules") and hasattr(node, "main"):
        parts = [pretty(m) for m in node.modules]
        parts.append(f"main\n  {_pretty_goal(node.main)}\n")
        return "\n".join(parts)
    return _pretty_goal(node)


def render_value(t: Term) -> str:
    """Display form of a ground value (strings quoted), used by traces and the REPL."""
    return _pretty_term(t)
