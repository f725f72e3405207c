"""Lexer and recursive-descent parser for ``.uch`` source files.

Grammar (``;`` is right-associative in both goal and definition position)::

    file    := module* "main" goal
    module  := "module" IDENT decl
    decl    := clause | decl ";" decl | "uchoo" "(" decl ("," decl)* ")"
    clause  := atom ["=" goal]
    atom    := IDENT "(" [expr ("," expr)*] ")" | IDENT "==" expr
    goal    := "true" | atom | IDENT "=" expr | goal ";" goal
             | "read" "(" IDENT ")" | "print" "(" expr ")" | "log" "(" STRING ")"
             | "while" ["("] cond [")"] goal "endwhile"

Inside a clause body a ``;`` ends the body when what follows can only be a
definition (``uchoo``, or an atom followed by ``=``).  A trailing ``;`` is
allowed wherever the sequence is closed by something else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

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
    DSeq,
    Field,
    Forall,
    Goal,
    Ident,
    Int,
    Log,
    Module,
    Print,
    Read,
    Seq,
    Str,
    Term,
    UnboundVariableError,
    Var,
    While,
    check_closed,
)


class Token(NamedTuple):
    kind: str
    value: str
    line: int
    col: int


class ParseError(Exception):
    def __init__(self, line: int, column: int, expected: str, found: str):
        super().__init__(f"line {line}, column {column}: expected {expected}, found {found}")
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class SourceFile:
    modules: tuple[Module, ...]
    main: Goal


_PUNCT = {
    ";": "semi",
    ",": "comma",
    "(": "lparen",
    ")": "rparen",
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
}
_OPS = {"plus": "+", "minus": "-", "star": "*", "slash": "/"}
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def bump(k: int) -> None:
        nonlocal i, line, col
        for ch in src[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            bump(1)
        elif ch == "%":
            while i < n and src[i] != "\n":
                bump(1)
        elif ch == "=":
            if src.startswith("==", i):
                toks.append(Token("eqeq", "==", line, col))
                bump(2)
            else:
                toks.append(Token("eq", "=", line, col))
                bump(1)
        elif ch in _PUNCT:
            toks.append(Token(_PUNCT[ch], ch, line, col))
            bump(1)
        elif ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], line, col))
            bump(j - i)
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            toks.append(Token("keyword" if word in KEYWORDS else "ident", word, line, col))
            bump(j - i)
        elif ch == '"':
            start_line, start_col = line, col
            j = i + 1
            buf = []
            while True:
                if j >= n or src[j] == "\n":
                    raise ParseError(start_line, start_col, "closing '\"'", "end of line")
                c = src[j]
                if c == '"':
                    break
                if c == "\\":
                    esc = src[j + 1] if j + 1 < n else ""
                    if esc not in _ESCAPES:
                        raise ParseError(line, col + (j - i), "string escape", repr("\\" + esc))
                    buf.append(_ESCAPES[esc])
                    j += 2
                else:
                    buf.append(c)
                    j += 1
            toks.append(Token("string", "".join(buf), start_line, start_col))
            bump(j + 1 - i)
        else:
            raise ParseError(line, col, "a token", repr(ch))
    return toks


def _describe(tok: Token | None) -> str:
    if tok is None:
        return "end of input"
    if tok.kind == "string":
        return f"string {tok.value!r}"
    return repr(tok.value)


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.pos = 0
        self.params: frozenset[str] = frozenset()
        lines = src.split("\n")
        self.eof_pos = (len(lines), len(lines[-1]) + 1)

    # -- token helpers -------------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        j = self.pos + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, kind: str, value: str | None = None, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind == kind and (value is None or t.value == value)

    def fail(self, expected: str):
        t = self.peek()
        line, col = (t.line, t.col) if t else self.eof_pos
        raise ParseError(line, col, expected, _describe(t))

    def expect(self, kind: str, value: str | None = None, what: str | None = None) -> Token:
        if not self.at(kind, value):
            self.fail(what or repr(value or kind))
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    # -- file / modules ------------------------------------------------------

    def file(self) -> SourceFile:
        modules = []
        seen = set()
        while self.at("keyword", "module"):
            tok = self.peek()
            m = self.module()
            if m.name in seen:
                raise ParseError(tok.line, tok.col, "a unique module name", repr(m.name))
            seen.add(m.name)
            modules.append(m)
        self.expect("keyword", "main", "'module' or 'main'")
        main = self.goal_seq()
        self.finish()
        return SourceFile(tuple(modules), main)

    def finish(self) -> None:
        if not self.at_end():
            self.fail("end of input")

    def module(self) -> Module:
        self.expect("keyword", "module")
        name = self.expect("ident", what="module name").value
        return Module(name, self.decl_seq())

    # -- definitions ---------------------------------------------------------

    def _decl_closed(self) -> bool:
        return (
            self.at_end()
            or self.at("keyword", "module")
            or self.at("keyword", "main")
            or self.at("rparen")
            or self.at("comma")
        )

    def decl_seq(self) -> Def:
        d = self.decl()
        if self.at("semi"):
            self.pos += 1
            if self._decl_closed():
                return d
            return DSeq(d, self.decl_seq())
        return d

    def decl(self) -> Def:
        if self.at("keyword", "uchoo"):
            self.pos += 1
            self.expect("lparen")
            branches = [self.decl_seq()]
            while self.at("comma"):
                self.pos += 1
                branches.append(self.decl_seq())
            self.expect("rparen", what="',' or ')'")
            return Choice(tuple(branches))
        return self.clause()

    def clause(self) -> Def:
        start = self.peek()
        head = self.atom()
        params: list[str] = []
        if isinstance(head, Call):
            for a in head.args:
                if isinstance(a, Ident) and a.name not in params:
                    params.append(a.name)
            head = Call(
                head.name,
                tuple(Var(a.name) if isinstance(a, Ident) else a for a in head.args),
            )
        body: Goal = TRUE
        if self.at("eq"):
            self.pos += 1
            saved, self.params = self.params, frozenset(params)
            try:
                body = self.goal_seq(in_body=True)
            finally:
                self.params = saved
        d: Def = Clause(head, body)
        for p in reversed(params):
            d = Forall(p, d)
        try:
            check_closed(d)
        except UnboundVariableError as exc:
            raise ParseError(start.line, start.col, "a closed clause", f"free variable {exc.name!r}")
        return d

    def _decl_starts_here(self) -> bool:
        if self.at("keyword", "uchoo"):
            return True
        if not self.at("ident"):
            return False
        saved = self.pos
        try:
            self.atom()
            return self.at("eq")
        except ParseError:
            return False
        finally:
            self.pos = saved

    # -- goals ---------------------------------------------------------------

    def _goal_closed(self) -> bool:
        return (
            self.at_end()
            or self.at("keyword", "endwhile")
            or self.at("keyword", "module")
            or self.at("keyword", "main")
            or self.at("rparen")
            or self.at("comma")
        )

    def goal_seq(self, in_body: bool = False) -> Goal:
        g = self.goal()
        if not self.at("semi"):
            return g
        if in_body:
            self.pos += 1
            starts_decl = self._decl_starts_here()
            self.pos -= 1
            if starts_decl:
                return g  # leave the ';' to the enclosing definition sequence
        self.pos += 1
        if self._goal_closed():
            return g
        return Seq(g, self.goal_seq(in_body))

    def goal(self) -> Goal:
        t = self.peek()
        if t is None:
            self.fail("a statement")
        if t.kind == "keyword":
            if t.value == "true":
                self.pos += 1
                return TRUE
            if t.value == "read":
                self.pos += 1
                self.expect("lparen")
                name = self.expect("ident", what="variable name").value
                self.expect("rparen")
                return Read(name)
            if t.value == "print":
                self.pos += 1
                self.expect("lparen")
                e = self.expr()
                self.expect("rparen")
                return Print(e)
            if t.value == "log":
                self.pos += 1
                self.expect("lparen")
                msg = self.expect("string", what="string literal").value
                self.expect("rparen")
                return Log(msg)
            if t.value == "while":
                self.pos += 1
                if self.at("lparen"):
                    self.pos += 1
                    cond = self.cond()
                    self.expect("rparen")
                else:
                    cond = self.cond()
                body = self.goal_seq()
                self.expect("keyword", "endwhile", "'endwhile'")
                return While(cond, body)
            self.fail("a statement")
        if t.kind == "ident":
            if self.at("eq", k=1):
                self.pos += 2
                return Assign(t.value, self.expr())
            return AtomGoal(self.atom())
        self.fail("a statement")

    def cond(self):
        if self.at("keyword", "true"):
            self.pos += 1
            return TRUE
        return self.atom()

    def atom(self):
        name = self.expect("ident", what="identifier").value
        if self.at("eqeq"):
            self.pos += 1
            return Field(name, self.expr())
        if self.at("lparen"):
            self.pos += 1
            args: list[Term] = []
            if not self.at("rparen"):
                args.append(self.expr())
                while self.at("comma"):
                    self.pos += 1
                    args.append(self.expr())
            self.expect("rparen", what="',' or ')'")
            return Call(name, tuple(args))
        self.fail("'(' or '=='")

    # -- expressions ---------------------------------------------------------

    def expr(self) -> Term:
        left = self.product()
        while self.at("plus") or self.at("minus"):
            op = _OPS[self.toks[self.pos].kind]
            self.pos += 1
            left = BinOp(op, left, self.product())
        return left

    def product(self) -> Term:
        left = self.primary()
        while self.at("star") or self.at("slash"):
            op = _OPS[self.toks[self.pos].kind]
            self.pos += 1
            left = BinOp(op, left, self.primary())
        return left

    def primary(self) -> Term:
        t = self.peek()
        if t is None:
            self.fail("a value")
        if t.kind == "int":
            self.pos += 1
            return Int(int(t.value))
        if t.kind == "minus" and self.at("int", k=1):
            self.pos += 2
            return Int(-int(self.toks[self.pos - 1].value))
        if t.kind == "string":
            self.pos += 1
            return Str(t.value)
        if t.kind == "ident":
            self.pos += 1
            return Var(t.value) if t.value in self.params else Ident(t.value)
        if t.kind == "lparen":
            self.pos += 1
            e = self.expr()
            self.expect("rparen")
            return e
        self.fail("a value")


def parse_program(src: str) -> SourceFile:
    return _Parser(src).file()


def parse_goal(src: str) -> Goal:
    p = _Parser(src)
    g = p.goal_seq()
    p.finish()
    return g


def parse_def(src: str) -> Def:
    """Parse a bare definition sequence (no ``module`` header)."""
    p = _Parser(src)
    d = p.decl_seq()
    p.finish()
    return d


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.expr()
    p.finish()
    return t
