"""C^uchoo: a small imperative language with choice-conjunctive declarations."""

from .engine import Budget, Program, State, load, run
from .parser import ParseError, parse_goal, parse_program
from .syntax import pretty

__all__ = [
    "Budget",
    "ParseError",
    "Program",
    "State",
    "load",
    "parse_goal",
    "parse_program",
    "pretty",
    "run",
]
