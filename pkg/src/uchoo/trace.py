"""Derivation traces: the events a run records, plus text and JSON renderers."""

from __future__ import annotations

import json
from dataclasses import dataclass

KINDS = (
    "rule-applied",
    "choice-enter",
    "branch-try",
    "branch-commit",
    "backtrack",
    "state-update",
    "io-read",
    "io-emit",
    "failure",
)
OUTCOMES = ("success", "failure", "budget-exceeded")

JSON_SCHEMA = {
    "type": "object",
    "required": ["outcome", "events"],
    "additionalProperties": False,
    "properties": {
        "outcome": {"enum": list(OUTCOMES)},
        "events": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["step", "kind", "rule", "detail", "depth"],
                "additionalProperties": False,
                "properties": {
                    "step": {"type": "integer", "minimum": 1},
                    "kind": {"enum": list(KINDS)},
                    "rule": {"type": ["integer", "null"], "minimum": 1, "maximum": 10},
                    "detail": {"type": "string"},
                    "depth": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class TraceEvent:
    step: int
    kind: str
    rule: int | None
    detail: str
    depth: int


@dataclass(frozen=True)
class Derivation:
    events: tuple[TraceEvent, ...]
    outcome: str

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]


class Tracer:
    """Append-only event log owned by a single run."""

    def __init__(self):
        self._events: list[TraceEvent] = []

    def __len__(self) -> int:
        return len(self._events)

    def emit(self, kind: str, detail: str = "", depth: int = 0, rule: int | None = None) -> None:
        assert kind in KINDS, kind
        self._events.append(TraceEvent(len(self._events) + 1, kind, rule, detail, depth))

    def finish(self, outcome: str) -> Derivation:
        assert outcome in OUTCOMES, outcome
        return Derivation(tuple(self._events), outcome)


def render_text(d: Derivation) -> str:
    lines = []
    for e in d.events:
        parts = [e.kind]
        if e.kind == "rule-applied" and e.rule is not None:
            parts.append(str(e.rule))
        if e.detail:
            parts.append(e.detail)
        lines.append("  " * e.depth + " ".join(parts))
    return "".join(line + "\n" for line in lines)


def render_json(d: Derivation) -> str:
    doc = {
        "outcome": d.outcome,
        "events": [
            {"step": e.step, "kind": e.kind, "rule": e.rule, "detail": e.detail, "depth": e.depth}
            for e in d.events
        ],
    }
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def from_json(text: str) -> Derivation:
    doc = json.loads(text)
    events = tuple(
        TraceEvent(e["step"], e["kind"], e["rule"], e["detail"], e["depth"]) for e in doc["events"]
    )
    return Derivation(events, doc["outcome"])
