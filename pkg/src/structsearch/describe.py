"""Structured, nested-list descriptions of query patterns.

The rendering walks each clause's pattern AST: one node per line, children
indented two spaces, grammar field labels as ``field:`` prefixes, leaf text
quoted, metavariables shown by name and ellipses as ``...``. Operator tokens
are not shown; they are implied by the node kind.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matching import Query
from .patterns import ELLIPSIS, METAVAR
from .syntax import AstNode


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n")
    return f"'{escaped}'"


def describe_node(node: AstNode, depth: int = 0) -> list[str]:
    pad = "  " * depth
    label = f"{node.field}: " if node.field else ""
    if node.kind == METAVAR:
        return [f"{pad}- {label}metavariable: {_quote(node.text)}"]
    if node.kind == ELLIPSIS:
        return [f"{pad}- {label}..."]
    if node.terminal:
        return [f"{pad}- {label}{node.kind}: {_quote(node.text)}"]
    lines = [f"{pad}- {label}{node.kind}"]
    for child in node.children:
        lines.extend(describe_node(child, depth + 1))
    return lines


@dataclass(frozen=True)
class ClauseDescription:
    kind: str
    pattern: str
    tree: str

    def to_prompt(self) -> str:
        body = "\n".join("    " + line if line else "" for line in self.pattern.splitlines())
        return (
            f"<{self.kind}>\n<semgrep_pattern>\n{body}\n</semgrep_pattern>\n"
            f"<pattern_description>\n{self.tree}\n</pattern_description>\n</{self.kind}>"
        )


@dataclass(frozen=True)
class StructuredDescription:
    clauses: tuple[ClauseDescription, ...]

    @property
    def text(self) -> str:
        return "\n".join(f"{c.kind}:\n{c.tree}" for c in self.clauses)

    def to_prompt(self) -> str:
        return "\n".join(c.to_prompt() for c in self.clauses)

    def __str__(self) -> str:
        return self.text


def describe_query(q: Query) -> StructuredDescription:
    """Deterministic nested-list rendering of every clause pattern in ``q``."""
    parts = []
    for clause in q.clauses:
        for pattern in clause.patterns:
            parts.append(ClauseDescription(clause.kind, pattern.text, "\n".join(describe_node(pattern.root))))
    return StructuredDescription(tuple(parts))
