"""Semgrep-style rules over Java: compilation, unification and execution."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

import yaml

from .patterns import (
    ELLIPSIS,
    METAVAR,
    Pattern,
    PatternParseError,
    metavar_matchable,
    parse_pattern,
)
from .syntax import AstNode, ConstructType, Corpus, Span, construct_type

CLAUSE_KINDS = ("pattern", "pattern-inside", "pattern-not", "pattern-either")
ANCHOR_KINDS = ("pattern", "pattern-either")

# Optional decorations a pattern may leave out and still match.
LENIENT_KINDS = frozenset(
    {"modifiers", "type_parameters", "superclass", "super_interfaces", "extends_interfaces", "throws"}
)

Binding = dict[str, AstNode]


class RuleError(ValueError):
    pass


class RuleSyntaxError(RuleError):
    pass


class AnchorError(RuleError):
    pass


class AmbiguousTarget(RuleError):
    pass


__all__ = [
    "AmbiguousTarget",
    "AnchorError",
    "Binding",
    "Clause",
    "Match",
    "PatternParseError",
    "Query",
    "RuleError",
    "RuleSyntaxError",
    "anchor_construct_type",
    "compile_query",
    "execute",
    "match_pattern",
]


@dataclass(frozen=True)
class Clause:
    kind: str
    patterns: tuple[Pattern, ...]
    comment: str | None = None

    @property
    def pattern(self) -> Pattern:
        return self.patterns[0]

    @property
    def is_anchor(self) -> bool:
        return self.kind in ANCHOR_KINDS

    def normalized(self) -> tuple[str, tuple[str, ...]]:
        return (self.kind, tuple(" ".join(p.text.split()) for p in self.patterns))


@dataclass(frozen=True)
class Query:
    clauses: tuple[Clause, ...]
    id: str = "query"
    message: str = "structural match"

    @property
    def anchor(self) -> Clause:
        return next(c for c in self.clauses if c.is_anchor)

    def patterns(self) -> Iterator[tuple[Clause, Pattern]]:
        for clause in self.clauses:
            for pattern in clause.patterns:
                yield clause, pattern

    def canonical_key(self) -> tuple:
        """Whitespace-insensitive identity of the rule's clauses (ids and comments ignored)."""
        return tuple(c.normalized() for c in self.clauses)

    def canonical_text(self) -> str:
        lines = []
        for kind, texts in self.canonical_key():
            lines.extend(f"{kind}: {t}" for t in texts)
        return "\n".join(lines)

    def with_id(self, query_id: str, message: str | None = None) -> Query:
        return replace(self, id=query_id, message=message if message is not None else self.message)

    def with_clause(self, clause: Clause) -> Query:
        return replace(self, clauses=self.clauses + (clause,))

    def without_comments(self) -> Query:
        return replace(self, clauses=tuple(replace(c, comment=None) for c in self.clauses))

    def to_yaml(self, with_comments: bool = True) -> str:
        out = ["rules:", f"  - id: {_scalar(self.id)}", "    languages: [java]", f"    message: {json.dumps(self.message)}"]
        out.append("    patterns:")
        for clause in self.clauses:
            if with_comments and clause.comment:
                out.extend(f"      # {line}".rstrip() for line in clause.comment.splitlines())
            if clause.kind == "pattern-either":
                out.append("      - pattern-either:")
                for pattern in clause.patterns:
                    out.extend(_block("          - pattern", pattern.text))
            else:
                out.extend(_block(f"      - {clause.kind}", clause.pattern.text))
        return "\n".join(out) + "\n"


def _scalar(value: str) -> str:
    return value if re.fullmatch(r"[A-Za-z0-9_.\-]+", value) else json.dumps(value)


def _block(key: str, text: str) -> list[str]:
    lines = text.splitlines() or [""]
    if lines[0][:1].isspace():
        return [f"{key}: {json.dumps(text)}"]
    indent = " " * (len(key) - len(key.lstrip()) + 4)
    return [f"{key}: |"] + [indent + line if line else "" for line in lines]


@dataclass(frozen=True)
class Match:
    span: Span
    anchor_node: AstNode = field(compare=False, repr=False)
    bindings: Mapping[str, AstNode] = field(compare=False, repr=False, default_factory=dict)
    rule_id: str = field(default="", compare=False)

    @property
    def path(self) -> str:
        return self.span.file_id

    @property
    def start_line(self) -> int:
        return self.span.start_line

    def key(self) -> tuple:
        return (self.span, binding_key(self.bindings))

    def to_json(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "path": self.span.file_id,
            "start_line": self.span.start_line,
            "end_line": self.span.end_line,
            "bindings": {name: node.text for name, node in sorted(self.bindings.items())},
        }


def binding_key(bindings: Mapping[str, AstNode]) -> tuple:
    return tuple(sorted((name, node.span, node.kind) for name, node in bindings.items()))


# ---------------------------------------------------------------------------
# compilation


def _comments_by_clause(rule_text: str) -> list[str | None]:
    """Comment lines directly above each top-level clause, in order."""
    comments: list[str | None] = []
    pending: list[str] = []
    clause_indent: int | None = None
    clause_re = re.compile(r"^(\s*)-?\s*(pattern-either|pattern-inside|pattern-not|pattern)\s*:")
    for line in rule_text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            pending.append(stripped.lstrip("#").strip())
            continue
        m = clause_re.match(line)
        if m:
            indent = len(m.group(1))
            if clause_indent is None:
                clause_indent = indent
            if indent == clause_indent:
                comments.append("\n".join(pending) if pending else None)
        if stripped:
            pending = []
    return comments


def _compile_pattern(text: object, where: str) -> Pattern:
    if not isinstance(text, str):
        raise RuleSyntaxError(f"{where}: pattern must be a string")
    return parse_pattern(text)


def _compile_clause(item: object, comment: str | None) -> Clause:
    if not isinstance(item, dict) or len(item) != 1:
        raise RuleSyntaxError(f"each clause must be a single-key mapping, got {item!r}")
    ((kind, payload),) = item.items()
    if kind not in CLAUSE_KINDS:
        raise RuleSyntaxError(f"unsupported clause {kind!r}")
    if kind == "pattern-either":
        if not isinstance(payload, list) or not payload:
            raise RuleSyntaxError("pattern-either needs a non-empty list")
        alternatives = []
        for alt in payload:
            if isinstance(alt, dict):
                if set(alt) != {"pattern"}:
                    raise RuleSyntaxError(f"pattern-either alternatives must be patterns, got {sorted(alt)}")
                alt = alt["pattern"]
            alternatives.append(_compile_pattern(alt, "pattern-either"))
        return Clause(kind, tuple(alternatives), comment)
    return Clause(kind, (_compile_pattern(payload, kind),), comment)


def compile_query(rule_text: str) -> Query:
    """Compile a YAML rule (a ``rules:`` document, one rule mapping, or a bare clause list)."""
    try:
        doc = yaml.safe_load(rule_text)
    except yaml.YAMLError as exc:
        raise RuleSyntaxError(f"invalid YAML: {exc}") from exc
    if isinstance(doc, dict) and "rules" in doc:
        rules = doc["rules"]
        if not isinstance(rules, list) or len(rules) != 1:
            raise RuleSyntaxError("expected exactly one rule under 'rules'")
        doc = rules[0]
    query_id, message = "query", "structural match"
    if isinstance(doc, dict):
        query_id = str(doc.get("id", query_id))
        message = str(doc.get("message", message))
        allowed = {"id", "languages", "message", "severity", "patterns", *CLAUSE_KINDS}
        unknown = set(doc) - allowed
        if unknown:
            raise RuleSyntaxError(f"unknown rule keys: {sorted(unknown)}")
        languages = doc.get("languages", ["java"])
        if isinstance(languages, list) and languages and "java" not in [str(x).lower() for x in languages]:
            raise RuleSyntaxError("only java rules are supported")
        if "patterns" in doc:
            items = doc["patterns"]
            if isinstance(items, dict):
                items = [{k: v} for k, v in items.items()]
        else:
            items = [{k: doc[k]} for k in CLAUSE_KINDS if k in doc]
    elif isinstance(doc, list):
        items = doc
    else:
        raise RuleSyntaxError("rule must be a mapping or a list of clauses")
    if not isinstance(items, list) or not items:
        raise RuleSyntaxError("rule has no clauses")
    comments = _comments_by_clause(rule_text)
    clauses = tuple(
        _compile_clause(item, comments[i] if i < len(comments) else None) for i, item in enumerate(items)
    )
    anchors = [c for c in clauses if c.is_anchor]
    if len(anchors) != 1:
        raise AnchorError(f"a rule needs exactly one pattern or pattern-either clause, found {len(anchors)}")
    return Query(clauses, query_id, message)


def query_from_patterns(
    pattern: str, inside: Sequence[str] = (), query_id: str = "query", message: str = "structural match"
) -> Query:
    clauses = [Clause("pattern", (parse_pattern(pattern),))]
    clauses += [Clause("pattern-inside", (parse_pattern(t),)) for t in inside]
    return Query(tuple(clauses), query_id, message)


# ---------------------------------------------------------------------------
# unification


def _skippable(node: AstNode, pattern_children: Sequence[AstNode]) -> bool:
    return node.kind in LENIENT_KINDS and all(p.kind != node.kind for p in pattern_children)


def _unify(p: AstNode, n: AstNode, b: Binding) -> Iterator[Binding]:
    if p.kind == METAVAR:
        if not metavar_matchable(n):
            return
        name = p.text
        bound = b.get(name)
        if bound is None:
            extended = dict(b)
            extended[name] = n
            yield extended
        elif bound.same_tree(n):
            yield b
        return
    if p.kind != n.kind or p.ops != n.ops:
        return
    if p.terminal or n.terminal:
        if p.terminal == n.terminal and p.text == n.text:
            yield b
        return
    yield from _unify_seq(p.children, 0, n.children, 0, b)


def _unify_seq(ps: Sequence[AstNode], i: int, ns: Sequence[AstNode], j: int, b: Binding) -> Iterator[Binding]:
    if i == len(ps):
        if all(_skippable(ns[k], ps) for k in range(j, len(ns))):
            yield b
        return
    p = ps[i]
    if p.kind == ELLIPSIS:
        for jj in range(j, len(ns) + 1):
            yield from _unify_seq(ps, i + 1, ns, jj, b)
        return
    if j == len(ns):
        return
    n = ns[j]
    if p.field == n.field:
        for b2 in _unify(p, n, b):
            yield from _unify_seq(ps, i + 1, ns, j + 1, b2)
    if _skippable(n, ps):
        yield from _unify_seq(ps, i, ns, j + 1, b)


def _has_metavars(p: AstNode) -> bool:
    return any(n.kind == METAVAR for n in p.walk())


def unify_at(p: AstNode, node: AstNode) -> list[Binding]:
    """All distinct bindings under which pattern root ``p`` matches ``node``."""
    if not _has_metavars(p):
        return [{}] if next(_unify(p, node, {}), None) is not None else []
    seen: dict[tuple, Binding] = {}
    for b in _unify(p, node, {}):
        seen.setdefault(binding_key(b), b)
    return [seen[k] for k in sorted(seen)]


def _candidates(p: AstNode, root: AstNode) -> list[AstNode]:
    if p.kind == METAVAR:
        return [n for n in root.walk() if metavar_matchable(n)]
    return root.kind_index().get(p.kind, [])


def match_pattern(p: Pattern | AstNode, root: AstNode) -> list[tuple[AstNode, Binding]]:
    """Every ``(node, binding)`` in ``root``'s subtree that the pattern unifies with."""
    proot = p.root if isinstance(p, Pattern) else p
    out = []
    for node in _candidates(proot, root):
        for b in unify_at(proot, node):
            out.append((node, b))
    out.sort(key=lambda nb: (nb[0].start_byte, -nb[0].end_byte, nb[0].kind, binding_key(nb[1])))
    return out


# ---------------------------------------------------------------------------
# execution


def _contained(inner: AstNode, outer: AstNode) -> bool:
    return outer.start_byte <= inner.start_byte and inner.end_byte <= outer.end_byte


def execute_file(q: Query, root: AstNode) -> list[Match]:
    anchor = q.anchor
    found: list[tuple[AstNode, Binding]] = []
    if anchor.kind == "pattern":
        found = match_pattern(anchor.pattern, root)
    else:
        seen_spans: set[Span] = set()
        for pattern in anchor.patterns:
            for node, b in match_pattern(pattern, root):
                if node.span not in seen_spans:
                    seen_spans.add(node.span)
                    found.append((node, b))
    if not found:
        return []
    for clause in q.clauses:
        if clause.kind == "pattern-inside":
            enclosing = [node for node, _ in match_pattern(clause.pattern, root)]
            found = [(n, b) for n, b in found if any(_contained(n, e) for e in enclosing)]
        elif clause.kind == "pattern-not":
            proot = clause.pattern.root
            found = [(n, b) for n, b in found if not unify_at(proot, n)]
        if not found:
            return []
    return [Match(n.span, n, b, q.id) for n, b in found]


def execute(q: Query, corpus: Corpus, paths: Sequence[str] | None = None) -> list[Match]:
    """Run ``q`` over the corpus (or the given files), sorted by location."""
    files = corpus.files if paths is None else [corpus.file(p) for p in paths]
    matches: list[Match] = []
    for source in files:
        matches.extend(execute_file(q, source.ast))
    matches.sort(key=lambda m: (m.span.file_id, m.span.start_line, m.span.start_col, m.span.end_line, m.span.end_col, binding_key(m.bindings)))
    return matches


# ---------------------------------------------------------------------------
# static analysis


def pattern_construct_type(pattern: Pattern) -> ConstructType | None:
    root = pattern.root
    if root.kind == "expression_statement" and len(root.children) == 1:
        root = root.children[0]
    if root.kind == METAVAR or root.kind == ELLIPSIS:
        return None
    return construct_type(root)


def anchor_construct_type(q: Query) -> ConstructType | None:
    """The construct type the query reports; ``None`` if it falls outside the taxonomy."""
    types = {pattern_construct_type(p) for p in q.anchor.patterns}
    if len(types) > 1:
        raise AmbiguousTarget(
            "pattern-either alternatives target different construct types: "
            + ", ".join(sorted(str(t) for t in types))
        )
    return types.pop()
