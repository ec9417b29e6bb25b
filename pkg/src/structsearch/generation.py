"""Enumeration of verified structural queries over a corpus.

Each query starts from a sampled code construct, is initialised to the
source text of its enclosing statement, and is then specialized (wrapped in
a ``pattern-inside`` context) or generalized (concrete nodes replaced by
metavariables or ellipses) until its complexity falls inside the configured
bounds. Every edit is re-verified against the construct's own file.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .matching import Clause, Match, Query, execute
from .patterns import ELLIPSIS, METAVAR, PatternParseError, metavar_matchable, node_fragment, parse_pattern
from .syntax import (
    MEMBER_CONTAINERS,
    STATEMENT_CONTAINERS,
    AstNode,
    CodeConstruct,
    ConstructType,
    Corpus,
    construct_type,
    enclosing_statement,
    is_statement,
)


class GenerationError(RuntimeError):
    pass


class EmptyCorpus(GenerationError):
    pass


class NoAncestor(GenerationError):
    pass


class NothingToGeneralize(GenerationError):
    pass


class BudgetExhausted(GenerationError):
    def __init__(self, accepted: list[GeneratedQuery], attempts: int):
        super().__init__(f"attempt budget exhausted after {attempts} rejections with {len(accepted)} queries accepted")
        self.accepted = accepted
        self.accepted_count = len(accepted)


@dataclass(frozen=True)
class GenConfig:
    n_q: int = 50
    c_min: int = 1
    c_max: int = 5
    seed: int = 0
    max_attempts: int = 500  # consecutive rejected candidates before giving up
    max_edits: int = 64  # specialize/generalize steps allowed per candidate
    biased: bool = True

    def __post_init__(self) -> None:
        if self.n_q < 1:
            raise ValueError("n_q must be at least 1")
        if not 1 <= self.c_min <= self.c_max:
            raise ValueError("need 1 <= c_min <= c_max")
        if self.max_attempts < 1 or self.max_edits < 0:
            raise ValueError("max_attempts must be positive and max_edits non-negative")

    def to_dict(self) -> dict:
        return {
            "n_q": self.n_q,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "seed": self.seed,
            "max_attempts": self.max_attempts,
            "max_edits": self.max_edits,
            "biased": self.biased,
        }


@dataclass
class GeneratedQuery:
    query: Query
    target: CodeConstruct
    gold_matches: list[Match]
    complexity: int

    def to_json(self) -> dict:
        return {
            "id": self.query.id,
            "rule": self.query.to_yaml(with_comments=False),
            "target": {"type": self.target.ctype.value, **self.target.span.to_dict()},
            "gold": [m.span.to_dict() for m in self.gold_matches],
            "complexity": self.complexity,
        }


@dataclass
class GenState:
    rng: random.Random
    accepted: list[GeneratedQuery] = field(default_factory=list)
    type_counts: Counter = field(default_factory=Counter)
    seen: set = field(default_factory=set)
    by_type: tuple | None = field(default=None, repr=False)  # (corpus, grouped constructs) cache

    @classmethod
    def fresh(cls, seed: int = 0) -> GenState:
        return cls(random.Random(seed))

    def record(self, generated: GeneratedQuery) -> None:
        self.accepted.append(generated)
        self.seen.add(generated.query.canonical_key())
        self.type_counts.update(counted_types(generated.query))


# ---------------------------------------------------------------------------
# counting


def is_counted(node: AstNode) -> bool:
    return node.kind in (METAVAR, ELLIPSIS) or construct_type(node) is not None


def counted_types(q: Query) -> list[ConstructType]:
    """Construct types of every counted taxonomy node across the query's patterns."""
    out = []
    for _, pattern in q.patterns():
        for node in pattern.root.walk():
            ctype = construct_type(node)
            if ctype is not None:
                out.append(ctype)
    return out


def complexity(q: Query) -> int:
    """Taxonomy constructs, metavariables and ellipses across all clause patterns."""
    return sum(1 for _, p in q.patterns() for node in p.root.walk() if is_counted(node))


# ---------------------------------------------------------------------------
# sampling


def weighted_sample(corpus: Corpus, state: GenState, biased: bool = True) -> CodeConstruct:
    """Draw a construct with per-instance weight ``1 / (1 + c_e)``.

    The draw is done in two stages (type first, then instance) which gives
    the same distribution: a type with ``n_e`` instances has total weight
    ``n_e / (1 + c_e)``.
    """
    if state.by_type is None or state.by_type[0] is not corpus:
        state.by_type = (corpus, _constructs_by_type(corpus))
    by_type = state.by_type[1]
    if not by_type:
        raise EmptyCorpus("corpus has no code constructs")
    if not biased:
        return state.rng.choice(corpus.constructs())
    types = list(by_type)
    weights = [len(by_type[t]) / (1 + state.type_counts.get(t, 0)) for t in types]
    chosen = state.rng.choices(types, weights=weights)[0]
    return state.rng.choice(by_type[chosen])


def _constructs_by_type(corpus: Corpus) -> dict[ConstructType, list[CodeConstruct]]:
    grouped: dict[ConstructType, list[CodeConstruct]] = {}
    for construct in corpus.constructs():
        grouped.setdefault(construct.ctype, []).append(construct)
    return {t: grouped[t] for t in ConstructType if t in grouped}


# ---------------------------------------------------------------------------
# edits


def init(t: CodeConstruct, query_id: str = "query") -> Query:
    """A single ``pattern`` clause holding the text of ``t``'s enclosing statement."""
    statement = enclosing_statement(t.node)
    return Query((Clause("pattern", (parse_pattern(node_fragment(statement)),)),), query_id)


def _is_context(node: AstNode) -> bool:
    if node.kind in ("block", "program", "class_body", "constructor_body"):
        return False
    return is_statement(node) or node.kind.endswith("_declaration")


def specialize_candidates(q: Query, t: CodeConstruct) -> list[AstNode]:
    anchor = enclosing_statement(t.node)
    used = {c.normalized()[1] for c in q.clauses if c.kind == "pattern-inside"}
    out = []
    for ancestor in anchor.ancestors():
        if not _is_context(ancestor):
            continue
        if (" ".join(_hole_text(ancestor, anchor).split()),) in used:
            continue
        out.append(ancestor)
    return out


def _hole_text(ancestor: AstNode, anchor: AstNode) -> str:
    parent = anchor.parent
    in_container = parent is not None and (parent.kind in STATEMENT_CONTAINERS or parent.kind in MEMBER_CONTAINERS)
    return node_fragment(ancestor, replace=(anchor, "..." if in_container else "...;"))


def specialize_with(q: Query, t: CodeConstruct, ancestor: AstNode) -> tuple[Query, CodeConstruct]:
    """Conjoin ``pattern-inside`` built from ``ancestor`` with ``t``'s statement punched out."""
    anchor = enclosing_statement(t.node)
    inside = parse_pattern(_hole_text(ancestor, anchor))
    return q.with_clause(Clause("pattern-inside", (inside,))), t


def specialize(q: Query, t: CodeConstruct, corpus: Corpus | None, state: GenState) -> tuple[Query, CodeConstruct]:
    candidates = specialize_candidates(q, t)
    if not candidates:
        raise NoAncestor(f"no enclosing statement or declaration left for {t.ctype.value} at {t.span}")
    return specialize_with(q, t, state.rng.choice(candidates))


_HOLE_SLOTS = {"for_statement": ("init", "condition", "update")}
_ELLIPSIS_PARENTS = STATEMENT_CONTAINERS | MEMBER_CONTAINERS | {"formal_parameters"}
_CONDITION_PARENTS = frozenset({"if_statement", "while_statement", "do_statement", "switch_expression", "synchronized_statement"})


def _next_to_ellipsis(node: AstNode) -> bool:
    siblings = node.parent.children
    i = next(k for k, c in enumerate(siblings) if c is node)
    return any(siblings[k].kind == ELLIPSIS for k in (i - 1, i + 1) if 0 <= k < len(siblings))


def hole_for(node: AstNode) -> str | None:
    """What ``node`` would be generalized into: ``"..."``, ``"$"`` (metavariable) or ``None``."""
    parent = node.parent
    if parent is None or node.kind in (METAVAR, ELLIPSIS):
        return None
    if parent.kind in _ELLIPSIS_PARENTS:
        # an ellipsis next to an ellipsis adds nothing and does not re-parse
        return None if _next_to_ellipsis(node) else "..."
    if node.field in _HOLE_SLOTS.get(parent.kind, ()):
        return "..."
    if node.kind == "parenthesized_expression" and parent.kind in _CONDITION_PARENTS:
        return None
    if metavar_matchable(node):
        return "$"
    return None


def replaceable_nodes(q: Query) -> list[tuple[int, AstNode]]:
    """``(clause index, node)`` pairs eligible for generalization."""
    out = []
    for idx, clause in enumerate(q.clauses):
        for pattern in clause.patterns:
            root = pattern.root
            skip = {id(root)}
            if root.kind == "expression_statement":
                skip.update(id(c) for c in root.children)
            for node in root.walk():
                if id(node) in skip or hole_for(node) is None:
                    continue
                if any(is_counted(n) for n in node.walk()):
                    out.append((idx, node))
    return out


def _next_metavar(q: Query) -> str:
    """Smallest ``$METAVAR<k>`` not already used anywhere in the query."""
    used = {name for _, p in q.patterns() for name in p.metavariables}
    k = 0
    while f"$METAVAR{k}" in used:
        k += 1
    return f"$METAVAR{k}"


def generalize_node(q: Query, clause_idx: int, node: AstNode) -> Query:
    """Replace ``node`` in clause ``clause_idx`` by an ellipsis or a fresh metavariable."""
    hole = hole_for(node)
    if hole is None:
        raise NothingToGeneralize(f"{node.kind} cannot be generalized")
    text = "..." if hole == "..." else _next_metavar(q)
    if hole == "..." and node.parent.kind == "for_statement" and node.text.endswith(";"):
        text = "...;"  # a for-init declaration carries its own semicolon
    clause = q.clauses[clause_idx]
    pattern = next(p for p in clause.patterns if any(n is node for n in p.root.walk()))
    rendered = pattern.render({id(node): text})
    new_pattern = parse_pattern(rendered)
    patterns = tuple(new_pattern if p is pattern else p for p in clause.patterns)
    clauses = list(q.clauses)
    clauses[clause_idx] = replace(clause, patterns=patterns)
    return replace(q, clauses=tuple(clauses))


def node_weight(node: AstNode, type_counts: Counter) -> int:
    total = 0
    for n in node.walk():
        ctype = construct_type(n)
        if ctype is not None:
            total += type_counts.get(ctype, 0)
    return total


def generalize(q: Query, state: GenState) -> Query:
    """Generalize one node chosen with probability proportional to its type-count weight."""
    candidates = replaceable_nodes(q)
    if not candidates:
        raise NothingToGeneralize("every pattern node is already a metavariable or ellipsis")
    weights = [node_weight(node, state.type_counts) for _, node in candidates]
    if not any(weights):
        weights = [1] * len(candidates)
    # Draw without replacement until an edit re-parses; most first draws succeed.
    pool = list(zip(candidates, weights))
    while pool:
        total = sum(w for _, w in pool)
        if total <= 0:
            pick = state.rng.randrange(len(pool))
        else:
            r = state.rng.random() * total
            pick = 0
            acc = 0.0
            for pick, (_, w) in enumerate(pool):
                acc += w
                if r < acc:
                    break
        (idx, node), _ = pool.pop(pick)
        try:
            return generalize_node(q, idx, node)
        except PatternParseError:
            continue
    raise NothingToGeneralize("no generalization re-parses")


# ---------------------------------------------------------------------------
# enumeration


def verify(q: Query, t: CodeConstruct, corpus: Corpus) -> bool:
    """True when some match of ``q`` in ``t``'s file contains ``t``'s span."""
    return any(m.span.contains(t.span) for m in execute(q, corpus, [t.span.file_id]))


def _refine_candidate(q: Query, t: CodeConstruct, corpus: Corpus, cfg: GenConfig, state: GenState) -> Query | None:
    for _ in range(cfg.max_edits):
        c = complexity(q)
        if cfg.c_min <= c <= cfg.c_max:
            return q
        try:
            if c < cfg.c_min:
                q, t = specialize(q, t, corpus, state)
            else:
                q = generalize(q, state)
        except (NoAncestor, NothingToGeneralize, PatternParseError):
            return None
        if not verify(q, t, corpus):
            return None
    return q if cfg.c_min <= complexity(q) <= cfg.c_max else None


def enumerate_queries(corpus: Corpus, cfg: GenConfig, state: GenState | None = None) -> list[GeneratedQuery]:
    """Sample, initialise, verify and edit queries until ``cfg.n_q`` are accepted."""
    if not corpus.constructs():
        raise EmptyCorpus("corpus has no code constructs")
    state = state or GenState.fresh(cfg.seed)
    rejected = 0
    while len(state.accepted) < cfg.n_q:
        if rejected >= cfg.max_attempts:
            raise BudgetExhausted(state.accepted, rejected)
        t = weighted_sample(corpus, state, cfg.biased)
        query_id = f"q{len(state.accepted) + 1:04d}"
        try:
            q = init(t, query_id)
        except PatternParseError:
            rejected += 1
            continue
        if not verify(q, t, corpus):
            rejected += 1
            continue
        q = _refine_candidate(q, t, corpus, cfg, state)
        if q is None or q.canonical_key() in state.seen:
            rejected += 1
            continue
        rejected = 0
        state.record(GeneratedQuery(q, t, execute(q, corpus), complexity(q)))
    return state.accepted


def type_distribution(generated: Iterable[GeneratedQuery]) -> dict[str, dict[str, int]]:
    """Counts per construct type: sampled targets and all counted constructs."""
    targets: Counter = Counter()
    constructs: Counter = Counter()
    for g in generated:
        targets[g.target.ctype.value] += 1
        constructs.update(t.value for t in counted_types(g.query))
    order = [t.value for t in ConstructType]
    return {
        "targets": {t: targets[t] for t in order if targets[t]},
        "constructs": {t: constructs[t] for t in order if constructs[t]},
    }


def frequency_ratio(counts: dict | Counter) -> float:
    """max/min over the nonzero entries (1.0 for fewer than one entry)."""
    values = [v for v in counts.values() if v > 0]
    return max(values) / min(values) if values else 1.0


def format_distribution(dist: dict[str, dict[str, int]]) -> str:
    lines = [f"{'construct type':<22}{'targets':>9}{'in queries':>12}"]
    names = [t.value for t in ConstructType if t.value in dist["targets"] or t.value in dist["constructs"]]
    for name in names:
        lines.append(f"{name:<22}{dist['targets'].get(name, 0):>9}{dist['constructs'].get(name, 0):>12}")
    return "\n".join(lines)


def write_jsonl(generated: Sequence[GeneratedQuery], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in generated:
            fh.write(json.dumps(g.to_json(), sort_keys=True) + "\n")
