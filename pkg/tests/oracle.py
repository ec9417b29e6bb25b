"""Independent reference implementations used by the test suite.

``brute_force_matches`` enumerates every alignment of pattern children to
program children with ``itertools.combinations`` and then every assignment of
metavariables to program nodes; it shares no code with the engine's
backtracking unifier beyond the AST itself.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from structsearch.generation import GenerationError, init, generalize_node, replaceable_nodes, specialize_candidates, specialize_with
from structsearch.matching import LENIENT_KINDS, Query, compile_query
from structsearch.patterns import ELLIPSIS, METAVAR, metavar_matchable
from structsearch.syntax import AstNode, Corpus, enumerate_constructs

Occurrence = tuple[str, AstNode]


def _gap_ok(nodes: list[AstNode], pattern_children: list[AstNode]) -> bool:
    kinds = {p.kind for p in pattern_children}
    return all(n.kind in LENIENT_KINDS and n.kind not in kinds for n in nodes)


def alignments(p: AstNode, n: AstNode) -> Iterator[list[Occurrence]]:
    """Every way ``p`` can line up with ``n``; yields metavariable occurrences in pattern order."""
    if p.kind == METAVAR:
        if metavar_matchable(n):
            yield [(p.text, n)]
        return
    if p.kind != n.kind or p.ops != n.ops:
        return
    if p.terminal or n.terminal:
        if p.terminal and n.terminal and p.text == n.text:
            yield []
        return
    ps, ns = list(p.children), list(n.children)
    fixed = [i for i, c in enumerate(ps) if c.kind != ELLIPSIS]
    for chosen in itertools.combinations(range(len(ns)), len(fixed)):
        # gaps between consecutive fixed children: free if an ellipsis sits between them
        ok = True
        bounds = [-1, *chosen, len(ns)]
        pidx = [-1, *fixed, len(ps)]
        for g in range(len(bounds) - 1):
            gap = ns[bounds[g] + 1 : bounds[g + 1]]
            has_ellipsis = any(ps[k].kind == ELLIPSIS for k in range(pidx[g] + 1, pidx[g + 1]))
            if gap and not has_ellipsis and not _gap_ok(gap, ps):
                ok = False
                break
        if not ok or any(ps[pi].field != ns[ni].field for pi, ni in zip(fixed, chosen)):
            continue
        per_child = [list(alignments(ps[pi], ns[ni])) for pi, ni in zip(fixed, chosen)]
        for combo in itertools.product(*per_child):
            yield [occ for part in combo for occ in part]


def _consistent(occurrences: list[Occurrence], sigma: dict[str, AstNode]) -> bool:
    first: dict[str, AstNode] = {}
    for name, node in occurrences:
        first.setdefault(name, node)
    if set(first) != set(sigma) or any(first[k] is not sigma[k] for k in sigma):
        return False
    return all(node.same_tree(sigma[name]) for name, node in occurrences)


def brute_force_at(p: AstNode, n: AstNode) -> set[tuple]:
    """Binding keys under which ``p`` matches at ``n``, by exhaustive assignment."""
    aligned = list(alignments(p, n))
    if not aligned:
        return set()
    names = sorted({name for occ in aligned for name, _ in occ})
    if not names:
        return {()}
    pool = [m for m in n.walk() if metavar_matchable(m)]
    out = set()
    for values in itertools.product(pool, repeat=len(names)):
        sigma = dict(zip(names, values))
        if any(_consistent(occ, sigma) for occ in aligned):
            out.add(tuple(sorted((k, v.span, v.kind) for k, v in sigma.items())))
    return out


def _pattern_hits(p: AstNode, root: AstNode) -> list[tuple[AstNode, tuple]]:
    return [(node, key) for node in root.walk() for key in brute_force_at(p, node)]


def brute_force_pattern(p: AstNode, root: AstNode) -> set[tuple]:
    """``(span, kind, binding key)`` for every node in ``root`` that ``p`` matches."""
    return {(node.span, node.kind, key) for node, key in _pattern_hits(p, root)}


def brute_force_matches(q: Query, root: AstNode) -> set[tuple]:
    """Query semantics over one file: anchor, then each inside/not filter."""
    anchor = q.anchor
    if anchor.kind == "pattern-either":
        # union over alternatives, one hit per span (the first alternative wins)
        hits: list[tuple[AstNode, tuple]] = []
        spans = set()
        for pattern in anchor.patterns:
            for node, key in sorted(_pattern_hits(pattern.root, root), key=lambda h: (h[0].start_byte, -h[0].end_byte, h[0].kind, h[1])):
                if node.span not in spans:
                    spans.add(node.span)
                    hits.append((node, key))
    else:
        hits = _pattern_hits(anchor.pattern.root, root)
    for clause in q.clauses:
        if clause.kind == "pattern-inside":
            outers = [node for node, _ in _pattern_hits(clause.pattern.root, root)]
            hits = [(n, k) for n, k in hits if any(o.start_byte <= n.start_byte and n.end_byte <= o.end_byte for o in outers)]
        elif clause.kind == "pattern-not":
            hits = [(n, k) for n, k in hits if not brute_force_at(clause.pattern.root, n)]
    return {(n.span, n.kind, k) for n, k in hits}


def engine_key(match) -> tuple:
    return (match.span, match.anchor_node.kind, tuple(sorted((k, v.span, v.kind) for k, v in match.bindings.items())))


# ---------------------------------------------------------------------------
# random Java programs

NAMES = ("a", "b", "i", "n", "total", "item")
CALLS = ("size", "get", "add", "isEmpty", "toString")


class ProgramGen:
    """Small random Java classes over a narrow vocabulary, so repeats are common."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def name(self) -> str:
        return self.rng.choice(NAMES)

    def expr(self, depth: int = 0) -> str:
        r = self.rng.random()
        if depth > 1 or r < 0.3:
            return self.rng.choice([self.name(), str(self.rng.randint(0, 3)), '"s"'])
        if r < 0.55:
            return f"{self.expr(depth + 1)} {self.rng.choice('+-*<>')} {self.expr(depth + 1)}"
        if r < 0.8:
            args = ", ".join(self.expr(depth + 1) for _ in range(self.rng.randint(0, 2)))
            return f"{self.name()}.{self.rng.choice(CALLS)}({args})"
        return f"Integer.toString({self.expr(depth + 1)})"

    def stmt(self, depth: int = 0) -> str:
        r = self.rng.random()
        if depth > 1 or r < 0.35:
            return self.rng.choice(
                [
                    f"{self.name()} = {self.expr()};",
                    f"{self.name()} += {self.expr()};",
                    f"{self.name()}.{self.rng.choice(CALLS)}();",
                    f"int {self.name()} = {self.expr()};",
                    "continue;" if depth else "return;",
                ]
            )
        body = " ".join(self.stmt(depth + 1) for _ in range(self.rng.randint(1, 2)))
        if r < 0.55:
            return f"if ({self.expr()}) {{ {body} }}"
        if r < 0.75:
            v = self.name()
            return f"for (int {v} = 0; {v} < {self.name()}; {v}++) {{ {body} }}"
        if r < 0.9:
            return f"while ({self.expr()}) {{ {body} }}"
        return f"return {self.expr()};"

    def program(self) -> str:
        stmts = "\n    ".join(self.stmt() for _ in range(self.rng.randint(1, 4)))
        return f"class P {{\n  void m(int a, int b) {{\n    {stmts}\n  }}\n}}\n"


def pattern_size(q: Query) -> int:
    return sum(1 for _, p in q.patterns() for _ in p.root.walk())


def _merge_metavars(q: Query, rng: random.Random) -> Query:
    """Rename one metavariable to another so the rule repeats a name."""
    names = sorted({name for _, p in q.patterns() for name in p.metavariables})
    if len(names) < 2:
        return q
    src, dst = rng.sample(names, 2)
    try:
        return compile_query(q.to_yaml(with_comments=False).replace(src, dst))
    except ValueError:
        return q


def random_case(rng: random.Random, max_program: int = 200, max_pattern: int = 30) -> tuple[Corpus, Query] | None:
    """A random program and a rule derived from one of its own subtrees, or None if over budget."""
    source = ProgramGen(rng).program()
    corpus = Corpus.from_sources({"P.java": source})
    if not corpus.files:
        return None
    root = corpus.files[0].ast
    if sum(1 for _ in root.walk()) > max_program:
        return None
    constructs = enumerate_constructs(root)
    if not constructs:
        return None
    t = rng.choice(constructs)
    q = init(t, "case")
    if rng.random() < 0.4:
        ancestors = specialize_candidates(q, t)
        if ancestors:
            q, _ = specialize_with(q, t, rng.choice(ancestors))
    for _ in range(rng.randint(0, 4)):
        nodes = replaceable_nodes(q)
        if not nodes:
            break
        try:
            q = generalize_node(q, *rng.choice(nodes))
        except (ValueError, GenerationError):
            continue
    if rng.random() < 0.3:
        q = _merge_metavars(q, rng)
    if pattern_size(q) > max_pattern:
        return None
    return corpus, q
