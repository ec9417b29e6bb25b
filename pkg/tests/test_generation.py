from __future__ import annotations

import json
import random
from collections import Counter
from types import SimpleNamespace

import pytest

from structsearch.generation import (
    BudgetExhausted,
    EmptyCorpus,
    GenConfig,
    GenState,
    NoAncestor,
    complexity,
    counted_types,
    enumerate_queries,
    frequency_ratio,
    generalize,
    hole_for,
    init,
    node_weight,
    replaceable_nodes,
    specialize,
    specialize_candidates,
    type_distribution,
    verify,
    weighted_sample,
    write_jsonl,
)
from structsearch.matching import compile_query, query_from_patterns
from structsearch.syntax import ConstructType, Corpus


def _target(corpus, ctype, text_prefix=""):
    return next(c for c in corpus.constructs() if c.ctype is ctype and c.node.text.startswith(text_prefix))


def test_init_uses_enclosing_statement(append_loop):
    t = _target(append_loop, ConstructType.MethodCall, "Integer")
    q = init(t)
    assert q.anchor.pattern.text == "a += Integer.toString(number);"
    assert verify(q, t, append_loop)


def test_complexity_counts_constructs_and_holes():
    # a, +=, Integer.toString(...), number  -> Variable, Operator, MethodCall, Variable
    assert complexity(query_from_patterns("a += Integer.toString(number);")) == 4
    assert complexity(query_from_patterns("$X += Integer.toString(...);")) == 4
    assert complexity(query_from_patterns("continue;")) == 1
    assert complexity(query_from_patterns("a += 1;", ["for (...) { ... }"])) == 6


def test_counted_types():
    assert Counter(counted_types(query_from_patterns("a += Integer.toString(number);"))) == Counter(
        {ConstructType.Variable: 2, ConstructType.Operator: 1, ConstructType.MethodCall: 1}
    )


def test_specialize_candidates_are_statement_ancestors(append_loop):
    t = _target(append_loop, ConstructType.Operator, "a +=")
    q = init(t)
    kinds = [a.kind for a in specialize_candidates(q, t)]
    assert kinds == ["for_statement", "method_declaration", "class_declaration"]


def test_specialize_does_not_reuse_an_ancestor(append_loop):
    t = _target(append_loop, ConstructType.Operator, "a +=")
    q = init(t)
    state = GenState.fresh(0)
    for _ in range(3):
        q, t = specialize(q, t, append_loop, state)
        assert verify(q, t, append_loop)
    with pytest.raises(NoAncestor):
        specialize(q, t, append_loop, state)


def test_hole_rules():
    q = query_from_patterns("for (int i = 0; i < n; i++) { if (ok(i)) { g(i); } }")
    holes = {n.text: hole_for(n) for _, n in replaceable_nodes(q)}
    assert holes["i < n"] == "..."
    assert holes["if (ok(i)) { g(i); }"] == "..."
    assert holes["ok(i)"] == "$"
    assert "(ok(i))" not in holes


def test_generalize_prefers_frequent_types():
    q = query_from_patterns("a += Integer.toString(number);")
    state = GenState.fresh(1)
    state.type_counts.update({ConstructType.MethodCall: 50})
    picks = Counter()
    for seed in range(200):
        state.rng = random.Random(seed)
        picks[generalize(q, state).anchor.pattern.text] += 1
    assert picks.most_common(1)[0][0] == "a += $METAVAR0;"


def test_node_weight_sums_subtree():
    q = query_from_patterns("a += Integer.toString(number);")
    call = next(n for n in q.anchor.pattern.root.walk() if n.kind == "method_invocation")
    counts = Counter({ConstructType.MethodCall: 2, ConstructType.Variable: 3})
    assert node_weight(call, counts) == 2 + 3


class _TwoConstructs:
    """Stand-in corpus holding one method call and one literal."""

    def __init__(self):
        self._items = [SimpleNamespace(ctype=ConstructType.MethodCall), SimpleNamespace(ctype=ConstructType.Literal)]

    def constructs(self):
        return self._items


def test_weighted_sample_probability_matches_weight_formula():
    # weights 1/(1+3) for the call and 1/(1+0) for the literal -> P(literal) = 0.8
    corpus = _TwoConstructs()
    state = GenState.fresh(5)
    state.type_counts.update({ConstructType.MethodCall: 3})
    n = 100_000
    literals = sum(weighted_sample(corpus, state).ctype is ConstructType.Literal for _ in range(n))
    assert abs(literals / n - 0.8) <= 0.02


def test_weighted_sample_avoids_saturated_types(bundled):
    state = GenState.fresh(0)
    state.type_counts.update({t: 1000 for t in ConstructType if t is not ConstructType.SwitchStatement})
    picks = Counter(weighted_sample(bundled, state).ctype for _ in range(200))
    assert picks[ConstructType.SwitchStatement] > 100


def test_enumerate_small_corpus_respects_bounds(bundled):
    cfg = GenConfig(n_q=15, c_min=3, c_max=4, seed=5)
    for g in enumerate_queries(bundled, cfg):
        assert 3 <= g.complexity <= 4
        assert any(m.span.contains(g.target.span) for m in g.gold_matches)


def test_empty_corpus_raises():
    with pytest.raises(EmptyCorpus):
        enumerate_queries(Corpus.from_sources({}), GenConfig(n_q=1))


def test_budget_exhaustion_keeps_accepted(append_loop):
    with pytest.raises(BudgetExhausted) as err:
        enumerate_queries(append_loop, GenConfig(n_q=500, max_attempts=30))
    assert 0 < err.value.accepted_count < 500
    keys = {g.query.canonical_key() for g in err.value.accepted}
    assert len(keys) == err.value.accepted_count


@pytest.mark.parametrize("bad", [dict(n_q=0), dict(c_min=0), dict(c_min=5, c_max=4), dict(max_attempts=0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        GenConfig(**bad)


def test_jsonl_rows_recompile(bundled, tmp_path):
    generated = enumerate_queries(bundled, GenConfig(n_q=5, seed=9))
    write_jsonl(generated, tmp_path / "q.jsonl")
    rows = [json.loads(line) for line in (tmp_path / "q.jsonl").read_text().splitlines()]
    assert [r["id"] for r in rows] == [g.query.id for g in generated]
    for row, g in zip(rows, generated):
        assert compile_query(row["rule"]).canonical_key() == g.query.canonical_key()
        assert row["target"]["type"] == g.target.ctype.value


def test_distribution_helpers(bundled):
    generated = enumerate_queries(bundled, GenConfig(n_q=10, seed=2))
    dist = type_distribution(generated)
    assert sum(dist["targets"].values()) == 10
    assert frequency_ratio({"a": 4, "b": 2, "c": 0}) == 2.0
    assert frequency_ratio({}) == 1.0
