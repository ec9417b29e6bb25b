from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from oracle import ProgramGen
from structsearch.syntax import (
    ConstructType,
    Corpus,
    ParseError,
    Span,
    UnknownFile,
    construct_type,
    enclosing_method,
    enclosing_statement,
    enumerate_constructs,
    load_corpus,
    load_manifest,
    parse_source,
)

SOURCE = """class A {
    int count = 0;
    void run(int[] xs) {
        for (int x : xs) {
            if (x > 0) { count += x; continue; }
            while (x < 0) { x++; break; }
        }
        try { run(xs); } catch (Exception e) { return; }
        switch (count) { case 1: count = 2; break; default: count = 0; }
    }
}
"""


def test_parse_keeps_named_children_and_operator_tokens():
    root = parse_source("class A { void f() { a += b; } }", "A.java")
    assign = root.kind_index()["assignment_expression"][0]
    assert [c.kind for c in assign.children] == ["identifier", "identifier"]
    assert assign.ops == ("+=",)
    assert [c.field for c in assign.children] == ["left", "right"]


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_source("class A { void f( { }", "Bad.java")
    assert "Bad.java" in str(err.value)


def test_spans_are_one_based_lines_and_columns():
    root = parse_source(SOURCE, "A.java")
    field = root.kind_index()["field_declaration"][0]
    assert field.span == Span("A.java", 2, 5, 2, 19)


def test_every_taxonomy_type_is_found():
    types = {c.ctype for c in enumerate_constructs(parse_source(SOURCE, "A.java"))}
    assert types == set(ConstructType)


def test_construct_type_maps_kinds():
    root = parse_source(SOURCE, "A.java")
    idx = root.kind_index()
    assert construct_type(idx["enhanced_for_statement"][0]) is ConstructType.ForLoop
    assert construct_type(idx["switch_expression"][0]) is ConstructType.SwitchStatement
    assert construct_type(idx["block"][0]) is None


def test_type_and_method_names_are_not_variables():
    root = parse_source("class A { void f(int p) { int q = Math.abs(p); g(); } }", "A.java")
    variables = [c.node.text for c in enumerate_constructs(root) if c.ctype is ConstructType.Variable]
    assert variables == ["p", "q", "p"]


def test_append_loop_constructs(append_loop):
    found = {(c.ctype, c.node.text) for c in append_loop.constructs()}
    assert (ConstructType.MethodCall, "Integer.toString(number)") in found
    assert (ConstructType.Operator, "a += Integer.toString(number)") in found
    assert (ConstructType.Literal, "0") in found
    assert any(t is ConstructType.ForLoop for t, _ in found)
    assert {"a", "i", "limit", "number"} <= {text for t, text in found if t is ConstructType.Variable}


def test_enclosing_statement_of_expression():
    root = parse_source(SOURCE, "A.java")
    update = root.kind_index()["update_expression"][0]
    assert enclosing_statement(update).kind == "expression_statement"


def test_same_tree_ignores_position():
    root = parse_source("class A { void f() { g(a + 1); h(a + 1); h(a + 2); } }", "A.java")
    b1, b2, b3 = root.kind_index()["binary_expression"]
    assert b1.same_tree(b2)
    assert not b1.same_tree(b3)


def test_corpus_reports_unparseable_files(tmp_path):
    (tmp_path / "Good.java").write_text("class Good {}\n")
    (tmp_path / "Bad.java").write_text("class Bad {\n")
    corpus = load_corpus(tmp_path)
    assert [f.path for f in corpus.files] == ["Good.java"]
    assert set(corpus.errors) == {"Bad.java"}
    with pytest.raises(UnknownFile):
        corpus.file("Bad.java")


def test_manifest_round_trip(tmp_path, bundled):
    path = tmp_path / "corpus.json"
    bundled.write_manifest(path)
    assert load_manifest(path).sha256 == bundled.sha256


def test_enclosing_method_picks_innermost():
    corpus = Corpus.from_sources({"A.java": SOURCE})
    span = enclosing_method(corpus, "A.java", 5)
    assert (span.start_line, span.end_line) == (3, 10)
    assert enclosing_method(corpus, "A.java", 2) is None


def test_bundled_corpus_covers_taxonomy(bundled):
    assert 2000 <= bundled.line_count <= 4000
    assert not bundled.errors
    assert {c.ctype for c in bundled.constructs()} == set(ConstructType)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_programs_have_nested_spans(seed):
    root = parse_source(ProgramGen(random.Random(seed)).program(), "P.java")
    for node in root.walk():
        for child in node.children:
            assert node.span.contains(child.span)
            assert child.parent is node
