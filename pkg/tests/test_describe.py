from __future__ import annotations

from structsearch.describe import describe_query
from structsearch.matching import query_from_patterns

INTERRUPT_TREE = """- while_statement
  - condition: parenthesized_expression
    - unary_expression
      - operand: method_invocation
        - object: metavariable: '$VAR1'
        - name: identifier: 'interrupted'
        - arguments: argument_list
  - body: block
    - ..."""


def test_interrupt_loop_description():
    d = describe_query(query_from_patterns("while (! $VAR1 .interrupted()) { ... }"))
    assert d.text == "pattern:\n" + INTERRUPT_TREE


def test_prompt_format_wraps_pattern_and_tree():
    prompt = describe_query(query_from_patterns("while (! $VAR1 .interrupted()) { ... }")).to_prompt()
    assert "<semgrep_pattern>\n    while (! $VAR1 .interrupted()) { ... }\n</semgrep_pattern>" in prompt
    assert "<pattern_description>\n" + INTERRUPT_TREE + "\n</pattern_description>" in prompt


def test_terminal_text_is_escaped():
    d = describe_query(query_from_patterns('g("it\'s");'))
    assert "- string_fragment: 'it\\'s'" in d.text


def test_each_clause_is_described():
    d = describe_query(query_from_patterns("continue;", ["for (...) { ... }"]))
    assert d.text.startswith("pattern:\n- continue_statement\npattern-inside:\n- for_statement")
    assert [c.kind for c in d.clauses] == ["pattern", "pattern-inside"]
