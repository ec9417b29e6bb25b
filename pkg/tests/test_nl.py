from __future__ import annotations

import numpy as np
import pytest

from structsearch.matching import anchor_construct_type, compile_query, query_from_patterns
from structsearch.mocks import fenced_rule
from structsearch.nl import (
    EmptyIndex,
    ExtractionError,
    PairedQuery,
    RagIndex,
    TranslateOptions,
    TranslationFailed,
    UnparseableLabel,
    annotate,
    build_index,
    clause_comment,
    drop_overlapping,
    extract_nl,
    extract_rule,
    pair_nl,
    parse_label,
    refine,
    retrieve,
    translate,
    translate_and_refine,
    translate_system,
    translate_user,
)
from structsearch.providers import DimensionMismatch, FunctionProvider, HashingEmbedder
from structsearch.syntax import ConstructType

LOOP_RULE = query_from_patterns("for (...) { ... }").to_yaml()
APPEND_RULE = query_from_patterns("$X += Integer.toString(...);", ["for (...) { ... }"]).to_yaml()


def pair(pid: str, nl: str, rule: str = LOOP_RULE, ctype=ConstructType.ForLoop) -> PairedQuery:
    return PairedQuery(pid, rule, nl, "", [], ctype)


@pytest.fixture()
def index():
    pairs = [
        pair("a", "find every for loop"),
        pair("b", "find while loops that poll a flag", "pattern: while ($C) { ... }\n", ConstructType.WhileLoop),
        pair("c", "find string appends in a for loop", APPEND_RULE, ConstructType.Operator),
    ]
    return build_index(pairs, HashingEmbedder())


def test_retrieve_matches_independent_cosine_ranking(index):
    nl = "appends to a string inside for loop"
    emb = HashingEmbedder()
    q = emb.embed([nl])[0]
    raw = emb.embed([p.nl for p in index.examples])
    cos = raw @ q / (np.linalg.norm(raw, axis=1) * np.linalg.norm(q))
    expected = [index.examples[i].id for i in sorted(range(3), key=lambda i: (-round(cos[i], 12), index.examples[i].id))]
    assert [p.id for p in retrieve(index, nl, k=3)] == expected
    assert [p.id for p in retrieve(index, nl, k=1)] == expected[:1]


def test_index_round_trip(index, tmp_path):
    index.save(tmp_path / "i.json")
    again = RagIndex.load(tmp_path / "i.json")
    assert np.array_equal(again.vectors, index.vectors)
    assert [p.to_json() for p in again.examples] == [p.to_json() for p in index.examples]


def test_index_errors(index):
    with pytest.raises(EmptyIndex):
        build_index([], HashingEmbedder())
    with pytest.raises(DimensionMismatch):
        retrieve(index, "x", embedder=HashingEmbedder(32))
    with pytest.raises(ValueError):
        retrieve(index, "x", k=0)


def test_drop_overlapping_ignores_ids_and_whitespace():
    bench = [pair("q1", "x")]
    examples = [pair("e1", "y", "pattern: |\n  for (...)   { ... }\n"), pair("e2", "z", APPEND_RULE)]
    assert [p.id for p in drop_overlapping(examples, bench)] == ["e2"]


def test_clause_comments():
    q = annotate(compile_query(APPEND_RULE))
    assert q.clauses[0].comment.startswith("report an operator")
    assert "$X stand for any expression" in q.clauses[0].comment
    assert q.clauses[1].comment.startswith("restrict matches to code inside a for loop")
    assert clause_comment(compile_query("pattern-either:\n  - a();\n  - b();").clauses[0]).startswith("report code")


def test_prompt_ablations(index):
    examples = retrieve(index, "for loop", k=2)
    with_comments = translate_user("for loop", examples, True)
    without = translate_user("for loop", examples, False)
    assert "# report" in with_comments and "# report" not in without
    assert "Clause reference" in translate_system(True)
    assert "Clause reference" not in translate_system(False)


def test_extractors():
    assert extract_rule("text\n```yaml\npattern: a;\n```\nmore") == "pattern: a;\n"
    with pytest.raises(ExtractionError):
        extract_rule("no fence")
    assert extract_nl("<nl_query>draft</nl_query> <nl_query> Find loops.  Then more.</nl_query>") == "Find loops."
    with pytest.raises(ExtractionError):
        extract_nl("<nl_query> </nl_query>")


@pytest.mark.parametrize(
    "text, label",
    [
        ("ForLoop", ConstructType.ForLoop),
        ("The answer is: method call.", ConstructType.MethodCall),
        ("VariableDeclaration", ConstructType.VariableDeclaration),
        ("while loop, not a ForLoop", ConstructType.WhileLoop),
    ],
)
def test_parse_label(text, label):
    assert parse_label(text) is label


def test_parse_label_rejects_noise():
    with pytest.raises(UnparseableLabel):
        parse_label("no idea")


def test_pair_nl_sends_rule_and_description():
    seen = {}

    def answer(req):
        seen["user"] = req.user
        return "<nl_query>Find all for loops.</nl_query>"

    assert pair_nl(compile_query(LOOP_RULE), FunctionProvider(answer)) == "Find all for loops."
    assert "<pattern_description>" in seen["user"] and "for_statement" in seen["user"]


def test_translate_retries_once_on_bad_rule(index):
    answers = iter(["```yaml\npattern: for (\n```", fenced_rule(LOOP_RULE)])
    q, trace = translate("loops", index, FunctionProvider(lambda r: next(answers)))
    assert trace.parse_retries == 1
    assert anchor_construct_type(q) is ConstructType.ForLoop
    assert "could not be used" in trace.prompts[1]


def test_translate_fails_after_retry(index):
    with pytest.raises(TranslationFailed) as err:
        translate("loops", index, FunctionProvider(lambda r: "sorry"))
    assert err.value.trace.parse_retries == 1


def _scripted(translation: str, label: str, refinements: list[str]):
    queue = list(refinements)

    def answer(req):
        if req.task == "translate":
            return fenced_rule(translation)
        if req.task == "target_type":
            return label
        return queue.pop(0)

    return FunctionProvider(answer)


def test_refine_fixes_wrong_anchor(index):
    llm = _scripted("pattern: for (...) { ... }\n", "Operator", [fenced_rule(APPEND_RULE)])
    q, trace = translate_and_refine("appends in loops", index, llm)
    assert anchor_construct_type(q) is ConstructType.Operator
    assert trace.mismatch_detected and not trace.unresolved
    assert trace.rounds[0].actual == "ForLoop" and trace.rounds[0].expected == "Operator"
    assert "targets ForLoop but the request asks for Operator" in trace.rounds[0].feedback


def test_refine_gives_up_after_max_rounds(index):
    llm = _scripted("pattern: for (...) { ... }\n", "Operator", ["no rule", fenced_rule(LOOP_RULE)])
    q, trace = translate_and_refine("appends", index, llm, TranslateOptions(max_rounds=2))
    assert trace.unresolved
    assert [r.parsed for r in trace.rounds] == [False, True]
    assert anchor_construct_type(q) is ConstructType.ForLoop


def test_refine_skips_when_types_agree(index):
    llm = _scripted("pattern: for (...) { ... }\n", "ForLoop", [])
    q, trace = translate_and_refine("loops", index, llm)
    assert trace.rounds == [] and not trace.mismatch_detected


def test_refine_tolerates_unparseable_label():
    q0 = compile_query(LOOP_RULE)
    q, trace = refine("loops", q0, None, _scripted(LOOP_RULE, "dunno", []))
    assert q is q0 and trace.expected_type is None


def test_no_examples_ablation_skips_retrieval(index):
    llm = _scripted("pattern: for (...) { ... }\n", "ForLoop", [])
    _, trace = translate_and_refine("loops", index, llm, TranslateOptions(use_examples=False))
    assert trace.retrieved == []
    assert "Examples of requests" not in trace.prompts[0]
