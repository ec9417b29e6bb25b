"""Offline providers that answer from a benchmark's ground truth.

They read the request's ``task`` tag and the request text in ``meta`` (the
natural-language query, the file path, the round number), so every response
is a function of the request alone.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .matching import AmbiguousTarget, anchor_construct_type, compile_query, query_from_patterns
from .nl import TYPE_PHRASES, PairedQuery, collapse
from .providers import LlmRequest, LlmResponse, ProviderError, respond


def fenced_rule(rule: str) -> str:
    return f"```yaml\n{rule if rule.endswith(chr(10)) else rule + chr(10)}```"


def template_nl(rule_text: str) -> str:
    """A deterministic request sentence built from the rule's own patterns."""
    q = compile_query(rule_text)
    try:
        ctype = anchor_construct_type(q)
    except AmbiguousTarget:
        ctype = None
    what = TYPE_PHRASES[ctype] if ctype else "code"
    text = f"Find all {what} matching `{collapse(q.anchor.pattern.text)}`"
    for clause in q.clauses:
        if clause.kind == "pattern-inside":
            text += f" inside `{collapse(clause.pattern.text)}`"
    return text + "."


class TemplateNlProvider:
    """Pairs queries with template sentences; other tasks are unsupported."""

    name = "template-nl"

    def complete(self, request: LlmRequest) -> LlmResponse:
        if request.task != "pair_nl":
            raise ProviderError(f"template provider cannot answer {request.task!r}")
        return respond(request, f"<nl_query>{template_nl(str(request.meta['rule']))}</nl_query>")


class _GoldLookup:
    def __init__(self, pairs: Iterable[PairedQuery]):
        self.by_nl: dict[str, PairedQuery] = {}
        for pair in pairs:
            self.by_nl.setdefault(pair.nl, pair)

    def gold(self, request: LlmRequest) -> PairedQuery:
        nl = str(request.meta.get("nl", ""))
        try:
            return self.by_nl[nl]
        except KeyError:
            raise ProviderError(f"no benchmark entry for request {nl[:60]!r}") from None


def direct_answer(lines: Iterable[int]) -> str:
    body = "\n".join(str(n) for n in sorted(set(lines)))
    return f"Matching lines:\n```lines\n{body}\n```" if body else "No matches.\n```lines\n```"


class EchoGoldProvider(_GoldLookup):
    """Answers every task with the benchmark's ground truth.

    ``canned_nl`` maps query ids to pairing answers; ids without an entry get a
    template sentence. With ``miss_repeats`` the direct-search answer keeps only
    the first gold line per file.
    """

    name = "echo-gold"

    def __init__(self, pairs: Iterable[PairedQuery] = (), canned_nl: Mapping[str, str] | None = None, miss_repeats: bool = False):
        super().__init__(pairs)
        self.canned_nl = dict(canned_nl or {})
        self.miss_repeats = miss_repeats

    def complete(self, request: LlmRequest) -> LlmResponse:
        if request.task == "pair_nl":
            canned = self.canned_nl.get(str(request.meta.get("query_id", "")))
            nl = canned if canned is not None else template_nl(str(request.meta["rule"]))
            return respond(request, f"<nl_query>{nl}</nl_query>")
        pair = self.gold(request)
        if request.task in ("translate", "refine"):
            return respond(request, fenced_rule(pair.rule))
        if request.task == "target_type":
            return respond(request, pair.target_type.value)
        if request.task == "direct_search":
            path = str(request.meta.get("path"))
            lines = sorted(line for p, line in pair.gold if p == path)
            if self.miss_repeats:
                lines = lines[:1]
            return respond(request, direct_answer(lines))
        raise ProviderError(f"unsupported task {request.task!r}")


WRONG_FALLBACKS = ("class $C { ... }", "$X = $Y;", "return $X;")


def wrong_anchor_rule(pair: PairedQuery) -> str:
    """A rule whose anchor targets a different construct type than the gold rule."""
    q = pair.query
    candidates = [c.pattern.text for c in q.clauses if c.kind == "pattern-inside"] + list(WRONG_FALLBACKS)
    for text in candidates:
        wrong = query_from_patterns(text, query_id=q.id, message=q.message)
        if anchor_construct_type(wrong) != pair.target_type:
            return wrong.to_yaml(with_comments=False)
    raise ValueError(f"no wrong anchor available for {pair.id}")


class FaultInjectProvider(_GoldLookup):
    """First translation anchors on the wrong construct; feedback yields the gold rule.

    With ``corrects=False`` every refinement answer repeats the wrong rule.
    """

    name = "fault-inject"

    def __init__(self, pairs: Iterable[PairedQuery], corrects: bool = True):
        super().__init__(pairs)
        self.corrects = corrects

    def complete(self, request: LlmRequest) -> LlmResponse:
        pair = self.gold(request)
        if request.task == "translate":
            return respond(request, fenced_rule(wrong_anchor_rule(pair)))
        if request.task == "refine":
            return respond(request, fenced_rule(pair.rule if self.corrects else wrong_anchor_rule(pair)))
        if request.task == "target_type":
            return respond(request, pair.target_type.value)
        raise ProviderError(f"unsupported task {request.task!r}")


__all__ = [
    "EchoGoldProvider",
    "FaultInjectProvider",
    "TemplateNlProvider",
    "direct_answer",
    "fenced_rule",
    "template_nl",
    "wrong_anchor_rule",
]
