"""Pairing DSL queries with natural language, and translating natural language back.

Pairing renders a query's structured description into a few-shot prompt and
asks a provider for a one-sentence request. Translation retrieves the most
similar (NL, DSL) pairs from a :class:`RagIndex`, prompts for a rule, and
refines it when the rule's anchor construct type disagrees with the type the
request asks for.
"""

from __future__ import annotations

import base64
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .describe import describe_query
from .generation import GeneratedQuery
from .matching import (
    AmbiguousTarget,
    Clause,
    Query,
    RuleError,
    anchor_construct_type,
    compile_query,
    pattern_construct_type,
)
from .patterns import PatternParseError
from .providers import (
    DimensionMismatch,
    Embedder,
    HashingEmbedder,
    LlmProvider,
    LlmRequest,
    LlmResponse,
)
from .syntax import ConstructType


class NlBridgeError(RuntimeError):
    pass


class ExtractionError(NlBridgeError):
    pass


class TranslationFailed(NlBridgeError):
    def __init__(self, message: str, trace: TranslationTrace | None = None):
        super().__init__(message)
        self.trace = trace


class UnparseableLabel(NlBridgeError):
    pass


class EmptyIndex(NlBridgeError):
    pass


Location = tuple[str, int]

TYPE_PHRASES: dict[ConstructType, str] = {
    ConstructType.Literal: "literals",
    ConstructType.Variable: "variable references",
    ConstructType.MethodCall: "method calls",
    ConstructType.Operator: "operator expressions",
    ConstructType.IfStatement: "if statements",
    ConstructType.ForLoop: "for loops",
    ConstructType.WhileLoop: "while loops",
    ConstructType.ContinueStatement: "continue statements",
    ConstructType.BreakStatement: "break statements",
    ConstructType.ReturnStatement: "return statements",
    ConstructType.TryStatement: "try statements",
    ConstructType.SwitchStatement: "switch statements",
    ConstructType.VariableDeclaration: "variable declarations",
    ConstructType.MethodDeclaration: "method declarations",
    ConstructType.ClassDeclaration: "class declarations",
}


def collapse(text: str) -> str:
    return " ".join(text.split())


# ---------------------------------------------------------------------------
# paired queries


@dataclass
class PairedQuery:
    id: str
    rule: str
    nl: str
    description: str
    gold: list[Location]
    target_type: ConstructType

    @cached_property
    def query(self) -> Query:
        return compile_query(self.rule)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "nl": self.nl,
            "rule": self.rule,
            "description": self.description,
            "target_type": self.target_type.value,
            "gold": [{"path": p, "start_line": line} for p, line in self.gold],
        }

    @classmethod
    def from_json(cls, data: dict) -> PairedQuery:
        return cls(
            data["id"],
            data["rule"],
            data["nl"],
            data.get("description", ""),
            [(g["path"], int(g["start_line"])) for g in data.get("gold", [])],
            ConstructType(data["target_type"]),
        )


def gold_locations(generated: GeneratedQuery) -> list[Location]:
    return sorted({(m.span.file_id, m.span.start_line) for m in generated.gold_matches})


def query_target_type(q: Query, fallback: ConstructType) -> ConstructType:
    try:
        found = anchor_construct_type(q)
    except AmbiguousTarget:
        found = None
    return found or fallback


# ---------------------------------------------------------------------------
# inline comments and clause documentation


def clause_comment(clause: Clause) -> str:
    """One-line explanation of what a clause contributes, used in example rules."""
    pattern = clause.pattern
    ctype = pattern_construct_type(pattern)
    noun = TYPE_PHRASES[ctype][:-1] if ctype else pattern.root.kind.replace("_", " ")
    what = ("an " if noun[0] in "aeiou" else "a ") + noun
    holes = []
    if pattern.metavariables:
        holes.append(", ".join(pattern.metavariables) + " stand for any expression")
    if "..." in pattern.text:
        holes.append("... skips any statements or arguments")
    suffix = f" ({'; '.join(holes)})" if holes else ""
    if clause.kind == "pattern-inside":
        return f"restrict matches to code inside {what}{suffix}"
    if clause.kind == "pattern-not":
        return f"drop matches that are also {what}{suffix}"
    if clause.kind == "pattern-either":
        return f"report code matching any of the alternatives{suffix}"
    return f"report {what} of this shape{suffix}"


def annotate(q: Query) -> Query:
    """The query with a generated inline comment on every clause."""
    return Query(tuple(Clause(c.kind, c.patterns, clause_comment(c)) for c in q.clauses), q.id, q.message)


CLAUSE_DOCS = """\
Clause reference:
- pattern: a Java statement, expression or declaration. Every place in the code with the same
  syntax tree is a match, and the match location is what gets reported.
- pattern-inside: an enclosing Java fragment. A match is kept only if it lies within code matching
  this fragment in the same file. Put `...` where the reported code sits.
- pattern-not: a Java fragment. A match is dropped if the matched code also matches this fragment.
- pattern-either: a list of `- pattern:` alternatives. A match of any alternative is reported.
- $NAME (upper case) matches one expression, identifier, type or literal. Two uses of the same name
  must match identical code.
- ... matches any run of statements in a block, arguments in a call, parameters in a declaration,
  or a part of a for-loop header. It may match nothing.
"""

TRANSLATE_SYSTEM = """\
You convert natural-language structural code search requests over Java source code into rules of a
Semgrep-compatible pattern language.

A rule has exactly one `pattern` (or one `pattern-either`) clause naming the code to report, and may
add `pattern-inside` and `pattern-not` clauses to constrain it. Metavariables such as $X match any
single expression, and `...` matches any sequence of statements or arguments.

Answer with one rule inside a fenced ```yaml block, following this template:
```yaml
rules:
  - id: search
    languages: [java]
    message: structural match
    patterns:
      - pattern: |
          <java fragment to report>
      - pattern-inside: |
          <optional enclosing java fragment containing ...>
```
"""


def translate_system(with_api_docs: bool) -> str:
    return TRANSLATE_SYSTEM + ("\n" + CLAUSE_DOCS if with_api_docs else "")


def example_block(pair: PairedQuery, with_inline_comments: bool) -> str:
    q = pair.query
    rule = (annotate(q) if with_inline_comments else q.without_comments()).to_yaml(with_comments=with_inline_comments)
    return f"Request: {pair.nl}\n```yaml\n{rule}```"


def translate_user(nl: str, examples: Sequence[PairedQuery], with_inline_comments: bool) -> str:
    parts = []
    if examples:
        parts.append("Examples of requests and their rules:")
        parts.extend(example_block(p, with_inline_comments) for p in examples)
    parts.append(f"Request: {nl}\nWrite the rule.")
    return "\n\n".join(parts)


_FENCE_RE = re.compile(r"```(?:ya?ml)?[ \t]*\n(.*?)```", re.DOTALL)


def extract_rule(completion: str) -> str:
    found = _FENCE_RE.search(completion)
    if found is None:
        raise ExtractionError("completion has no fenced rule block")
    return found.group(1)


# ---------------------------------------------------------------------------
# pairing


PAIR_SYSTEM = """\
You write the natural-language search request a Java developer would type to find code.
You are given a rule in a Semgrep-compatible structural pattern language together with a
structured description of each pattern's syntax tree. Describe what the rule finds in one
sentence, naming the constructs involved and how they are nested. Do not mention metavariable
names. Put the sentence between <nl_query> and </nl_query>.
"""

# Worked examples written for this tool; (rule, request) pairs.
PAIR_EXAMPLES: tuple[tuple[str, str], ...] = (
    ("pattern: continue;", "Find all continue statements."),
    (
        "patterns:\n  - pattern: $X += Integer.toString(...);\n  - pattern-inside: for (...) { ... }\n",
        "Find compound additions whose right-hand side converts a value with Integer.toString, located within a for loop.",
    ),
    (
        "pattern: while (! $VAR1 .interrupted()) { ... }",
        "Find while loops that keep going as long as a call to interrupted() on some object returns false.",
    ),
)


def pair_example_block(rule_text: str, nl: str | None) -> str:
    q = compile_query(rule_text)
    answer = f"<nl_query>{nl}</nl_query>" if nl is not None else "<nl_query>"
    return f"<rule>\n{q.to_yaml(with_comments=False)}</rule>\n{describe_query(q).to_prompt()}\n{answer}"


def pair_user(q: Query) -> str:
    shots = [pair_example_block(rule, nl) for rule, nl in PAIR_EXAMPLES]
    target = f"<rule>\n{q.without_comments().to_yaml(with_comments=False)}</rule>\n{describe_query(q).to_prompt()}"
    return (
        "Worked examples:\n\n"
        + "\n\n".join(shots)
        + "\n\nNow write the request for this rule:\n\n"
        + target
    )


_NL_RE = re.compile(r"<nl_query>(.*?)</nl_query>", re.DOTALL)


def extract_nl(completion: str) -> str:
    found = _NL_RE.findall(completion)
    if not found or not collapse(found[-1]):
        raise ExtractionError("completion lacks an <nl_query> answer")
    text = collapse(found[-1])
    sentence = re.split(r"(?<=[.!?])\s+(?=[A-Z])", text)[0]
    return sentence


def pair_nl(q: Query, llm: LlmProvider) -> str:
    """Ask the provider for a one-sentence request equivalent to ``q``."""
    request = LlmRequest(
        PAIR_SYSTEM,
        pair_user(q),
        task="pair_nl",
        meta={"query_id": q.id, "rule": q.to_yaml(with_comments=False)},
        request_id=q.id,
    )
    return extract_nl(llm.complete(request).text)


def pair_generated(generated: Sequence[GeneratedQuery], llm: LlmProvider) -> list[PairedQuery]:
    pairs = []
    for g in generated:
        q = g.query
        pairs.append(
            PairedQuery(
                q.id,
                q.to_yaml(with_comments=False),
                pair_nl(q, llm),
                describe_query(q).text,
                gold_locations(g),
                query_target_type(q, g.target.ctype),
            )
        )
    return pairs


def drop_overlapping(pairs: Iterable[PairedQuery], benchmark: Iterable[PairedQuery]) -> list[PairedQuery]:
    """Remove example pairs whose rule duplicates a benchmark rule (ids and comments ignored)."""
    taken = {p.query.canonical_key() for p in benchmark}
    out, seen = [], set()
    for pair in pairs:
        key = pair.query.canonical_key()
        if key in taken or key in seen:
            continue
        seen.add(key)
        out.append(pair)
    return out


# ---------------------------------------------------------------------------
# retrieval index


@dataclass
class RagIndex:
    examples: list[PairedQuery]
    vectors: np.ndarray
    provider: str

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1]) if self.vectors.ndim == 2 else 0

    def __len__(self) -> int:
        return len(self.examples)

    def to_json(self) -> dict:
        return {
            "provider": self.provider,
            "dim": self.dim,
            "examples": [
                {**p.to_json(), "vector": base64.b64encode(self.vectors[i].astype("<f8").tobytes()).decode("ascii")}
                for i, p in enumerate(self.examples)
            ],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, data: dict) -> RagIndex:
        examples, rows = [], []
        for item in data["examples"]:
            examples.append(PairedQuery.from_json(item))
            rows.append(np.frombuffer(base64.b64decode(item["vector"]), dtype="<f8"))
        vectors = np.vstack(rows) if rows else np.zeros((0, int(data.get("dim", 0))))
        if vectors.shape[1] != int(data.get("dim", vectors.shape[1])):
            raise DimensionMismatch("stored vectors disagree with the declared dimension")
        return cls(examples, vectors, data["provider"])

    @classmethod
    def load(cls, path: str | Path) -> RagIndex:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def embedder_for(tag: str) -> Embedder:
    m = re.fullmatch(r"hashing-(\d+)", tag)
    if m:
        return HashingEmbedder(int(m.group(1)))
    raise NlBridgeError(f"no offline embedder for index provider {tag!r}; pass one explicitly")


def build_index(pairs: Sequence[PairedQuery], embedder: Embedder) -> RagIndex:
    if not pairs:
        raise EmptyIndex("cannot build an index from zero pairs")
    vectors = np.asarray(embedder.embed([p.nl for p in pairs]), dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] != len(pairs):
        raise DimensionMismatch("embedder returned a malformed batch")
    if getattr(embedder, "dim", 0) and vectors.shape[1] != embedder.dim:
        raise DimensionMismatch(f"expected dimension {embedder.dim}, got {vectors.shape[1]}")
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    vectors = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    return RagIndex(list(pairs), vectors, embedder.name)


def similarities(index: RagIndex, nl: str, embedder: Embedder | None = None) -> np.ndarray:
    embedder = embedder or embedder_for(index.provider)
    query = np.asarray(embedder.embed([nl]), dtype=np.float64)[0]
    if query.shape[0] != index.dim:
        raise DimensionMismatch(f"query dimension {query.shape[0]} does not match index dimension {index.dim}")
    return np.round(np.array([float(np.dot(row, query)) for row in index.vectors]), 12)


def retrieve(index: RagIndex, nl: str, k: int = 5, embedder: Embedder | None = None) -> list[PairedQuery]:
    """Top-``k`` examples by cosine similarity, ties broken by id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not index.examples:
        raise EmptyIndex("index has no examples")
    sims = similarities(index, nl, embedder)
    order = sorted(range(len(index.examples)), key=lambda i: (-sims[i], index.examples[i].id))
    return [index.examples[i] for i in order[:k]]


# ---------------------------------------------------------------------------
# translation and refinement


@dataclass(frozen=True)
class TranslateOptions:
    k: int = 5
    use_examples: bool = True
    with_inline_comments: bool = True
    with_api_docs: bool = False
    refine: bool = True
    max_rounds: int = 2


@dataclass
class RefinementRound:
    number: int
    actual: str | None
    expected: str
    feedback: str
    completion: str
    parsed: bool


@dataclass
class TranslationTrace:
    nl: str
    retrieved: list[str] = field(default_factory=list)
    prompts: list[str] = field(default_factory=list)
    completions: list[str] = field(default_factory=list)
    parse_retries: int = 0
    expected_type: str | None = None
    initial_type: str | None = None
    rounds: list[RefinementRound] = field(default_factory=list)
    unresolved: bool = False
    final_rule: str | None = None
    error: str | None = None
    prompt_tokens: int = 0
    completion_tokens: int = 0

    @property
    def mismatch_detected(self) -> bool:
        return self.expected_type is not None and self.initial_type != self.expected_type

    def call(self, llm: LlmProvider, request: LlmRequest) -> LlmResponse:
        self.prompts.append(request.user)
        response = llm.complete(request)
        self.completions.append(response.text)
        self.prompt_tokens += response.prompt_tokens
        self.completion_tokens += response.completion_tokens
        return response

    def to_dict(self) -> dict:
        return {
            "nl": self.nl,
            "retrieved": self.retrieved,
            "parse_retries": self.parse_retries,
            "expected_type": self.expected_type,
            "initial_type": self.initial_type,
            "rounds": [r.__dict__ for r in self.rounds],
            "unresolved": self.unresolved,
            "final_rule": self.final_rule,
            "error": self.error,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
        }


def _parse_completion(text: str) -> Query:
    return compile_query(extract_rule(text))


def _safe_type(q: Query) -> ConstructType | None:
    try:
        return anchor_construct_type(q)
    except AmbiguousTarget:
        return None


def _prompt_for(nl: str, index: RagIndex | None, opts: TranslateOptions, trace: TranslationTrace) -> tuple[str, str]:
    examples: list[PairedQuery] = []
    if opts.use_examples and opts.k > 0 and index is not None and len(index):
        examples = retrieve(index, nl, opts.k)
    trace.retrieved = [p.id for p in examples]
    return translate_system(opts.with_api_docs), translate_user(nl, examples, opts.with_inline_comments)


def translate(
    nl: str,
    index: RagIndex | None,
    llm: LlmProvider,
    opts: TranslateOptions = TranslateOptions(),
    trace: TranslationTrace | None = None,
) -> tuple[Query, TranslationTrace]:
    """Prompt for a rule; one retry with the parse error appended."""
    trace = trace or TranslationTrace(nl)
    system, user = _prompt_for(nl, index, opts, trace)
    request = LlmRequest(system, user, task="translate", meta={"nl": nl})
    completion = trace.call(llm, request).text
    try:
        q = _parse_completion(completion)
    except (ExtractionError, RuleError, PatternParseError) as first:
        trace.parse_retries += 1
        retry_user = f"{user}\n\nYour previous answer could not be used: {first}\nAnswer again with one valid rule in a fenced yaml block."
        completion = trace.call(llm, LlmRequest(system, retry_user, task="translate", meta={"nl": nl, "retry": True})).text
        try:
            q = _parse_completion(completion)
        except (ExtractionError, RuleError, PatternParseError) as second:
            trace.error = str(second)
            raise TranslationFailed(f"no usable rule after retry: {second}", trace) from second
    trace.final_rule = q.to_yaml(with_comments=False)
    return q, trace


TARGET_SYSTEM = (
    "You identify the kind of code construct a structural code search request asks to find. "
    "Answer with exactly one label from this list: " + ", ".join(t.value for t in ConstructType) + "."
)


def parse_label(text: str) -> ConstructType:
    best: tuple[int, int, ConstructType] | None = None
    for ctype in ConstructType:
        spaced = re.sub(r"(?<=[a-z])(?=[A-Z])", " ", ctype.value)
        for form in {ctype.value, spaced}:
            m = re.search(rf"\b{re.escape(form)}\b", text, re.IGNORECASE)
            if m and (best is None or (m.start(), -len(form)) < (best[0], best[1])):
                best = (m.start(), -len(form), ctype)
    if best is None:
        raise UnparseableLabel(f"no construct type label in {text[:80]!r}")
    return best[2]


def expected_target_type(nl: str, llm: LlmProvider, trace: TranslationTrace | None = None) -> ConstructType:
    request = LlmRequest(TARGET_SYSTEM, f"Request: {nl}\nLabel:", task="target_type", meta={"nl": nl})
    response = trace.call(llm, request) if trace is not None else llm.complete(request)
    return parse_label(response.text)


def refine(
    nl: str,
    q: Query,
    index: RagIndex | None,
    llm: LlmProvider,
    max_rounds: int = 2,
    opts: TranslateOptions = TranslateOptions(),
    trace: TranslationTrace | None = None,
) -> tuple[Query, TranslationTrace]:
    """Re-prompt while the rule's anchor type differs from the requested construct type."""
    trace = trace or TranslationTrace(nl)
    actual = _safe_type(q)
    trace.initial_type = actual.value if actual else None
    try:
        expected = expected_target_type(nl, llm, trace)
    except UnparseableLabel:
        return q, trace
    trace.expected_type = expected.value
    if actual == expected:
        return q, trace
    system, user = _prompt_for(nl, index, opts, trace)
    current, best = q, q
    for number in range(1, max_rounds + 1):
        actual_name = actual.value if actual else "a construct outside the type list"
        feedback = (
            f"The query targets {actual_name} but the request asks for {expected.value}. "
            f"Revise the rule so that its pattern clause reports {expected.value} constructs."
        )
        previous = current.without_comments().to_yaml(with_comments=False)
        refine_user = f"{user}\n\nYour rule was:\n```yaml\n{previous}```\n{feedback}"
        completion = trace.call(llm, LlmRequest(system, refine_user, task="refine", meta={"nl": nl, "round": number})).text
        seen_type = actual.value if actual else None
        try:
            candidate = _parse_completion(completion)
        except (ExtractionError, RuleError, PatternParseError):
            trace.rounds.append(RefinementRound(number, seen_type, expected.value, feedback, completion, False))
            continue
        trace.rounds.append(RefinementRound(number, seen_type, expected.value, feedback, completion, True))
        current = best = candidate
        actual = _safe_type(candidate)
        if actual == expected:
            trace.final_rule = candidate.to_yaml(with_comments=False)
            return candidate, trace
    trace.unresolved = True
    trace.final_rule = best.to_yaml(with_comments=False)
    return best, trace


def translate_and_refine(
    nl: str, index: RagIndex | None, llm: LlmProvider, opts: TranslateOptions = TranslateOptions()
) -> tuple[Query, TranslationTrace]:
    q, trace = translate(nl, index, llm, opts)
    if opts.refine and opts.max_rounds > 0:
        q, trace = refine(nl, q, index, llm, opts.max_rounds, opts, trace)
    return q, trace
