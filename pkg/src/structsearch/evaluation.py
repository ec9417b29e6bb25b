"""Benchmarks, per-query metrics, the end-to-end pipeline evaluation and the two baselines."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .generation import GenConfig, enumerate_queries
from .matching import execute
from .nl import (
    Location,
    NlBridgeError,
    PairedQuery,
    RagIndex,
    TranslateOptions,
    TranslationFailed,
    pair_generated,
    translate_and_refine,
)
from .providers import Embedder, LlmProvider, LlmRequest, ProviderError
from .syntax import Corpus, Span, UnknownFile, bundled_corpus_path, enclosing_method, load_corpus, load_manifest

GRANULARITIES = ("line", "method")
BUNDLED = "<bundled>"


class EvalError(RuntimeError):
    pass


class CallBudgetExceeded(EvalError):
    pass


# ---------------------------------------------------------------------------
# benchmark


def load_corpus_ref(ref: str | Path, base: Path | None = None) -> Corpus:
    """Load a corpus from a manifest, a directory, a single ``.java`` file, or the bundled marker."""
    if str(ref) == BUNDLED:
        return load_corpus(bundled_corpus_path())
    path = Path(ref)
    if not path.is_absolute() and base is not None:
        path = base / path
    if path.is_file() and path.suffix == ".java":
        return Corpus.from_sources({path.name: path.read_text(encoding="utf-8", errors="replace")}, path.parent)
    return load_manifest(path) if path.is_file() else load_corpus(path)


@dataclass
class Benchmark:
    corpus_ref: str
    queries: list[PairedQuery]
    granularity: str = "line"
    provenance: dict = field(default_factory=dict)
    base_dir: Path | None = field(default=None, repr=False)
    _corpus: Corpus | None = field(default=None, repr=False)

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = load_corpus_ref(self.corpus_ref, self.base_dir)
        return self._corpus

    def with_corpus(self, corpus: Corpus) -> Benchmark:
        self._corpus = corpus
        return self

    def validate(self) -> None:
        ids = [q.id for q in self.queries]
        if len(ids) != len(set(ids)):
            raise EvalError("benchmark query ids are not unique")
        for q in self.queries:
            for path, _ in q.gold:
                if path not in self.corpus:
                    raise UnknownFile(path)

    def subset(self, ids: Iterable[str]) -> Benchmark:
        wanted = set(ids)
        return Benchmark(self.corpus_ref, [q for q in self.queries if q.id in wanted], self.granularity, dict(self.provenance), self.base_dir, self._corpus)

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus_ref,
            "granularity": self.granularity,
            "provenance": self.provenance,
            "queries": [q.to_json() for q in self.queries],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> Benchmark:
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        return cls(
            data["corpus"],
            [PairedQuery.from_json(q) for q in data["queries"]],
            data.get("granularity", "line"),
            data.get("provenance", {}),
            path.parent,
        )


def build_benchmark(corpus: Corpus, cfg: GenConfig, llm: LlmProvider, corpus_ref: str = BUNDLED) -> Benchmark:
    """Enumerate queries, pair each with a request sentence, and record gold start lines."""
    generated = enumerate_queries(corpus, cfg)
    pairs = pair_generated(generated, llm)
    bench = Benchmark(corpus_ref, pairs, "line", {"generator": cfg.to_dict(), "pairing": getattr(llm, "name", "")})
    return bench.with_corpus(corpus)


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class QueryScore:
    query_id: str
    recall: float
    precision: float
    f1: float
    tp_g: int
    p: int
    tp_p: int
    pp: int
    error: str | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


class _MethodMap:
    """Caches line -> enclosing-method identity per file."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self.cache: dict[Location, object] = {}

    def unit(self, loc: Location) -> object:
        if loc not in self.cache:
            span = enclosing_method(self.corpus, loc[0], loc[1])
            self.cache[loc] = span if span is not None else ("outside", loc[0], loc[1])
        return self.cache[loc]


def _rates(tp_g: int, p: int, tp_p: int, pp: int) -> tuple[float, float, float]:
    # Zero-division conventions live here and only here.
    if p == 0 and pp == 0:
        return 1.0, 1.0, 1.0
    if p == 0:
        return 1.0, 0.0, 0.0
    recall = tp_g / p
    precision = tp_p / pp if pp else 0.0
    f1 = 2 * recall * precision / (recall + precision) if recall + precision > 0 else 0.0
    return recall, precision, f1


def score_query(
    gold: Iterable[Location],
    pred: Iterable[Location],
    granularity: str = "line",
    corpus: Corpus | None = None,
    query_id: str = "",
    method_map: _MethodMap | None = None,
) -> QueryScore:
    """Recall, precision and F1 over (path, start_line) locations.

    At method granularity two locations are equivalent when they fall in the
    same innermost method; lines outside any method only match themselves.
    """
    gold_set, pred_set = set(gold), set(pred)
    if granularity == "line":
        tp_g = len(gold_set & pred_set)
        tp_p = tp_g
    elif granularity == "method":
        if corpus is None and method_map is None:
            raise ValueError("method granularity needs the corpus")
        mm = method_map or _MethodMap(corpus)  # type: ignore[arg-type]
        for path, _ in gold_set | pred_set:
            if path not in mm.corpus:
                raise UnknownFile(path)
        gold_units = {mm.unit(g) for g in gold_set}
        pred_units = {mm.unit(p) for p in pred_set}
        tp_g = sum(1 for g in gold_set if mm.unit(g) in pred_units)
        tp_p = sum(1 for p in pred_set if mm.unit(p) in gold_units)
    else:
        raise ValueError(f"unknown granularity {granularity!r}")
    recall, precision, f1 = _rates(tp_g, len(gold_set), tp_p, len(pred_set))
    return QueryScore(query_id, recall, precision, f1, tp_g, len(gold_set), tp_p, len(pred_set))


@dataclass
class EvalReport:
    scores: list[QueryScore]
    granularity: str
    method: str
    model: str = ""
    prompt_tokens: int = 0
    completion_tokens: int = 0
    failures: dict[str, str] = field(default_factory=dict)
    details: dict[str, dict] = field(default_factory=dict)
    label: str = ""

    def _mean(self, attr: str) -> float:
        return float(np.mean([getattr(s, attr) for s in self.scores])) if self.scores else 0.0

    @property
    def recall(self) -> float:
        return self._mean("recall")

    @property
    def precision(self) -> float:
        return self._mean("precision")

    @property
    def f1(self) -> float:
        return self._mean("f1")

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "label": self.label,
            "model": self.model,
            "granularity": self.granularity,
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "failures": self.failures,
            "queries": [s.to_json() for s in self.scores],
            "details": self.details,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")


def format_table(reports: Sequence[EvalReport]) -> str:
    """Aligned text table with one row per report, scores in percent."""
    header = ("Approach", "Gran.", "Rec. (%)", "Prec. (%)", "F1 (%)", "Tokens")
    rows = [
        (
            r.label or r.method,
            r.granularity.capitalize(),
            f"{100 * r.recall:.1f}",
            f"{100 * r.precision:.1f}",
            f"{100 * r.f1:.1f}",
            str(r.total_tokens),
        )
        for r in reports
    ]
    widths = [max(len(str(row[i])) for row in [header, *rows]) for i in range(len(header))]
    lines = []
    for row in [header, *rows]:
        cells = [row[0].ljust(widths[0]), row[1].ljust(widths[1])] + [row[i].rjust(widths[i]) for i in range(2, len(row))]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# pipeline


def run_pipeline_eval(
    benchmark: Benchmark,
    index: RagIndex | None,
    llm: LlmProvider,
    opts: TranslateOptions = TranslateOptions(),
    granularity: str | None = None,
    label: str = "",
) -> EvalReport:
    """Translate, refine, execute and score every benchmark query."""
    corpus = benchmark.corpus
    granularity = granularity or benchmark.granularity
    mm = _MethodMap(corpus)
    report = EvalReport([], granularity, "pipeline", getattr(llm, "name", ""), label=label or "NL-to-DSL")
    for item in benchmark.queries:
        pred: set[Location] = set()
        error = None
        trace = None
        try:
            q, trace = translate_and_refine(item.nl, index, llm, opts)
            pred = {(m.span.file_id, m.span.start_line) for m in execute(q, corpus)}
        except TranslationFailed as exc:
            error, trace = str(exc), exc.trace
        except (ProviderError, NlBridgeError) as exc:
            error = str(exc)
        score = score_query(item.gold, pred, granularity, corpus, item.id, mm)
        if error is not None:
            score = QueryScore(**{**score.__dict__, "error": error})
            report.failures[item.id] = error
        report.scores.append(score)
        if trace is not None:
            report.prompt_tokens += trace.prompt_tokens
            report.completion_tokens += trace.completion_tokens
            report.details[item.id] = {
                "expected_type": trace.expected_type,
                "initial_type": trace.initial_type,
                "mismatch_detected": trace.mismatch_detected,
                "rounds": len(trace.rounds),
                "unresolved": trace.unresolved,
                "parse_retries": trace.parse_retries,
            }
    return report


# ---------------------------------------------------------------------------
# LLM-direct baseline


DIRECT_SYSTEM = """\
You answer structural code search requests by reading Java source code.
You are given one source file with line numbers and a search request. Work through the file,
then list the line number on which each matching piece of code starts. Report every occurrence,
including repeated ones in the same method. Put the line numbers one per line inside a fenced
```lines block; leave the block empty when nothing matches.
"""


def numbered_source(text: str) -> str:
    lines = text.splitlines()
    width = len(str(len(lines)))
    return "\n".join(f"{str(i).rjust(width)} | {line}" for i, line in enumerate(lines, 1))


def direct_user(path: str, text: str, nl: str) -> str:
    return f"File: {path}\n```java\n{numbered_source(text)}\n```\nRequest: {nl}\nWhich lines match?"


_LINES_RE = re.compile(r"```lines?[ \t]*\n(.*?)```", re.DOTALL)


def parse_line_answer(completion: str, max_line: int) -> set[int]:
    found = _LINES_RE.findall(completion)
    if not found:
        return set()
    out = set()
    for raw in found[-1].splitlines():
        m = re.match(r"\s*(\d+)", raw)
        if m and 1 <= int(m.group(1)) <= max_line:
            out.add(int(m.group(1)))
    return out


def baseline_llm_direct(
    benchmark: Benchmark,
    llm: LlmProvider,
    max_calls: int | None = None,
    granularity: str | None = None,
) -> EvalReport:
    """Ask the provider about every (query, file) pair and union the answered lines."""
    corpus = benchmark.corpus
    granularity = granularity or benchmark.granularity
    calls = len(benchmark.queries) * len(corpus.files)
    if max_calls is not None and calls > max_calls:
        raise CallBudgetExceeded(f"{calls} provider calls needed but the cap is {max_calls}")
    mm = _MethodMap(corpus)
    report = EvalReport([], granularity, "llm-direct", getattr(llm, "name", ""), label="LLM direct")
    for item in benchmark.queries:
        pred: set[Location] = set()
        errors = []
        for source in corpus.files:
            request = LlmRequest(
                DIRECT_SYSTEM,
                direct_user(source.path, source.text, item.nl),
                task="direct_search",
                meta={"nl": item.nl, "path": source.path},
            )
            try:
                response = llm.complete(request)
            except ProviderError as exc:
                errors.append(f"{source.path}: {exc}")
                continue
            report.prompt_tokens += response.prompt_tokens
            report.completion_tokens += response.completion_tokens
            n_lines = len(source.text.splitlines())
            pred.update((source.path, line) for line in parse_line_answer(response.text, n_lines))
        score = score_query(item.gold, pred, granularity, corpus, item.id, mm)
        if errors:
            report.failures[item.id] = "; ".join(errors[:3]) + (f" (+{len(errors) - 3} more)" if len(errors) > 3 else "")
        report.scores.append(score)
    return report


# ---------------------------------------------------------------------------
# vector-search baseline


@dataclass
class MethodChunks:
    locations: list[Location]
    spans: list[Span]
    vectors: np.ndarray


def method_chunks(corpus: Corpus, embedder: Embedder) -> MethodChunks:
    locations, spans, texts = [], [], []
    for source in corpus.files:
        for method in source.methods():
            locations.append((source.path, method.span.start_line))
            spans.append(method.span)
            texts.append(method.text)
    vectors = np.asarray(embedder.embed(texts), dtype=np.float64) if texts else np.zeros((0, getattr(embedder, "dim", 0)))
    return MethodChunks(locations, spans, vectors)


def vector_sweep(
    benchmark: Benchmark,
    embedder: Embedder,
    thresholds: Sequence[float],
    chunks: MethodChunks | None = None,
) -> list[EvalReport]:
    """One method-granularity report per threshold, sharing the embeddings."""
    corpus = benchmark.corpus
    chunks = chunks or method_chunks(corpus, embedder)
    queries = np.asarray(embedder.embed([q.nl for q in benchmark.queries]), dtype=np.float64)
    sims = np.round(queries @ chunks.vectors.T, 12) if len(chunks.locations) else np.zeros((len(queries), 0))
    mm = _MethodMap(corpus)
    reports = []
    for threshold in thresholds:
        report = EvalReport([], "method", "vector", getattr(embedder, "name", ""), label=f"Vector T={threshold:g}")
        for row, item in enumerate(benchmark.queries):
            pred = {chunks.locations[j] for j in np.nonzero(sims[row] >= threshold)[0]}
            report.scores.append(score_query(item.gold, pred, "method", corpus, item.id, mm))
            report.details[item.id] = {"predicted": len(pred)}
        reports.append(report)
    return reports


def baseline_vector_search(benchmark: Benchmark, embedder: Embedder, threshold: float) -> EvalReport:
    """Predict every method whose cosine similarity with the request is at least ``threshold``."""
    return vector_sweep(benchmark, embedder, [threshold])[0]
