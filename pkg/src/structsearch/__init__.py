"""Structural code search over Java: a pattern matcher, a query enumerator,
natural-language pairing and translation, and an evaluation harness."""

from __future__ import annotations

from .describe import describe_query
from .evaluation import (
    Benchmark,
    EvalReport,
    baseline_llm_direct,
    baseline_vector_search,
    build_benchmark,
    format_table,
    run_pipeline_eval,
    score_query,
    vector_sweep,
)
from .generation import GenConfig, GeneratedQuery, complexity, enumerate_queries, generalize, init, specialize
from .matching import Match, Query, anchor_construct_type, compile_query, execute
from .nl import (
    PairedQuery,
    RagIndex,
    TranslateOptions,
    build_index,
    expected_target_type,
    refine,
    retrieve,
    translate,
    translate_and_refine,
)
from .patterns import Pattern, parse_pattern
from .providers import HashingEmbedder, LlmRequest, LlmResponse, ReplayProvider
from .syntax import AstNode, CodeConstruct, ConstructType, Corpus, Span, load_bundled_corpus, load_corpus, parse_source

__version__ = "0.1.0"

__all__ = [
    "AstNode",
    "Benchmark",
    "CodeConstruct",
    "ConstructType",
    "Corpus",
    "EvalReport",
    "GenConfig",
    "GeneratedQuery",
    "HashingEmbedder",
    "LlmRequest",
    "LlmResponse",
    "Match",
    "PairedQuery",
    "Pattern",
    "Query",
    "RagIndex",
    "ReplayProvider",
    "Span",
    "TranslateOptions",
    "anchor_construct_type",
    "baseline_llm_direct",
    "baseline_vector_search",
    "build_benchmark",
    "build_index",
    "compile_query",
    "complexity",
    "describe_query",
    "enumerate_queries",
    "execute",
    "expected_target_type",
    "format_table",
    "generalize",
    "init",
    "load_bundled_corpus",
    "load_corpus",
    "parse_pattern",
    "parse_source",
    "refine",
    "retrieve",
    "run_pipeline_eval",
    "score_query",
    "specialize",
    "translate",
    "translate_and_refine",
    "vector_sweep",
]
