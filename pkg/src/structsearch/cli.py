"""Command-line entry point: ``scs <subcommand>``.

Settings resolve as command-line flag, then environment variable, then
``scs.toml`` (current directory or ``--config``), then built-in default.
Exit codes: 0 success with results, 1 success without results, 2 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path
from typing import Any, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .evaluation import (
    BUNDLED,
    Benchmark,
    CallBudgetExceeded,
    baseline_llm_direct,
    format_table,
    load_corpus_ref,
    run_pipeline_eval,
    vector_sweep,
)
from .generation import (
    BudgetExhausted,
    EmptyCorpus,
    GenConfig,
    enumerate_queries,
    format_distribution,
    type_distribution,
    write_jsonl,
)
from .matching import RuleError, compile_query, execute
from .mocks import EchoGoldProvider, FaultInjectProvider, TemplateNlProvider
from .nl import (
    NlBridgeError,
    PairedQuery,
    RagIndex,
    TranslateOptions,
    TranslationFailed,
    build_index,
    drop_overlapping,
    pair_nl,
    query_target_type,
    translate_and_refine,
)
from .describe import describe_query
from .patterns import PatternParseError
from .providers import (
    ChatCompletionProvider,
    Embedder,
    HashingEmbedder,
    HttpEmbedder,
    LlmProvider,
    ProviderError,
    ProviderSettings,
    ReplayProvider,
)
from .syntax import ConstructType, Corpus

EXIT_OK, EXIT_EMPTY, EXIT_ERROR = 0, 1, 2

DEFAULTS: dict[str, dict[str, Any]] = {
    "generate": {"n": 50, "cmin": 1, "cmax": 5, "seed": 0, "max_attempts": 500},
    "search": {"k": 5, "rounds": 2},
    "eval": {"k": 5, "rounds": 2, "granularity": "line", "max_calls": 1000, "thresholds": [0.25, 0.5, 0.75]},
    "provider": {"endpoint": None, "api_key": None, "model": None, "embed_model": None, "embedder": "hashing"},
}
ENV = {
    ("provider", "endpoint"): "SCS_API_ENDPOINT",
    ("provider", "api_key"): "SCS_API_KEY",
    ("provider", "model"): "SCS_MODEL",
    ("provider", "embed_model"): "SCS_EMBED_MODEL",
}

ABLATIONS = ("no-examples", "no-comments", "with-docs", "no-refine")


class CliError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# configuration


def load_toml(path: str | None) -> dict:
    candidate = Path(path) if path else Path("scs.toml")
    if not candidate.is_file():
        if path:
            raise CliError(f"config file {path} not found")
        return {}
    with open(candidate, "rb") as fh:
        return tomllib.load(fh)


class Settings:
    """Flag > environment > config file > default lookup."""

    def __init__(self, args: argparse.Namespace, toml: dict, env: dict[str, str] | None = None):
        self.args = args
        self.toml = toml
        self.env = os.environ if env is None else env

    def get(self, section: str, key: str, flag: str | None = None) -> Any:
        value = getattr(self.args, flag or key, None)
        if value is not None:
            return value
        env_name = ENV.get((section, key))
        if env_name and self.env.get(env_name):
            return self.env[env_name]
        if key in self.toml.get(section, {}):
            return self.toml[section][key]
        return DEFAULTS.get(section, {}).get(key)

    def provider_settings(self) -> ProviderSettings:
        return ProviderSettings(
            self.get("provider", "endpoint"),
            self.get("provider", "api_key"),
            self.get("provider", "model"),
            self.get("provider", "embed_model"),
        )


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def threshold(text: str) -> float:
    value = float(text)
    if not -1.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"cosine threshold must lie in [-1, 1], got {value}")
    return value


def _corpus(path: str) -> Corpus:
    corpus = load_corpus_ref(path)
    if not corpus.files:
        raise EmptyCorpus(f"no parseable .java files under {path}")
    return corpus


def make_provider(settings: Settings, pairs: Sequence[PairedQuery] = ()) -> LlmProvider:
    args = settings.args
    if getattr(args, "replay", None):
        return ReplayProvider.from_file(args.replay)
    mock = getattr(args, "mock", None)
    if mock == "template":
        return TemplateNlProvider()
    if mock == "echo-gold":
        return EchoGoldProvider(pairs)
    if mock == "fault-inject":
        return FaultInjectProvider(pairs)
    return ChatCompletionProvider(settings.provider_settings())


def make_embedder(settings: Settings) -> Embedder:
    kind = settings.get("provider", "embedder")
    if kind == "hashing":
        return HashingEmbedder()
    if kind == "http":
        return HttpEmbedder(settings.provider_settings())
    raise CliError(f"unknown embedder {kind!r}")


def translate_options(settings: Settings, section: str) -> TranslateOptions:
    ablate = set()
    for item in getattr(settings.args, "ablate", None) or []:
        ablate.update(part.strip() for part in item.split(",") if part.strip())
    unknown = ablate - set(ABLATIONS)
    if unknown:
        raise CliError(f"unknown ablation(s): {', '.join(sorted(unknown))}; choose from {', '.join(ABLATIONS)}")
    no_refine = "no-refine" in ablate or getattr(settings.args, "no_refine", False)
    return TranslateOptions(
        k=int(settings.get(section, "k")),
        use_examples="no-examples" not in ablate,
        with_inline_comments="no-comments" not in ablate,
        with_api_docs="with-docs" in ablate,
        refine=not no_refine,
        max_rounds=int(settings.get(section, "rounds")),
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_index(settings: Settings) -> int:
    args = settings.args
    corpus = _corpus(args.corpus)
    out = Path(args.out)
    manifest = corpus.manifest()
    manifest["root"] = os.path.relpath(corpus.root.resolve(), out.resolve().parent)
    out.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    counts = Counter(c.ctype.value for c in corpus.constructs())
    print(f"{len(corpus.files)} files, {corpus.line_count} lines, sha256 {corpus.sha256[:16]}")
    for path, message in sorted(corpus.errors.items()):
        print(f"excluded {path}: {message}", file=sys.stderr)
    for ctype in ConstructType:
        if counts[ctype.value]:
            print(f"  {ctype.value:<20} {counts[ctype.value]:>6}")
    return EXIT_OK


def cmd_generate(settings: Settings) -> int:
    args = settings.args
    cfg = GenConfig(
        n_q=int(settings.get("generate", "n")),
        c_min=int(settings.get("generate", "cmin")),
        c_max=int(settings.get("generate", "cmax")),
        seed=int(settings.get("generate", "seed")),
        max_attempts=int(settings.get("generate", "max_attempts")),
    )
    corpus = _corpus(args.corpus)
    try:
        generated = enumerate_queries(corpus, cfg)
    except BudgetExhausted as exc:
        write_jsonl(exc.accepted, args.out)
        raise
    write_jsonl(generated, args.out)
    summary = format_distribution(type_distribution(generated))
    Path(str(args.out) + ".summary.txt").write_text(summary + "\n", encoding="utf-8")
    print(f"wrote {len(generated)} queries to {args.out}")
    print(summary)
    return EXIT_OK if generated else EXIT_EMPTY


def _relative_ref(ref: str, out: Path) -> str:
    """Corpus references in a benchmark resolve against the benchmark's directory."""
    if ref == BUNDLED or Path(ref).is_absolute():
        return ref
    return os.path.relpath(Path(ref).resolve(), out.resolve().parent)


def cmd_pair(settings: Settings) -> int:
    args = settings.args
    llm = make_provider(settings)
    out = Path(args.out)
    pairs = []
    with open(args.generated, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            q = compile_query(row["rule"])
            gold = sorted({(g["path"], int(g["start_line"])) for g in row["gold"]})
            target = query_target_type(q, ConstructType(row["target"]["type"]))
            pairs.append(PairedQuery(row["id"], row["rule"], pair_nl(q, llm), describe_query(q).text, gold, target))
    provenance = {"generated": str(args.generated), "pairing": getattr(llm, "name", "")}
    Benchmark(_relative_ref(args.corpus, out), pairs, "line", provenance).save(out)
    print(f"paired {len(pairs)} queries into {out}")
    return EXIT_OK if pairs else EXIT_EMPTY


def cmd_build_index(settings: Settings) -> int:
    args = settings.args
    pairs = Benchmark.load(args.pairs).queries
    if args.exclude:
        before = len(pairs)
        pairs = drop_overlapping(pairs, Benchmark.load(args.exclude).queries)
        print(f"dropped {before - len(pairs)} pairs overlapping {args.exclude}")
    index = build_index(pairs, make_embedder(settings))
    index.save(args.out)
    print(f"indexed {len(index)} examples (dim {index.dim}, {index.provider}) into {args.out}")
    return EXIT_OK


def _print_matches(matches, corpus: Corpus, as_json: bool) -> None:
    for m in matches:
        if as_json:
            print(json.dumps(m.to_json(), sort_keys=True))
        else:
            text = corpus.file(m.span.file_id).line(m.span.start_line).strip()
            print(f"{m.span.file_id}:{m.span.start_line}: {text}")


def cmd_search(settings: Settings) -> int:
    args = settings.args
    corpus = _corpus(args.corpus)
    if args.rule:
        q = compile_query(Path(args.rule).read_text(encoding="utf-8"))
    else:
        if not args.nl:
            raise CliError("give a natural-language query or --rule")
        if not args.index:
            raise CliError("--index is required for natural-language search")
        index = RagIndex.load(args.index)
        llm = make_provider(settings)
        try:
            q, trace = translate_and_refine(args.nl, index, llm, translate_options(settings, "search"))
        except TranslationFailed as exc:
            if exc.trace is not None:
                print(json.dumps(exc.trace.to_dict(), indent=2), file=sys.stderr)
            raise
        if args.verbose:
            print(json.dumps(trace.to_dict(), indent=2), file=sys.stderr)
    print(q.to_yaml(with_comments=False), file=sys.stderr)
    matches = execute(q, corpus)
    _print_matches(matches, corpus, args.json)
    return EXIT_OK if matches else EXIT_EMPTY


def cmd_eval(settings: Settings) -> int:
    args = settings.args
    bench = Benchmark.load(args.benchmark)
    if args.corpus:
        bench.with_corpus(_corpus(args.corpus))
    if args.subset:
        bench = bench.subset([q.id for q in bench.queries[: args.subset]])
    bench.validate()
    granularity = settings.get("eval", "granularity")
    reports = []
    if args.mode == "pipeline":
        index = RagIndex.load(args.index) if args.index else None
        llm = make_provider(settings, bench.queries)
        ablations = ",".join(args.ablate or [])
        label = f"NL-to-DSL [{ablations}]" if ablations else "NL-to-DSL"
        reports.append(run_pipeline_eval(bench, index, llm, translate_options(settings, "eval"), granularity, label))
    elif args.mode == "llm-direct":
        llm = make_provider(settings, bench.queries)
        cap = None if args.force else int(settings.get("eval", "max_calls"))
        try:
            reports.append(baseline_llm_direct(bench, llm, cap, granularity))
        except CallBudgetExceeded as exc:
            raise CliError(f"{exc}; narrow with --subset or pass --force") from exc
    else:
        thresholds = args.threshold or [float(t) for t in settings.get("eval", "thresholds")]
        for t in thresholds:
            threshold(str(t))
        reports.extend(vector_sweep(bench, make_embedder(settings), thresholds))
    table = format_table(reports)
    print(table)
    if args.out:
        out = Path(args.out)
        payload = [r.to_json() for r in reports]
        out.write_text(json.dumps(payload if len(payload) > 1 else payload[0], indent=2) + "\n", encoding="utf-8")
        out.with_suffix(".txt").write_text(table + "\n", encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _provider_flags(p: argparse.ArgumentParser, mocks: Sequence[str]) -> None:
    g = p.add_argument_group("provider")
    g.add_argument("--replay", metavar="PATH", help="answer from a recorded transcript fixture (offline)")
    if mocks:
        g.add_argument("--mock", choices=list(mocks), help="offline mock provider")
    g.add_argument("--endpoint", help="chat-completion base URL (env SCS_API_ENDPOINT)")
    g.add_argument("--api-key", dest="api_key", help="API key (env SCS_API_KEY)")
    g.add_argument("--model", help="model name (env SCS_MODEL)")


def _embedder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embedder", choices=["hashing", "http"], help="embedding provider (default: offline hashing)")
    p.add_argument("--embed-model", dest="embed_model", help="embedding model name (env SCS_EMBED_MODEL)")
    p.add_argument("--endpoint", help="embedding base URL (env SCS_API_ENDPOINT)")
    p.add_argument("--api-key", dest="api_key", help="API key (env SCS_API_KEY)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scs", description="Structural code search over Java sources.")
    parser.add_argument("--config", help="TOML config file (default: ./scs.toml if present)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only print warnings and errors from the library")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="parse a corpus and write its manifest")
    p.add_argument("--corpus", required=True, help=f"directory of .java files, manifest, or {BUNDLED}")
    p.add_argument("--out", default="corpus.json")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("generate", help="enumerate verified queries over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--cmin", type=positive_int)
    p.add_argument("--cmax", type=positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-attempts", dest="max_attempts", type=positive_int)
    p.add_argument("--out", required=True, help="JSON-lines output path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pair", help="pair generated queries with natural-language requests")
    p.add_argument("--generated", required=True, help="JSON-lines file from 'generate'")
    p.add_argument("--corpus", required=True, help="corpus reference stored in the benchmark")
    p.add_argument("--out", required=True, help="benchmark.json output path")
    _provider_flags(p, ["template"])
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("build-index", help="embed paired queries into a retrieval index")
    p.add_argument("--pairs", required=True, help="benchmark-format file with example pairs")
    p.add_argument("--exclude", help="benchmark whose queries must not appear among the examples")
    p.add_argument("--out", required=True)
    _embedder_flags(p)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("search", help="answer a natural-language query (or run a rule) over a corpus")
    p.add_argument("nl", nargs="?", help="natural-language query")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", help="retrieval index from 'build-index'")
    p.add_argument("--rule", help="run this rule file directly (no provider needed)")
    p.add_argument("--k", type=positive_int, help="retrieved examples (default 5)")
    p.add_argument("--rounds", type=int, help="refinement rounds (default 2)")
    p.add_argument("--no-refine", dest="no_refine", action="store_true")
    p.add_argument("--json", action="store_true", help="JSON lines instead of grep-style output")
    p.add_argument("-v", "--verbose", action="store_true", help="print the translation trace")
    _provider_flags(p, [])
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="score the pipeline or a baseline on a benchmark")
    p.add_argument("--benchmark", required=True)
    p.add_argument("--mode", choices=["pipeline", "llm-direct", "vector"], required=True)
    p.add_argument("--corpus", help="override the benchmark's corpus reference")
    p.add_argument("--index", help="retrieval index (pipeline mode)")
    p.add_argument("--granularity", choices=list(("line", "method")))
    p.add_argument("--threshold", type=threshold, nargs="+", help="cosine thresholds (vector mode)")
    p.add_argument("--ablate", action="append", metavar="LIST", help=f"comma list from: {', '.join(ABLATIONS)}")
    p.add_argument("--k", type=positive_int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--subset", type=positive_int, help="evaluate only the first N queries")
    p.add_argument("--max-calls", dest="max_calls", type=positive_int, help="cap on queries x files for llm-direct")
    p.add_argument("--force", action="store_true", help="lift the llm-direct call cap")
    p.add_argument("--out", help="report JSON path (a .txt table is written alongside)")
    _provider_flags(p, ["echo-gold", "fault-inject"])
    p.add_argument("--embedder", choices=["hashing", "http"])
    p.add_argument("--embed-model", dest="embed_model")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        settings = Settings(args, load_toml(args.config))
        return args.func(settings)
    except (
        CliError,
        EmptyCorpus,
        BudgetExhausted,
        TranslationFailed,
        NlBridgeError,
        ProviderError,
        RuleError,
        PatternParseError,
        ValueError,
        OSError,
        KeyError,
    ) as exc:
        print(f"scs: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
