# Evaluating NL-to-rule translation without a network model
#
# A benchmark pairs generated rules with descriptions. The template mock
# writes those descriptions; the echo-gold mock "translates" by returning the
# gold rule, and the fault-inject mock answers wrong first so refinement has
# something to fix. Baselines: vector search over method chunks and asking
# the model for line numbers directly.

from structsearch import GenConfig, HashingEmbedder, TranslateOptions, build_benchmark, build_index
from structsearch import baseline_llm_direct, enumerate_queries, format_table, load_bundled_corpus
from structsearch import run_pipeline_eval, vector_sweep
from structsearch.mocks import EchoGoldProvider, FaultInjectProvider, TemplateNlProvider
from structsearch.nl import drop_overlapping, pair_generated
from structsearch.providers import CountingProvider

corpus = load_bundled_corpus()
bench = build_benchmark(corpus, GenConfig(n_q=20, seed=11), TemplateNlProvider())
print(f"Benchmark: {len(bench.queries)} queries")
print("  e.g.", bench.queries[0].nl)

# Retrieval examples come from a separate generation run, minus anything
# that overlaps the benchmark.
train = drop_overlapping(pair_generated(enumerate_queries(corpus, GenConfig(n_q=60, seed=12)), TemplateNlProvider()), bench.queries)
index = build_index(train, HashingEmbedder())
print(f"Retrieval index: {len(train)} examples")

echo = run_pipeline_eval(bench, index, CountingProvider(EchoGoldProvider(bench.queries)), label="echo-gold")
fault = FaultInjectProvider(bench.queries)
refined = run_pipeline_eval(bench, index, fault, TranslateOptions(refine=True), label="fault-inject, refined")
unrefined = run_pipeline_eval(bench, index, fault, TranslateOptions(refine=False), label="fault-inject, no-refine")
direct = baseline_llm_direct(bench, EchoGoldProvider(bench.queries))
vectors = vector_sweep(bench, HashingEmbedder(), [0.25, 0.5, 0.75])

print()
print(format_table([echo, refined, unrefined, *vectors]))
print(f"\nPrompt tokens: pipeline {echo.prompt_tokens}, llm-direct {direct.prompt_tokens} "
      f"({direct.prompt_tokens / echo.prompt_tokens:.0f}x)")
