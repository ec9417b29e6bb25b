# Enumerating verified queries from a corpus
#
# The generator samples a code construct, turns its enclosing statement into
# a concrete pattern, then specializes (wraps it in a pattern-inside ancestor)
# and generalizes (swaps nodes for metavariables or ellipses). Each edit is
# kept only if the rule still matches the sampled construct.

from structsearch import GenConfig, enumerate_queries, load_bundled_corpus
from structsearch.generation import frequency_ratio, type_distribution, format_distribution

corpus = load_bundled_corpus()
print(f"Bundled corpus: {len(corpus.files)} files, {len(corpus.constructs())} constructs")

generated = enumerate_queries(corpus, GenConfig(n_q=12, c_min=1, c_max=5, seed=3))
for g in generated[:4]:
    print(f"\n--- {g.query.id}: target {g.target.ctype.value}, complexity {g.complexity}, "
          f"{len(g.gold_matches)} gold match(es)")
    print(g.query.to_yaml(with_comments=False).rstrip())

# The biased sampler down-weights construct types already common in the set.
for biased in (True, False):
    accepted = enumerate_queries(corpus, GenConfig(n_q=100, seed=0, biased=biased))
    dist = type_distribution(accepted)
    label = "biased" if biased else "uniform"
    print(f"\n{label} sampler, max/min target-type ratio = {frequency_ratio(dist['targets']):.1f}")
    print(format_distribution(dist))
