# Matching a structural rule against Java source
#
# A rule is a small YAML document: an anchor pattern plus optional
# pattern-inside / pattern-not filters. Metavariables ($X) bind any
# expression; `...` stands for any run of arguments or statements.

from structsearch import Corpus, compile_query, describe_query, execute

source = """class Report {
    String render(int limit, int number) {
        String a = "";
        for (int i = 0; i < limit; i++) {
            a += Integer.toString(number);
        }
        a += Integer.toString(limit);
        return a;
    }
}
"""

rule = """rules:
  - id: tostring-append-in-for
    patterns:
      - pattern: $X += Integer.toString(...);
      - pattern-inside: |
          for (...) { ... }
"""

corpus = Corpus.from_sources({"Report.java": source})
q = compile_query(rule)

print("Rule structure:")
print(describe_query(q).text)

print("\nMatches (only the append inside the loop should appear):")
for m in execute(q, corpus):
    print(f"  {m.path}:{m.span.start_line}: {m.anchor_node.text}")
    for name, node in m.bindings.items():
        print(f"    {name} = {node.text}")

# Dropping the pattern-inside filter picks up both appends.
loose = compile_query(rule.replace("      - pattern-inside: |\n          for (...) { ... }\n", ""))
print("\nWithout pattern-inside:", [m.span.start_line for m in execute(loose, corpus)])
