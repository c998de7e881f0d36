"""Walkthrough: symbolic records, the rule language, and how labeling works.

Run:  python3 demos/01_rules_and_evaluation.py
"""

from rapid import (
    PredicateVocabulary,
    assign_label,
    clause_csr,
    parse_dataset,
    parse_rule,
    parse_ruleset,
    print_rule,
    rule_csr,
)

# Records are pre-extracted scene descriptions: which objects appear, plus
# per-sort numeric attributes like counts and areas. No pixels anywhere.
DATA = """\
{"id":"scene1","facts":[["object","truck#1"],["object","truck#2"],["object","road"]],"num":{"truck":7}}
{"id":"scene2","facts":[["object","person"],["object","building"],["object","road"]]}
{"id":"scene3","facts":[["object","road"],["object","car"]]}
"""

vocab = PredicateVocabulary.base().with_aliases({"people": "person"})
dataset = parse_dataset(DATA, vocab)
print("records:")
for r in dataset.records:
    print(f"  {r.id}: " + ", ".join(sorted(str(a) for a in r.facts)))

# A rule is a disjunction of conjunctive clauses. This one fires on truck
# convoys or on scenes with no pedestrians at all.
rule = parse_rule(
    "highway(X) :- truck(X,A), num(A,N), greater(N,5) ; !people(X,B), object(X,road).",
    dataset.vocabulary,
)
print("\nrule:", print_rule(rule))

print("\nclause satisfaction ratios (fraction of atoms the best binding satisfies):")
for r in dataset.records:
    per_clause = [clause_csr(r, c, dataset.vocabulary) for c in rule.clauses]
    print(f"  {r.id}: clauses={per_clause}  rule={rule_csr(r, rule, dataset.vocabulary)}")

# With one rule per label, a record takes the uniquely satisfied label, or
# the one whose rule comes closest when zero or several fire.
rules = parse_ruleset(
    "\n".join(
        [
            "highway(X) :- truck(X,A), num(A,N), greater(N,5) ; !people(X,B), object(X,road).",
            "downtown(X) :- object(X,building).",
        ]
    ),
    dataset.vocabulary,
)
print("\nlabel decisions:")
for r in dataset.records:
    d = assign_label(r, rules, dataset.vocabulary)
    print(
        f"  {r.id}: {d.assigned}  satisfied={list(d.satisfied_labels)}"
        f"  csr={ {k: round(v, 2) for k, v in d.per_rule_csr.items()} }"
        f"  tie_broken={d.tie_broken}"
    )
