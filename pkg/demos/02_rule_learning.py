"""Walkthrough: inducing rules from a handful of labeled records.

The learner grows one clause at a time by information gain, prunes
candidate literals by a TF-IDF-style significance weight, prefers
object-type literals, and supports numeric thresholds discovered at
midpoints of observed values.

Run:  python3 demos/02_rule_learning.py
"""

from rapid import LearnConfig, learn_ruleset, print_rule
from rapid.learn import init_candidates
from rapid.synth import generate_synthetic, glaucoma_task, traffic_task

# A two-label medical-style task: one anatomical structure, one area ratio,
# classes split at 0.31.
dataset, gold = generate_synthetic(glaucoma_task(seed=7, pool_size=24))
print("gold rules:")
for rule in gold.gold_rules:
    print("  " + print_rule(rule))

rules = learn_ruleset(dataset.records, dataset.labels, vocab=dataset.vocabulary)
print("\nlearned from", len(dataset.records), "records:")
for rule in rules:
    print("  " + print_rule(rule))

# Peek at the candidate pool the clause search draws from.
positives = [r for r in dataset.records if r.label == "normal"]
cands = init_candidates(positives, list(dataset.records), dataset.vocabulary, LearnConfig())
print("\ntop candidate literals for 'normal' (significance-ordered):")
for c in cands[:6]:
    print(f"  sig={c.sig:.3f}  [{c.source}]  {c}")

# A three-label scene task mixing object existence, absences, and a count
# threshold; the learner recovers the planted structure.
dataset2, gold2 = generate_synthetic(traffic_task(seed=7, pool_size=60))
rules2 = learn_ruleset(dataset2.records, dataset2.labels, vocab=dataset2.vocabulary)
print("\nscene task, learned:")
for rule in rules2:
    print("  " + print_rule(rule))
