"""Walkthrough: conflict-based informativeness and diversity-aware batches.

A record scores 0 when exactly one rule fires (nothing to learn from it);
otherwise its score grows with the number of firing rules and with how far
the silent rules are from firing. The top scorers are clustered on
object-count vectors and one medoid per cluster forms the batch.

Run:  python3 demos/03_active_selection.py
"""

from rapid import SelectionConfig, featurize, informativeness, learn_ruleset, select_batch
from rapid.synth import generate_synthetic, traffic_selection_task

dataset, gold = generate_synthetic(traffic_selection_task(seed=3, pool_size=60))

# Bootstrap rules from three records only: plenty of conflicts remain.
bootstrap = [
    next(r for r in dataset.records if r.label == label) for label in dataset.labels
]
rules = learn_ruleset(bootstrap, dataset.labels, vocab=dataset.vocabulary)
print("bootstrap rules:")
for rule in rules:
    print("  " + str(rule))

pool = [r.with_label(None) for r in dataset.records if r.id not in {b.id for b in bootstrap}]
scored = sorted(
    (informativeness(r, rules, 0.6, dataset.vocabulary) for r in pool),
    key=lambda s: (-s.score, s.record_id),
)
print("\nmost informative records:")
for s in scored[:5]:
    print(f"  {s.record_id}: score={s.score:.2f}  rules_fired={s.n_labels}  u={s.u:.2f}")
print("least informative (exactly one rule fires -> score 0):")
for s in scored[-3:]:
    print(f"  {s.record_id}: score={s.score:.2f}  rules_fired={s.n_labels}")

print("\nfeature vectors cluster scenes by object counts, e.g.")
dims = dataset.object_sorts
example = pool[0]
fv = featurize(example, dims)
nonzero = {d: c for d, c in zip(fv.dims, fv.counts) if c}
print(f"  {example.id}: {nonzero}")

for strategy in ("multi-criteria", "informativeness-only", "diversity-only", "random"):
    cfg = SelectionConfig(n_batch=3, strategy=strategy, seed=5)
    batch = select_batch(pool, rules, cfg, dims, dataset.vocabulary)
    print(f"\n{strategy}: {list(batch.ids)}")
    for rid in batch.ids:
        s = batch.scored[rid]
        print(f"   {rid}: score={s.score:.2f} (true label: {gold.gold_labels[rid]})")
