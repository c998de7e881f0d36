"""Automated stand-in for the domain expert.

Given planted ground truth (gold rules and labels), it fixes wrong labels
in a selected batch and performs at most one gold-guided clause edit per
iteration, mirroring an incrementally editing human.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .data import AttributeRecord, Dataset, PredicateVocabulary
from .dsl import (
    Clause,
    Rule,
    RuleSet,
    clauses_equal,
    first_inconsistent_clause,
    parse_ruleset,
)
from .evaluate import rule_satisfied
from .learn import FeedbackConstraints
from .select import SelectionBatch


@dataclass(frozen=True)
class GoldSpec:
    """Planted ground truth: curated rules plus the true label of every record."""

    gold_rules: RuleSet
    gold_labels: Mapping[str, str]

    @classmethod
    def from_text(cls, rules_text: str, dataset: Dataset) -> "GoldSpec":
        rules = parse_ruleset(rules_text, dataset.vocabulary)
        labels = {r.id: r.label for r in dataset.records if r.label is not None}
        return cls(gold_rules=rules, gold_labels=labels)

    def audit(
        self, records: Sequence[AttributeRecord], vocab: Optional[PredicateVocabulary] = None
    ) -> float:
        """Fraction of labeled records satisfying their own gold rule."""
        labeled = [r for r in records if r.id in self.gold_labels]
        if not labeled:
            return 1.0
        ok = sum(
            1
            for r in labeled
            if rule_satisfied(r, self.gold_rules.get(self.gold_labels[r.id]), vocab)
        )
        return ok / len(labeled)


@dataclass(frozen=True)
class RuleEdit:
    """Single-clause replacement (or append, when ``replaced`` is None)."""

    label: str
    clause_index: int
    new_clause: Clause
    replaced: Optional[Clause] = None


def correct_labels(
    batch: SelectionBatch,
    decisions: Mapping[str, str],
    gold: GoldSpec,
) -> tuple[dict[str, str], dict[str, bool]]:
    """Gold label for every batch record; the hit flag marks records whose
    inferred label was wrong (and hence worth selecting)."""
    corrections: dict[str, str] = {}
    hits: dict[str, bool] = {}
    for rid in batch.ids:
        if rid not in gold.gold_labels:
            raise KeyError(f"no gold label for record {rid!r}")
        if rid not in decisions:
            raise KeyError(f"no decision for record {rid!r}")
        truth = gold.gold_labels[rid]
        corrections[rid] = truth
        hits[rid] = decisions[rid] != truth
    return corrections, hits


def edit_rule(current: RuleSet, gold: GoldSpec) -> Optional[RuleEdit]:
    """First inconsistent clause across labels in rule-set order; None when
    every rule already matches its gold counterpart."""
    missing = [l for l in current.labels if l not in gold.gold_rules.rules]
    if missing:
        raise ValueError(f"labels {missing} have no gold rule")
    for label in current.labels:
        diff = first_inconsistent_clause(current.get(label), gold.gold_rules.get(label))
        if diff is None:
            continue
        index, gold_clause = diff
        replaced = (
            current.get(label).clauses[index]
            if index < len(current.get(label).clauses)
            else None
        )
        return RuleEdit(
            label=label, clause_index=index, new_clause=gold_clause, replaced=replaced
        )
    return None


def apply_edit(rules: RuleSet, edit: RuleEdit) -> RuleSet:
    rule = rules.get(edit.label)
    clauses = list(rule.clauses)
    if edit.clause_index < len(clauses):
        clauses[edit.clause_index] = edit.new_clause
    else:
        clauses.append(edit.new_clause)
    return rules.with_rule(Rule(label=edit.label, clauses=tuple(clauses)))


def constraints_from_edit(
    constraints: FeedbackConstraints, edit: RuleEdit
) -> FeedbackConstraints:
    """Translate an edit into learner constraints: the edited clause must be
    kept, the clause it displaced must not come back."""
    out = constraints.with_include(edit.label, edit.new_clause)
    if edit.replaced is not None:
        out = out.with_exclude(edit.label, edit.replaced)
    return out


def count_clause_differences(current: RuleSet, gold: RuleSet) -> int:
    """Edits needed to reach gold with learning frozen: positional clause
    mismatches plus clauses gold has and current lacks."""
    total = 0
    for label in current.labels:
        cur, gd = current.get(label), gold.get(label)
        shared = min(len(cur.clauses), len(gd.clauses))
        total += sum(
            0 if clauses_equal(cur.clauses[i], gd.clauses[i]) else 1 for i in range(shared)
        )
        total += max(0, len(gd.clauses) - len(cur.clauses))
    return total
