"""Experiment harness: the labeling loop, its driver, and metrics reporting.

``LabelingLoop`` owns one session of the iterative protocol (bootstrap
learn, batch selection, corrections, rule edits, relearn). The in-process
driver steers it with the simulated oracle; the HTTP service steers the
same class with client requests, so both produce identical metric series
under identical configuration.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .data import AttributeRecord, Dataset, PredicateVocabulary, parse_dataset
from .dsl import Rule, RuleSet, clause_key, print_ruleset
from .evaluate import assign_label, clause_satisfied, rule_satisfied
from .learn import FeedbackConstraints, LearnConfig, LearnError, learn_ruleset
from .oracle import GoldSpec, apply_edit, correct_labels, edit_rule
from .select import SelectionBatch, SelectionConfig, select_batch

MODES = ("full", "no-edit", "no-al", "no-feedback")


class HarnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Optional[str] = None  # path to dataset.jsonl
    gold_rules: Optional[str] = None  # path to gold_rules.dsl
    vocabulary: Optional[str] = None  # path to vocabulary.json
    bootstrap_size: int = 3
    batch_size: int = 3
    max_iterations: int = 20
    feedback_mode: str = "full"
    strategy: Optional[str] = None  # None means the default multi-criteria
    test_fraction: float = 0.4
    seeds: tuple[int, ...] = (0,)
    learn: LearnConfig = field(default_factory=LearnConfig)
    selection_lambda: float = 0.6
    m_intermediate: Optional[int] = None
    bootstrap_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.feedback_mode not in MODES:
            raise ValueError(f"unknown feedback mode {self.feedback_mode!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.bootstrap_size < 1:
            raise ValueError("bootstrap_size must be >= 1")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in [0,1)")
        if self.feedback_mode == "no-feedback" and self.strategy is not None:
            raise ValueError("no-feedback mode performs no selection; do not set a strategy")

    @property
    def effective_strategy(self) -> str:
        return self.strategy or "multi-criteria"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        learn_raw = raw.pop("learn", {})
        learn = LearnConfig(
            theta=learn_raw.get("theta", 0.05),
            phi=learn_raw.get("phi", 2),
            max_clause_len=learn_raw.get("max_clause_len", 6),
            max_clauses=learn_raw.get("max_clauses", 16),
            theta_overrides=learn_raw.get("theta_overrides", {}),
        )
        selection = raw.pop("selection", {})
        return cls(
            dataset=raw.get("dataset"),
            gold_rules=raw.get("gold_rules"),
            vocabulary=raw.get("vocabulary"),
            bootstrap_size=raw.get("bootstrap_size", 3),
            batch_size=raw.get("batch_size", 3),
            max_iterations=raw.get("max_iterations", 20),
            feedback_mode=raw.get("feedback_mode", "full"),
            strategy=raw.get("strategy"),
            test_fraction=raw.get("test_fraction", 0.4),
            seeds=tuple(raw.get("seeds", [0])),
            learn=learn,
            selection_lambda=selection.get("lambda", 0.6),
            m_intermediate=selection.get("m_intermediate"),
            bootstrap_ids=tuple(raw.get("bootstrap_ids", [])),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset": self.dataset,
                "gold_rules": self.gold_rules,
                "vocabulary": self.vocabulary,
                "bootstrap_size": self.bootstrap_size,
                "batch_size": self.batch_size,
                "max_iterations": self.max_iterations,
                "feedback_mode": self.feedback_mode,
                "strategy": self.strategy,
                "test_fraction": self.test_fraction,
                "seeds": list(self.seeds),
                "learn": {
                    "theta": self.learn.theta,
                    "phi": self.learn.phi,
                    "max_clause_len": self.learn.max_clause_len,
                    "max_clauses": self.learn.max_clauses,
                    "theta_overrides": dict(self.learn.theta_overrides),
                },
                "selection": {
                    "lambda": self.selection_lambda,
                    "m_intermediate": self.m_intermediate,
                },
                "bootstrap_ids": list(self.bootstrap_ids),
            },
            indent=2,
            sort_keys=True,
        )


@dataclass(frozen=True)
class IterationMetrics:
    iteration: int
    test_accuracy: Optional[float]
    pool_accuracy: Optional[float]
    hit_rate: float
    labeled_size: int
    n_clauses: int
    avg_clauses_per_rule: float
    n_predicates: int
    avg_predicates_per_clause: float
    training_consistency: bool

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "test_accuracy": self.test_accuracy,
            "pool_accuracy": self.pool_accuracy,
            "hit_rate": self.hit_rate,
            "labeled_size": self.labeled_size,
            "n_clauses": self.n_clauses,
            "avg_clauses_per_rule": self.avg_clauses_per_rule,
            "n_predicates": self.n_predicates,
            "avg_predicates_per_clause": self.avg_predicates_per_clause,
            "training_consistency": self.training_consistency,
        }


def rule_stats(rules: RuleSet) -> tuple[int, float, int, float]:
    n_clauses = sum(len(r.clauses) for r in rules)
    n_preds = sum(len(c.atoms) for r in rules for c in r.clauses)
    avg_c = n_clauses / len(rules) if len(rules) else 0.0
    avg_p = n_preds / n_clauses if n_clauses else 0.0
    return n_clauses, avg_c, n_preds, avg_p


def accuracy_of(decisions: Mapping[str, str], gold_labels: Mapping[str, str]) -> float:
    if not decisions:
        raise HarnessError("empty test split")
    hits = sum(1 for rid, lab in decisions.items() if gold_labels.get(rid) == lab)
    return hits / len(decisions)


def hit_rate_of(
    batch_ids: Sequence[str],
    decisions: Mapping[str, str],
    gold_labels: Mapping[str, str],
) -> float:
    if not batch_ids:
        return 0.0
    wrong = sum(1 for rid in batch_ids if decisions[rid] != gold_labels[rid])
    return wrong / len(batch_ids)


def compute_metrics(
    test_decisions: Mapping[str, str],
    gold_labels: Mapping[str, str],
    batch_ids: Sequence[str] = (),
    batch_decisions: Optional[Mapping[str, str]] = None,
) -> dict:
    """Accuracy over the test decisions and pre-correction hit rate of the batch."""
    return {
        "accuracy": accuracy_of(test_decisions, gold_labels),
        "hit_rate": hit_rate_of(batch_ids, batch_decisions or test_decisions, gold_labels),
    }


class LabelingLoop:
    """One session of the iterative labeling protocol."""

    def __init__(self, dataset: Dataset, config: ExperimentConfig, seed: int):
        self.dataset = dataset
        self.config = config
        self.seed = int(seed)
        self.vocab = dataset.vocabulary
        self.labels = dataset.labels
        if len(self.labels) < 2:
            raise HarnessError("dataset must carry at least two labels")
        self.dims = dataset.object_sorts or ("_none",)
        rng = np.random.default_rng(self.seed)

        labeled_universe = [r for r in dataset.records if r.label is not None]
        extra_unlabeled = [r for r in dataset.records if r.label is None]
        self.gold_labels = {r.id: r.label for r in labeled_universe}

        n_test = int(round(config.test_fraction * len(labeled_universe)))
        perm = rng.permutation(len(labeled_universe))
        self.test_records = [labeled_universe[i] for i in perm[:n_test]]
        pool = [labeled_universe[i] for i in perm[n_test:]]

        boot = self._bootstrap(pool, rng)
        boot_ids = {r.id for r in boot}
        self.labeled: list[AttributeRecord] = list(boot)
        self.unlabeled: list[AttributeRecord] = [
            r.with_label(None) for r in pool if r.id not in boot_ids
        ] + [r for r in extra_unlabeled]

        self.constraints = FeedbackConstraints()
        self.iteration = 0
        self.terminal = False
        self.ready = False
        self.pending: Optional[SelectionBatch] = None
        self.pending_decisions: dict[str, str] = {}
        self._staged: dict[str, str] = {}
        self.rules = learn_ruleset(
            self.labeled, self.labels, self.constraints, config.learn, self.vocab
        )
        self.metrics: list[IterationMetrics] = [self._measure(hit_rate=0.0)]
        if self._selects():
            self._select_next()

    # -- setup helpers --

    def _bootstrap(self, pool, rng) -> list[AttributeRecord]:
        cfg = self.config
        if cfg.bootstrap_ids:
            by_id = {r.id: r for r in pool}
            missing = [i for i in cfg.bootstrap_ids if i not in by_id]
            if missing:
                raise HarnessError(f"bootstrap ids not in the training pool: {missing}")
            return [by_id[i] for i in cfg.bootstrap_ids]
        if not any(r.label is not None for r in pool):
            raise HarnessError("no labeled records to bootstrap from")
        chosen: list[AttributeRecord] = []
        taken: set[str] = set()
        by_label: dict[str, list[AttributeRecord]] = {l: [] for l in self.labels}
        for r in pool:
            if r.label in by_label:
                by_label[r.label].append(r)
        # One record per label first (sampling a label-free bootstrap would
        # make one-vs-rest learning impossible), then uniform fill.
        for label in self.labels:
            if len(chosen) >= cfg.bootstrap_size:
                break
            group = by_label[label]
            if not group:
                continue
            pick = group[int(rng.integers(len(group)))]
            chosen.append(pick)
            taken.add(pick.id)
        rest = [r for r in pool if r.id not in taken]
        while len(chosen) < cfg.bootstrap_size and rest:
            pick = rest.pop(int(rng.integers(len(rest))))
            chosen.append(pick)
        if len(chosen) < cfg.bootstrap_size:
            raise HarnessError("pool smaller than bootstrap_size")
        return chosen

    def _selects(self) -> bool:
        return self.config.feedback_mode in ("full", "no-edit")

    def _selection_config(self) -> SelectionConfig:
        return SelectionConfig(
            lam=self.config.selection_lambda,
            m_intermediate=self.config.m_intermediate,
            n_batch=self.config.batch_size,
            strategy=self.config.effective_strategy,
            seed=(self.seed * 1_000_003 + self.iteration + 1) % (2**31),
        )

    def _select_next(self) -> None:
        if len(self.unlabeled) < self.config.batch_size:
            self.terminal = True
            self.pending = None
            self.pending_decisions = {}
            return
        self.pending = select_batch(
            self.unlabeled, self.rules, self._selection_config(), self.dims, self.vocab
        )
        by_id = {r.id: r for r in self.unlabeled}
        self.pending_decisions = {
            rid: assign_label(by_id[rid], self.rules, self.vocab)
            for rid in self.pending.ids
        }

    # -- session operations --

    def apply_corrections(self, corrections: Mapping[str, str]) -> None:
        if self.pending is None:
            raise HarnessError("no pending batch")
        batch_ids = set(self.pending.ids)
        for rid, label in corrections.items():
            if rid not in batch_ids:
                raise HarnessError(f"record {rid!r} is not in the pending batch")
            if label not in self.labels:
                raise HarnessError(f"unknown label {label!r}")
        self._staged = {
            rid: corrections.get(rid, self.pending_decisions[rid].assigned)
            for rid in self.pending.ids
        }
        self.ready = True

    def apply_rule_edit(self, new_rule: Rule) -> None:
        if new_rule.label not in self.labels:
            raise HarnessError(f"unknown label {new_rule.label!r}")
        old = self.rules.get(new_rule.label)
        old_keys = {clause_key(c) for c in old.clauses}
        new_keys = {clause_key(c) for c in new_rule.clauses}
        for c in new_rule.clauses:
            if clause_key(c) not in old_keys:
                self.constraints = self.constraints.with_include(new_rule.label, c)
        for c in old.clauses:
            if clause_key(c) not in new_keys:
                self.constraints = self.constraints.with_exclude(new_rule.label, c)
        self.rules = self.rules.with_rule(new_rule)

    def advance(self) -> IterationMetrics:
        mode = self.config.feedback_mode
        if mode == "no-feedback":
            raise HarnessError("no-feedback mode has no iterations")
        if self.iteration >= self.config.max_iterations:
            raise HarnessError("max_iterations reached")
        hit_rate = 0.0
        if self._selects():
            if self.terminal:
                raise HarnessError("pool exhausted; session is terminal")
            if not self.ready:
                raise HarnessError("corrections pending: submit (possibly empty) corrections first")
            batch_ids = list(self.pending.ids)
            wrong = sum(
                1
                for rid in batch_ids
                if self._staged[rid] != self.pending_decisions[rid].assigned
            )
            hit_rate = wrong / len(batch_ids)
            by_id = {r.id: r for r in self.unlabeled}
            new_labeled = self.labeled + [
                by_id[rid].with_label(self._staged[rid]) for rid in batch_ids
            ]
            new_rules = learn_ruleset(
                new_labeled, self.labels, self.constraints, self.config.learn, self.vocab
            )
            moved = set(batch_ids)
            self.labeled = new_labeled
            self.unlabeled = [r for r in self.unlabeled if r.id not in moved]
            self.rules = new_rules
        # no-al mode relies on the edits already applied via apply_rule_edit.
        self.iteration += 1
        self.ready = False
        self._staged = {}
        m = self._measure(hit_rate=hit_rate)
        self.metrics.append(m)
        if self._selects():
            self._select_next()
        return m

    # -- measurement --

    def _measure(self, hit_rate: float) -> IterationMetrics:
        test_acc = None
        if self.test_records:
            decisions = {
                r.id: assign_label(r, self.rules, self.vocab).assigned
                for r in self.test_records
            }
            test_acc = accuracy_of(decisions, self.gold_labels)
        pool_records = [r for r in self.labeled if r.id in self.gold_labels] + [
            r for r in self.unlabeled if r.id in self.gold_labels
        ]
        pool_acc = None
        if pool_records:
            pool_decisions = {
                r.id: assign_label(r, self.rules, self.vocab).assigned
                for r in pool_records
            }
            pool_acc = accuracy_of(pool_decisions, self.gold_labels)
        n_clauses, avg_c, n_preds, avg_p = rule_stats(self.rules)
        return IterationMetrics(
            iteration=self.iteration,
            test_accuracy=test_acc,
            pool_accuracy=pool_acc,
            hit_rate=hit_rate,
            labeled_size=len(self.labeled),
            n_clauses=n_clauses,
            avg_clauses_per_rule=avg_c,
            n_predicates=n_preds,
            avg_predicates_per_clause=avg_p,
            training_consistency=self._training_consistent(),
        )

    def _training_consistent(self) -> bool:
        include_keys = {
            label: {clause_key(c) for c in self.constraints.includes_for(label)}
            for label in self.labels
        }
        for r in self.labeled:
            if not rule_satisfied(r, self.rules.get(r.label), self.vocab):
                return False
            for label in self.labels:
                if label == r.label:
                    continue
                for c in self.rules.get(label).clauses:
                    if clause_key(c) in include_keys[label]:
                        continue
                    if clause_satisfied(r, c, self.vocab):
                        return False
        return True


def run_loop(
    dataset: Dataset,
    gold: GoldSpec,
    config: ExperimentConfig,
    seed: int,
) -> tuple[list[IterationMetrics], RuleSet]:
    """Drive a loop with the simulated oracle: fix the selected batch's
    labels and make at most one gold-guided clause edit per iteration."""
    try:
        loop = LabelingLoop(dataset, config, seed)
    except LearnError as exc:
        raise HarnessError(f"bootstrap learning failed: {exc}") from exc
    mode = config.feedback_mode
    if mode == "no-feedback":
        return loop.metrics, loop.rules
    for iteration in range(1, config.max_iterations + 1):
        if mode in ("full", "no-edit"):
            if loop.terminal:
                break
            assigned = {rid: d.assigned for rid, d in loop.pending_decisions.items()}
            corrections, _ = correct_labels(loop.pending, assigned, gold)
            loop.apply_corrections(corrections)
        if mode in ("full", "no-al"):
            edit = edit_rule(loop.rules, gold)
            if edit is not None:
                edited = apply_edit(loop.rules, edit).get(edit.label)
                loop.apply_rule_edit(edited)
        try:
            loop.advance()
        except LearnError as exc:
            raise HarnessError(f"iteration {iteration}: learning failed: {exc}") from exc
    return loop.metrics, loop.rules


def load_inputs(config: ExperimentConfig) -> tuple[Dataset, GoldSpec]:
    if config.dataset is None:
        raise HarnessError("config has no dataset path")
    vocab = None
    if config.vocabulary:
        vocab = PredicateVocabulary.from_json(Path(config.vocabulary).read_text())
    dataset = parse_dataset(Path(config.dataset).read_text(), vocab)
    if config.gold_rules is None:
        raise HarnessError("config has no gold rules path")
    gold = GoldSpec.from_text(Path(config.gold_rules).read_text(), dataset)
    return dataset, gold


def run_experiment(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> tuple[list[IterationMetrics], RuleSet]:
    """Load the configured task, run one seeded loop, optionally write reports."""
    dataset, gold = load_inputs(config)
    use_seed = config.seeds[0] if seed is None else seed
    metrics, rules = run_loop(dataset, gold, config, use_seed)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.jsonl").write_text(metrics_jsonl(metrics))
        (out / "summary.csv").write_text(metrics_csv(metrics))
        (out / "rules.dsl").write_text(print_ruleset(rules) + "\n")
    return metrics, rules


def metrics_jsonl(metrics: Sequence[IterationMetrics]) -> str:
    return "\n".join(json.dumps(m.to_dict(), sort_keys=True) for m in metrics) + "\n"


_CSV_FIELDS = [
    "iteration",
    "test_accuracy",
    "pool_accuracy",
    "hit_rate",
    "labeled_size",
    "n_clauses",
    "avg_clauses_per_rule",
    "n_predicates",
    "avg_predicates_per_clause",
    "training_consistency",
]


def metrics_csv(metrics: Sequence[IterationMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for m in metrics:
        writer.writerow(m.to_dict())
    return buf.getvalue()
