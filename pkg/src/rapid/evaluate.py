"""Ground-truth-free rule evaluation.

Satisfaction is closed-world: a positive atom holds when some fact matches
it, a negated atom when no binding of its remaining variables does. A
clause's satisfaction ratio is the best fraction of its atoms any single
variable binding can satisfy; a rule takes the max over its clauses, and a
record is assigned the label whose rule scores highest (exact satisfaction
first, ratio as the conflict tie-breaker).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from .data import (
    KIND_IMAGE,
    KIND_NUMERIC,
    KIND_OBJECT,
    KIND_SYMBOL,
    AttributeRecord,
    PredicateAtom,
    PredicateVocabulary,
    Term,
    Var,
    is_variable,
    sort_of,
)
from .dsl import Clause, Rule, RuleSet

# Sentinel binding value: "bound outside the record's universe".
UNMATCHED = object()


@dataclass(frozen=True)
class LabelDecision:
    """Outcome of labeling one record against a rule set."""

    record_id: str
    assigned: str
    satisfied_labels: tuple[str, ...]
    per_rule_csr: Mapping[str, float]
    tie_broken: bool = False


class _Index:
    """Per-record lookup structures shared across atom evaluations."""

    def __init__(self, record: AttributeRecord, vocab: Optional[PredicateVocabulary]):
        self.record = record
        self.vocab = vocab
        self.facts_by_name: dict[str, list[tuple[Term, ...]]] = {}
        numeric_values: set[float] = set()
        symbols: set[str] = set()
        for atom in record.facts:
            self.facts_by_name.setdefault(atom.name, []).append(atom.args)
            for t in atom.args:
                if isinstance(t, float):
                    numeric_values.add(t)
                elif isinstance(t, str):
                    symbols.add(t)
        instances: dict[str, list[str]] = {}
        for inst in record.object_instances():
            instances.setdefault(self._canon(sort_of(inst)), []).append(inst)
        for per_sort in record.numeric_attrs.values():
            for sort, value in per_sort.items():
                instances.setdefault(self._canon(sort), []).append(sort)
                numeric_values.add(value)
        self.instances_by_sort = {s: sorted(set(v)) for s, v in instances.items()}
        self.numeric_values = sorted(numeric_values)
        self.symbols = sorted(symbols)
        self.object_terms = sorted({t for ts in self.instances_by_sort.values() for t in ts})

    def _canon(self, name: str) -> str:
        return self.vocab.canonical_sort(name) if self.vocab is not None else name

    def kinds_of(self, name: str) -> Optional[tuple[str, ...]]:
        if self.vocab is not None and self.vocab.has(name):
            return self.vocab.kinds(name)
        if name in ("greater", "smaller"):
            return (KIND_NUMERIC, KIND_NUMERIC)
        base = PredicateVocabulary.base()
        if base.has(name):
            return base.kinds(name)
        return (KIND_IMAGE, KIND_OBJECT)  # unregistered names behave as sort predicates

    def is_sort_predicate(self, name: str) -> bool:
        if name in ("object", "greater", "smaller"):
            return False
        if self.vocab is not None:
            if self.vocab.is_sort_predicate(name):
                return True
            return not self.vocab.has(name)
        return not PredicateVocabulary.base().has(name)

    def domain(self, kind: str) -> Sequence[Term]:
        if kind == KIND_IMAGE:
            return (self.record.id,)
        if kind == KIND_NUMERIC:
            return self.numeric_values
        if kind == KIND_SYMBOL:
            return self.symbols
        return self.object_terms

    def term_matches(self, t: Term, f: Term) -> bool:
        if isinstance(t, float) or isinstance(f, float):
            return isinstance(t, float) and isinstance(f, float) and t == f
        if t == f:
            return True
        ct, cf = self._canon(sort_of(t)), self._canon(sort_of(f))
        if ct != cf:
            return False
        # A bare sort name stands for any instance of that sort.
        return sort_of(t) == t or sort_of(f) == f

    def holds_ground(self, name: str, args: tuple, negated_context: bool = False) -> bool:
        """Positive satisfaction of a ground atom (args may contain UNMATCHED)."""
        if any(a is UNMATCHED for a in args):
            return False
        if name == "greater":
            return isinstance(args[0], float) and isinstance(args[1], float) and args[0] > args[1]
        if name == "smaller":
            return isinstance(args[0], float) and isinstance(args[1], float) and args[0] < args[1]
        if self.is_sort_predicate(name):
            img, obj = args
            if not self.term_matches(img, self.record.id):
                return False
            sort = self._canon(name)
            return any(self.term_matches(obj, inst) for inst in self.instances_by_sort.get(sort, ()))
        for fact_args in self.facts_by_name.get(name, ()):
            if len(fact_args) == len(args) and all(
                self.term_matches(t, f) for t, f in zip(args, fact_args)
            ):
                return True
        return False

    def exists_extension(self, name: str, args: tuple) -> bool:
        """Positive satisfaction allowing unbound variables (existential)."""
        free = [i for i, a in enumerate(args) if isinstance(a, Var)]
        if not free:
            return self.holds_ground(name, args)
        if name in ("greater", "smaller"):
            return False  # a comparison with an unlinked variable never holds
        kinds = self.kinds_of(name)
        domains = []
        for i in free:
            kind = kinds[i] if kinds and i < len(kinds) else KIND_OBJECT
            domains.append(self.domain(kind))
        for combo in itertools.product(*domains):
            candidate = list(args)
            for i, value in zip(free, combo):
                candidate[i] = value
            if self.holds_ground(name, tuple(candidate)):
                return True
        return False


def _get_index(record: AttributeRecord, vocab: Optional[PredicateVocabulary]) -> _Index:
    """Per-record index, cached on the (immutable) record keyed by vocabulary."""
    cache = getattr(record, "_eval_index", None)
    if cache is None:
        cache = {}
        object.__setattr__(record, "_eval_index", cache)
    key = id(vocab)
    idx = cache.get(key)
    if idx is None:
        idx = _Index(record, vocab)
        cache[key] = idx
    return idx


def _substitute(atom: PredicateAtom, binding: Mapping) -> tuple:
    out = []
    for t in atom.args:
        if is_variable(t):
            if t in binding:
                out.append(binding[t])
            elif t.name in binding:
                out.append(binding[t.name])
            else:
                out.append(t)
        else:
            out.append(t)
    return tuple(out)


def _atom_sat(idx: _Index, atom: PredicateAtom, binding: Mapping) -> int:
    args = _substitute(atom, binding)
    positive = idx.exists_extension(atom.name, args)
    if atom.negated:
        return 0 if positive else 1
    return 1 if positive else 0


def sat(
    record: AttributeRecord,
    atom: PredicateAtom,
    binding: Optional[Mapping] = None,
    vocab: Optional[PredicateVocabulary] = None,
) -> int:
    """1 iff the (possibly negated) atom holds in the record under ``binding``.

    Variables left unbound are treated existentially: a positive atom needs
    some completion from the record's facts; a negated atom needs none to
    exist.
    """
    idx = _get_index(record, vocab)
    return _atom_sat(idx, atom, binding or {})


@lru_cache(maxsize=4096)
def _clause_components(clause: Clause) -> tuple[tuple[int, ...], ...]:
    """Group atom indices by shared variables (vars occurring in non-negated atoms)."""
    positive_vars: set[str] = set()
    for atom in clause.atoms:
        if not atom.negated:
            positive_vars.update(v.name for v in atom.variables())
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for i, atom in enumerate(clause.atoms):
        parent.setdefault(("a", i), ("a", i))
        for v in atom.variables():
            if v.name in positive_vars:
                parent.setdefault(("v", v.name), ("v", v.name))
                union(("a", i), ("v", v.name))
    groups: dict = {}
    for i in range(len(clause.atoms)):
        groups.setdefault(find(("a", i)), []).append(i)
    return tuple(tuple(g) for g in groups.values())


def _var_domains(idx: _Index, clause: Clause, atom_ids: Sequence[int]) -> dict[str, list]:
    """Candidate values per positive variable: union of kind-appropriate terms
    over the positions it occupies, plus UNMATCHED."""
    domains: dict[str, set] = {}
    for i in atom_ids:
        atom = clause.atoms[i]
        if atom.negated:
            continue
        kinds = idx.kinds_of(atom.name)
        for pos, t in enumerate(atom.args):
            if not is_variable(t):
                continue
            kind = kinds[pos] if kinds and pos < len(kinds) else KIND_OBJECT
            domains.setdefault(t.name, set()).update(idx.domain(kind))
    return {v: sorted(vals, key=repr) + [UNMATCHED] for v, vals in domains.items()}


def _clause_best(idx: _Index, clause: Clause, head_binding: Mapping) -> int:
    """Max number of simultaneously satisfied atoms over all bindings."""
    base_binding = dict(head_binding)
    total = 0
    for atom_ids in _clause_components(clause):
        domains = _var_domains(idx, clause, atom_ids)
        var_names = [v for v in domains if v not in base_binding]
        best = 0
        for combo in itertools.product(*(domains[v] for v in var_names)):
            binding = dict(base_binding)
            binding.update(zip(var_names, combo))
            got = sum(_atom_sat(idx, clause.atoms[i], binding) for i in atom_ids)
            if got > best:
                best = got
            if best == len(atom_ids):
                break
        total += best
    return total


def _head_binding(record: AttributeRecord, clause: Clause) -> dict:
    # The rule-head variable X denotes the record itself.
    return {"X": record.id}


def clause_csr(
    record: AttributeRecord,
    clause: Clause,
    vocab: Optional[PredicateVocabulary] = None,
) -> float:
    """Best satisfied-atom fraction over all variable bindings."""
    idx = _get_index(record, vocab)
    best = _clause_best(idx, clause, _head_binding(record, clause))
    return best / len(clause.atoms)


def clause_satisfied(
    record: AttributeRecord,
    clause: Clause,
    vocab: Optional[PredicateVocabulary] = None,
) -> bool:
    return clause_csr(record, clause, vocab) == 1.0


def rule_csr(
    record: AttributeRecord,
    rule: Rule,
    vocab: Optional[PredicateVocabulary] = None,
) -> float:
    """Max clause satisfaction ratio across the rule's clauses."""
    idx = _get_index(record, vocab)
    best = 0.0
    for clause in rule.clauses:
        got = _clause_best(idx, clause, _head_binding(record, clause)) / len(clause.atoms)
        if got > best:
            best = got
        if best == 1.0:
            break
    return best


def rule_satisfied(
    record: AttributeRecord,
    rule: Rule,
    vocab: Optional[PredicateVocabulary] = None,
) -> bool:
    return rule_csr(record, rule, vocab) == 1.0


def _rule_stats(idx: _Index, rule: Rule) -> tuple[float, int]:
    """(csr, satisfied atoms in the best clause); the count breaks label ties."""
    best_ratio = -1.0
    best_count = 0
    for clause in rule.clauses:
        head = _head_binding(idx.record, clause)
        got = _clause_best(idx, clause, head)
        ratio = got / len(clause.atoms)
        if ratio > best_ratio or (ratio == best_ratio and got > best_count):
            best_ratio = ratio
            best_count = got
    return best_ratio, best_count


def ruleset_csrs(
    record: AttributeRecord,
    rules: RuleSet,
    vocab: Optional[PredicateVocabulary] = None,
) -> dict[str, float]:
    """Clause satisfaction ratio of every rule against one record."""
    idx = _get_index(record, vocab)
    return {label: _rule_stats(idx, rules.get(label))[0] for label in rules.labels}


def assign_label(
    record: AttributeRecord,
    rules: RuleSet,
    vocab: Optional[PredicateVocabulary] = None,
) -> LabelDecision:
    """Label a record: a uniquely satisfied rule wins outright; otherwise the
    rule with the highest clause satisfaction ratio, ties broken by the
    satisfied-atom count of its best clause, then lexicographic label."""
    if len(rules) < 2:
        raise ValueError("assign_label requires rules for at least two labels")
    idx = _get_index(record, vocab)
    csr: dict[str, float] = {}
    counts: dict[str, int] = {}
    for label in rules.labels:
        ratio, count = _rule_stats(idx, rules.get(label))
        csr[label] = ratio
        counts[label] = count
    satisfied = tuple(l for l in rules.labels if csr[l] == 1.0)
    if len(satisfied) == 1:
        return LabelDecision(
            record_id=record.id,
            assigned=satisfied[0],
            satisfied_labels=satisfied,
            per_rule_csr=csr,
            tie_broken=False,
        )
    top = max(csr.values())
    tied = [l for l in rules.labels if csr[l] == top]
    winner = sorted(tied, key=lambda l: (-counts[l], l))[0]
    return LabelDecision(
        record_id=record.id,
        assigned=winner,
        satisfied_labels=satisfied,
        per_rule_csr=csr,
        tie_broken=len(tied) > 1,
    )
