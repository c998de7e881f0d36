"""Rule induction: greedy clause growth by information gain with constant
support, TF-IDF-style literal pruning, and include/exclude clause constraints.

Candidate literals are closed units: a numeric threshold candidate carries
its whole chain (``truck(X,A), num(A,N), greater(N,5)``) and is appended as
one step, so per-example coverage factorizes into per-literal masks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .data import (
    KIND_IMAGE,
    KIND_OBJECT,
    KIND_SYMBOL,
    AttributeRecord,
    PredicateAtom,
    PredicateVocabulary,
    Var,
    sort_of,
)
from .dsl import Clause, Rule, RuleSet, clause_key
from .evaluate import clause_satisfied

NEG_INF = float("-inf")


class LearnError(RuntimeError):
    """Induction failure; carries whatever partial result exists."""

    def __init__(
        self,
        message: str,
        partial_clause: Optional[Clause] = None,
        partial_rule: Optional[Rule] = None,
        residual_ids: tuple[str, ...] = (),
    ):
        super().__init__(message)
        self.partial_clause = partial_clause
        self.partial_rule = partial_rule
        self.residual_ids = residual_ids


@dataclass(frozen=True)
class LearnConfig:
    theta: float = 0.05
    phi: int = 2
    max_clause_len: int = 6
    max_clauses: int = 16
    gain_tie_break: str = "significance"
    theta_overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.phi < 1:
            raise ValueError("phi must be >= 1")
        if self.max_clause_len < 1 or self.max_clauses < 1:
            raise ValueError("caps must be >= 1")

    def theta_for(self, pred: str) -> float:
        return self.theta_overrides.get(pred, self.theta)


@dataclass(frozen=True)
class FeedbackConstraints:
    """Clause-level carries of human rule edits into the next learning pass."""

    include: tuple[tuple[str, Clause], ...] = ()
    exclude: tuple[tuple[str, Clause], ...] = ()

    def __post_init__(self):
        for label in {l for l, _ in self.include}:
            inc = {clause_key(c) for l, c in self.include if l == label}
            exc = {clause_key(c) for l, c in self.exclude if l == label}
            if inc & exc:
                raise ValueError(f"include and exclude overlap for label {label!r}")

    def includes_for(self, label: str) -> tuple[Clause, ...]:
        return tuple(c for l, c in self.include if l == label)

    def exclude_keys_for(self, label: str) -> frozenset:
        return frozenset(clause_key(c) for l, c in self.exclude if l == label)

    def with_include(self, label: str, clause: Clause) -> "FeedbackConstraints":
        """Add an include; a conflicting exclude from an earlier edit is
        dropped (the newest instruction about a clause wins)."""
        key = clause_key(clause)
        if any(l == label and clause_key(c) == key for l, c in self.include):
            return self
        exclude = tuple(
            (l, c) for l, c in self.exclude if not (l == label and clause_key(c) == key)
        )
        return FeedbackConstraints(self.include + ((label, clause),), exclude)

    def with_exclude(self, label: str, clause: Clause) -> "FeedbackConstraints":
        key = clause_key(clause)
        if any(l == label and clause_key(c) == key for l, c in self.exclude):
            return self
        include = tuple(
            (l, c) for l, c in self.include if not (l == label and clause_key(c) == key)
        )
        return FeedbackConstraints(include, self.exclude + ((label, clause),))


@dataclass(frozen=True)
class CandidateLiteral:
    """One admissible extension step for a clause under construction."""

    atom: PredicateAtom
    source: str  # "fact" | "threshold" | "negation"
    sig: float = 0.0
    ctype: str = ""
    params: tuple = ()
    chain: tuple[PredicateAtom, ...] = ()
    object_type: bool = False
    index: int = 0

    @property
    def key(self) -> tuple:
        return (self.ctype,) + self.params

    @property
    def pred_name(self) -> str:
        if self.ctype in ("thr",):
            return self.params[1]  # the numeric attribute
        if self.ctype in ("sort+", "sort-"):
            return "object"
        if self.ctype in ("ov+", "ov-"):
            return "overlap"
        return self.params[0]

    def __str__(self) -> str:
        return ", ".join(str(a) for a in self.chain)


class _Profile:
    """Flat per-record summary the learner matches candidates against."""

    __slots__ = ("sorts", "image_attrs", "object_attrs", "overlap_pairs", "numeric")

    def __init__(self, record: AttributeRecord, vocab: PredicateVocabulary):
        canon = vocab.canonical_sort
        self.sorts = {canon(s) for s in record.sorts_present()}
        self.image_attrs: set[tuple[str, str]] = set()
        self.object_attrs: set[tuple[str, str]] = set()
        self.overlap_pairs: set[tuple[str, str]] = set()
        self.numeric: dict[tuple[str, str], float] = {}
        for atom in record.facts:
            if not vocab.has(atom.name):
                continue
            kinds = vocab.kinds(atom.name)
            if kinds == (KIND_IMAGE, KIND_SYMBOL):
                self.image_attrs.add((atom.name, atom.args[1]))
            elif kinds == (KIND_OBJECT, KIND_SYMBOL):
                self.object_attrs.add((atom.name, atom.args[1]))
            elif kinds == (KIND_OBJECT, KIND_OBJECT):
                self.overlap_pairs.add(
                    (canon(sort_of(atom.args[0])), canon(sort_of(atom.args[1])))
                )
        for attr, per_sort in record.numeric_attrs.items():
            for sort, value in per_sort.items():
                self.numeric[(canon(sort), attr)] = value


def _profile_of(record: AttributeRecord, vocab: PredicateVocabulary) -> _Profile:
    """Per-record profile, cached on the (immutable) record keyed by vocabulary."""
    cache = getattr(record, "_learn_profile", None)
    if cache is None:
        cache = {}
        object.__setattr__(record, "_learn_profile", cache)
    key = id(vocab)
    profile = cache.get(key)
    if profile is None:
        profile = _Profile(record, vocab)
        cache[key] = profile
    return profile


def _profiles(records: Sequence[AttributeRecord], vocab: PredicateVocabulary) -> list[_Profile]:
    return [_profile_of(r, vocab) for r in records]


def literal_holds(profile: _Profile, cand: CandidateLiteral) -> bool:
    """Satisfaction of a closed candidate literal on one record."""
    t, p = cand.ctype, cand.params
    if t == "sort+":
        return p[0] in profile.sorts
    if t == "sort-":
        return p[0] not in profile.sorts
    if t == "iattr+":
        return (p[0], p[1]) in profile.image_attrs
    if t == "iattr-":
        return (p[0], p[1]) not in profile.image_attrs
    if t == "oattr+":
        return (p[0], p[1]) in profile.object_attrs
    if t == "oattr-":
        return (p[0], p[1]) not in profile.object_attrs
    if t == "ov+":
        return (p[0], p[1]) in profile.overlap_pairs
    if t == "noov":
        return not profile.overlap_pairs
    if t == "thr":
        sort, attr, alpha, op = p
        value = profile.numeric.get((sort, attr))
        if value is None:
            return False
        return value > alpha if op == "greater" else value < alpha
    raise ValueError(f"unknown candidate type {t!r}")


def significance(
    literal: CandidateLiteral,
    examples: Sequence[AttributeRecord],
    positives: Sequence[AttributeRecord],
    vocab: Optional[PredicateVocabulary] = None,
) -> float:
    """Literal weight PF * ISF: frequency in positives, scaled by the log
    inverse frequency over all examples. 0 when nothing satisfies it."""
    if not positives:
        raise LearnError("significance requires at least one positive example")
    if not examples:
        raise LearnError("significance requires a non-empty example set")
    vocab = vocab or PredicateVocabulary.base()
    in_all = sum(literal_holds(_profile_of(t, vocab), literal) for t in examples)
    if in_all == 0:
        return 0.0
    in_pos = sum(literal_holds(_profile_of(t, vocab), literal) for t in positives)
    pf = in_pos / len(positives)
    isf = math.log(len(examples) / in_all)
    return pf * isf


# --- candidate generation ---

_SORT_VAR = "$sort"
_NUM_VAR = "$num"
_FRESH = "$fresh"
SORT_TWIN = "'"  # distinguishes the two variables of a same-sort overlap


def _sort_var(sort: str) -> Var:
    return Var(f"{_SORT_VAR}:{sort}")

def _num_var(sort: str, attr: str) -> Var:
    return Var(f"{_NUM_VAR}:{sort}:{attr}")


def _make_candidates(
    positives: Sequence[AttributeRecord],
    examples: Sequence[AttributeRecord],
    vocab: PredicateVocabulary,
) -> list[CandidateLiteral]:
    pos_profiles = _profiles(positives, vocab)
    all_profiles = _profiles(examples, vocab)
    x = Var("X")
    out: list[CandidateLiteral] = []
    seen: set[tuple] = set()

    def add(ctype, params, atom, chain, source, object_type=False):
        key = (ctype,) + params
        if key in seen:
            return
        seen.add(key)
        out.append(
            CandidateLiteral(
                atom=atom,
                source=source,
                ctype=ctype,
                params=params,
                chain=chain,
                object_type=object_type,
                index=len(out),
            )
        )

    # Object existence, from positives; absences from the whole training set.
    pos_sorts = sorted(set().union(*[p.sorts for p in pos_profiles]) if pos_profiles else set())
    all_sorts = sorted(set().union(*[p.sorts for p in all_profiles]) if all_profiles else set())
    for s in pos_sorts:
        atom = PredicateAtom("object", (x, s))
        add("sort+", (s,), atom, (atom,), "fact", object_type=True)
    for s in all_sorts:
        atom = PredicateAtom("object", (x, s), negated=True)
        add("sort-", (s,), atom, (atom,), "negation", object_type=True)

    # Image-level symbolic attributes (e.g. has_eye_color(X,black)).
    pos_iattrs = sorted(set().union(*[p.image_attrs for p in pos_profiles]) if pos_profiles else set())
    all_iattrs = sorted(set().union(*[p.image_attrs for p in all_profiles]) if all_profiles else set())
    for name, sym in pos_iattrs:
        atom = PredicateAtom(name, (x, sym))
        add("iattr+", (name, sym), atom, (atom,), "fact")
    for name, sym in all_iattrs:
        atom = PredicateAtom(name, (x, sym), negated=True)
        add("iattr-", (name, sym), atom, (atom,), "negation")

    # Object-level symbolic attributes, existential over the object
    # (``color(B,brown)``: something brown is in the image).
    pos_oattrs = sorted(set().union(*[p.object_attrs for p in pos_profiles]) if pos_profiles else set())
    all_oattrs = sorted(set().union(*[p.object_attrs for p in all_profiles]) if all_profiles else set())
    for name, sym in pos_oattrs:
        atom = PredicateAtom(name, (Var(f"{_FRESH}:{name}:{sym}"), sym))
        add("oattr+", (name, sym), atom, (atom,), "fact")
    for name, sym in all_oattrs:
        atom = PredicateAtom(name, (Var(f"{_FRESH}:!{name}:{sym}"), sym), negated=True)
        add("oattr-", (name, sym), atom, (atom,), "negation")

    # Overlap relations between sorts, chained through sort literals.
    pos_pairs = sorted(set().union(*[p.overlap_pairs for p in pos_profiles]) if pos_profiles else set())
    any_overlap = any(p.overlap_pairs for p in all_profiles)
    for s1, s2 in pos_pairs:
        a, b = _sort_var(s1), _sort_var(s2 if s2 != s1 else s2 + SORT_TWIN)
        chain = (
            PredicateAtom(s1, (x, a)),
            PredicateAtom(s2, (x, b)),
            PredicateAtom("overlap", (a, b)),
        )
        add("ov+", (s1, s2), chain[-1], chain, "fact")
    if any_overlap:
        atom = PredicateAtom(
            "overlap", (Var(f"{_FRESH}:ov1"), Var(f"{_FRESH}:ov2")), negated=True
        )
        add("noov", (), atom, (atom,), "negation")

    # Numeric thresholds at midpoints of adjacent observed values.
    values: dict[tuple[str, str], set[float]] = {}
    for p in all_profiles:
        for key, v in p.numeric.items():
            values.setdefault(key, set()).add(v)
    for (s, attr) in sorted(values):
        vs = sorted(values[(s, attr)])
        mids = [(a + b) / 2.0 for a, b in zip(vs, vs[1:])]
        sv, nv = _sort_var(s), _num_var(s, attr)
        prefix = (PredicateAtom(s, (x, sv)), PredicateAtom(attr, (sv, nv)))
        for alpha in mids:
            for op in ("greater", "smaller"):
                atom = PredicateAtom(op, (nv, alpha))
                add("thr", (s, attr, alpha, op), atom, prefix + (atom,), "threshold")

    return out


def init_candidates(
    positives: Sequence[AttributeRecord],
    examples: Sequence[AttributeRecord],
    vocab: PredicateVocabulary,
    config: LearnConfig,
) -> list[CandidateLiteral]:
    """Candidate literals for clause search, significance-pruned and ordered
    object-type first, then by descending significance.

    ``examples`` must be the full training set (positives and negatives):
    absence literals and threshold constants are derived from it.
    """
    if not positives:
        raise LearnError("init_candidates requires at least one positive example")
    raw = _make_candidates(positives, examples, vocab)
    scored = []
    for cand in raw:
        sig = significance(cand, examples, positives, vocab)
        if sig < config.theta_for(cand.pred_name):
            continue
        scored.append(
            CandidateLiteral(
                atom=cand.atom,
                source=cand.source,
                sig=sig,
                ctype=cand.ctype,
                params=cand.params,
                chain=cand.chain,
                object_type=cand.object_type,
                index=cand.index,
            )
        )
    if not scored:
        raise LearnError("no admissible literals (everything pruned)")
    scored.sort(key=lambda c: (not c.object_type, -c.sig, c.index))
    return [
        CandidateLiteral(
            atom=c.atom,
            source=c.source,
            sig=c.sig,
            ctype=c.ctype,
            params=c.params,
            chain=c.chain,
            object_type=c.object_type,
            index=i,
        )
        for i, c in enumerate(scored)
    ]


# --- information gain ---

def gain_from_counts(p0: int, n0: int, p1: int, n1: int, ppp: int) -> float:
    """Information gain of a literal from before/after coverage counts."""
    if p1 == 0:
        return NEG_INF
    if p0 == 0:
        return NEG_INF
    return ppp * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


def _masks(
    candidates: Sequence[CandidateLiteral],
    profiles: Sequence[_Profile],
) -> dict[tuple, np.ndarray]:
    return {
        c.key: np.fromiter((literal_holds(p, c) for p in profiles), dtype=bool, count=len(profiles))
        for c in candidates
    }


def gain(
    literal: CandidateLiteral,
    clause_so_far: Sequence[CandidateLiteral],
    positives: Sequence[AttributeRecord],
    negatives: Sequence[AttributeRecord],
    vocab: Optional[PredicateVocabulary] = None,
) -> float:
    """Gain of appending ``literal`` to the clause built from ``clause_so_far``."""
    if not positives:
        raise LearnError("gain requires at least one positive example")
    vocab = vocab or PredicateVocabulary.base()
    pos_p = _profiles(positives, vocab)
    neg_p = _profiles(negatives, vocab)

    def covered(profiles, lits):
        return [all(literal_holds(p, l) for l in lits) for p in profiles]

    before = list(clause_so_far)
    after = before + [literal]
    pos_before = covered(pos_p, before)
    pos_after = covered(pos_p, after)
    neg_before = covered(neg_p, before)
    neg_after = covered(neg_p, after)
    ppp = sum(b and a for b, a in zip(pos_before, pos_after))
    return gain_from_counts(
        sum(pos_before), sum(neg_before), sum(pos_after), sum(neg_after), ppp
    )


# --- clause and rule search ---

def _materialize(chosen: Sequence[CandidateLiteral]) -> Clause:
    """Join candidate chains into one clause, sharing sort/numeric chain
    variables and giving everything canonical names."""
    atoms: list[PredicateAtom] = []
    have: set = set()
    placeholder_map: dict[str, Var] = {}
    obj_pool = list("ABCDEFGHIJKLM")
    num_pool = list("NOPQRSTU")
    counters = {"obj": 0, "num": 0}

    def resolve(term):
        if not isinstance(term, Var):
            return term
        name = term.name
        if not name.startswith("$"):
            return term
        if name in placeholder_map:
            return placeholder_map[name]
        if name.startswith(_NUM_VAR):
            i = counters["num"]
            fresh = Var(num_pool[i]) if i < len(num_pool) else Var(f"N{i}")
            counters["num"] += 1
        else:
            i = counters["obj"]
            fresh = Var(obj_pool[i]) if i < len(obj_pool) else Var(f"V{i}")
            counters["obj"] += 1
        placeholder_map[name] = fresh
        return fresh

    for cand in chosen:
        for atom in cand.chain:
            resolved = PredicateAtom(
                atom.name,
                tuple(resolve(t) for t in atom.args),
                negated=atom.negated,
            )
            marker = (resolved.name, resolved.args, resolved.negated)
            if marker in have:
                continue
            have.add(marker)
            atoms.append(resolved)
    return Clause(atoms=tuple(atoms))


def _atoms_if_appended(current_atoms: int, have: set, cand: CandidateLiteral) -> int:
    added = 0
    for atom in cand.chain:
        marker = (atom.name, atom.args, atom.negated)
        if marker not in have:
            added += 1
    return current_atoms + added


def _learn_clause(
    positives: Sequence[AttributeRecord],
    negatives: Sequence[AttributeRecord],
    candidates: Sequence[CandidateLiteral],
    config: LearnConfig,
    vocab: PredicateVocabulary,
    banned: frozenset = frozenset(),  # candidate keys barred from seeding the clause
    excluded_keys: frozenset = frozenset(),  # clause keys to build past, not stop on
) -> tuple[Clause, list[CandidateLiteral], np.ndarray]:
    pos_masks = _masks(candidates, _profiles(positives, vocab))
    neg_masks = _masks(candidates, _profiles(negatives, vocab))
    pos_cov = np.ones(len(positives), dtype=bool)
    neg_cov = np.ones(len(negatives), dtype=bool)
    chosen: list[CandidateLiteral] = []
    chosen_keys: set = set()
    chain_have: set = set()
    atom_count = 0

    def pick(allow_noop: bool = False):
        object_atoms = sum(
            1 for c in chosen for a in c.chain if a.name == "object" or vocab.is_sort_predicate(a.name)
        )
        pool = []
        for cand in candidates:
            if cand.key in chosen_keys:
                continue
            if not chosen and cand.key in banned:
                continue  # bans apply to the seed position only
            if _atoms_if_appended(atom_count, chain_have, cand) > config.max_clause_len:
                continue
            p1 = int(np.count_nonzero(pos_cov & pos_masks[cand.key]))
            if p1 == 0:
                continue
            n1 = int(np.count_nonzero(neg_cov & neg_masks[cand.key]))
            p0 = int(np.count_nonzero(pos_cov))
            n0 = int(np.count_nonzero(neg_cov))
            if p1 == p0 and n1 == n0 and not allow_noop:
                continue  # changes nothing; never worth an atom
            g = gain_from_counts(p0, n0, p1, n1, p1)
            pool.append((g, cand, p1, n1))
        if not pool:
            return None
        if object_atoms < config.phi:
            object_pool = [entry for entry in pool if entry[1].object_type]
            if object_pool:
                pool = object_pool
        return max(pool, key=lambda e: (e[0], e[1].sig, -e[1].index))

    def append(cand):
        nonlocal atom_count
        chosen.append(cand)
        chosen_keys.add(cand.key)
        atom_count = _atoms_if_appended(atom_count, chain_have, cand)
        for atom in cand.chain:
            chain_have.add((atom.name, atom.args, atom.negated))

    def fail(message):
        partial = _materialize(chosen) if chosen else None
        err = LearnError(message, partial_clause=partial)
        err.failed_seed = chosen[0].key if chosen else None
        raise err

    while True:
        if not chosen or neg_cov.any():
            best = pick(allow_noop=not neg_cov.any())
            if best is None:
                fail("cannot separate positives from negatives within max_clause_len")
            cand = best[1]
            append(cand)
            pos_cov &= pos_masks[cand.key]
            neg_cov &= neg_masks[cand.key]
            continue
        clause = _materialize(chosen)
        if excluded_keys and clause_key(clause) in excluded_keys:
            # Grow a more specific clause than the excluded one.
            best = pick(allow_noop=True)
            if best is None:
                fail("every admissible clause is excluded")
            cand = best[1]
            append(cand)
            pos_cov &= pos_masks[cand.key]
            neg_cov &= neg_masks[cand.key]
            continue
        return clause, chosen, pos_cov


def learn_clause(
    positives: Sequence[AttributeRecord],
    negatives: Sequence[AttributeRecord],
    candidates: Sequence[CandidateLiteral],
    config: LearnConfig,
    vocab: Optional[PredicateVocabulary] = None,
) -> Clause:
    """Greedily grow one clause until it rejects every negative example."""
    if not positives:
        raise LearnError("learn_clause requires at least one positive example")
    vocab = vocab or PredicateVocabulary.base()
    clause, _, _ = _learn_clause(positives, negatives, candidates, config, vocab)
    return clause


def learn_rule(
    label: str,
    positives: Sequence[AttributeRecord],
    negatives: Sequence[AttributeRecord],
    constraints: FeedbackConstraints,
    config: LearnConfig,
    vocab: Optional[PredicateVocabulary] = None,
) -> Rule:
    """Cover all positives with clauses; include-constrained clauses come
    first, excluded clauses are discarded and their seed literal banned."""
    if not positives:
        raise LearnError(f"label {label!r} has no positive examples")
    vocab = vocab or PredicateVocabulary.base()
    clauses: list[Clause] = list(constraints.includes_for(label))
    exclude_keys = constraints.exclude_keys_for(label)
    examples = list(positives) + list(negatives)

    def covered_by(clause: Clause, record: AttributeRecord) -> bool:
        return clause_satisfied(record, clause, vocab)

    uncovered = [
        t for t in positives if not any(covered_by(c, t) for c in clauses)
    ]
    while uncovered:
        if len(clauses) >= config.max_clauses:
            raise LearnError(
                f"label {label!r}: clause cap reached with positives uncovered",
                partial_rule=Rule(label=label, clauses=tuple(clauses)) if clauses else None,
                residual_ids=tuple(t.id for t in uncovered),
            )
        candidates = init_candidates(uncovered, examples, vocab, config)
        banned: set = set()
        clause = None
        while clause is None:
            if len(banned) >= len(candidates):
                break  # every seed tried; fall back to building past the excludes
            try:
                attempt, chosen, attempt_cov = _learn_clause(
                    uncovered, negatives, candidates, config, vocab, banned=frozenset(banned)
                )
            except LearnError as exc:
                # Greedy search is seed-sensitive: a dead end under one first
                # literal does not mean no clause exists. Rotate the seed.
                seed = getattr(exc, "failed_seed", None)
                if seed is None or seed in banned:
                    break
                banned.add(seed)
                continue
            if clause_key(attempt) not in exclude_keys:
                clause = attempt
                clause_cov = attempt_cov
            else:
                # Excluded: ban this attempt's seed literal and retry.
                banned.add(chosen[0].key)
        if clause is None:
            # Last resort: allow any seed but require the builder to extend
            # any clause whose shape the constraints forbid.
            try:
                clause, chosen, clause_cov = _learn_clause(
                    uncovered, negatives, candidates, config, vocab,
                    excluded_keys=exclude_keys,
                )
            except LearnError as exc:
                raise LearnError(
                    f"label {label!r}: {exc}",
                    partial_rule=Rule(label=label, clauses=tuple(clauses)) if clauses else None,
                    residual_ids=tuple(t.id for t in uncovered),
                ) from exc
        clauses.append(clause)
        remaining = [t for t, covered in zip(uncovered, clause_cov) if not covered]
        if len(remaining) == len(uncovered):
            raise LearnError(
                f"label {label!r}: learned clause covers no remaining positive",
                partial_rule=Rule(label=label, clauses=tuple(clauses)),
                residual_ids=tuple(t.id for t in uncovered),
            )
        uncovered = remaining
    return Rule(label=label, clauses=tuple(clauses))


def learn_ruleset(
    records: Sequence[AttributeRecord],
    labels: Sequence[str],
    constraints: Optional[FeedbackConstraints] = None,
    config: Optional[LearnConfig] = None,
    vocab: Optional[PredicateVocabulary] = None,
) -> RuleSet:
    """One-vs-rest rule induction: for each label, its records are the
    positives and every other labeled record a negative."""
    labels = list(labels)
    if len(labels) < 2:
        raise LearnError("learn_ruleset requires at least two labels")
    constraints = constraints or FeedbackConstraints()
    config = config or LearnConfig()
    labeled = [r for r in records if r.label is not None]
    rules: dict[str, Rule] = {}
    for label in labels:
        positives = [r for r in labeled if r.label == label]
        negatives = [r for r in labeled if r.label != label]
        if not positives:
            raise LearnError(f"label {label!r} has no positive examples")
        try:
            rules[label] = learn_rule(label, positives, negatives, constraints, config, vocab)
        except LearnError:
            raise
        except Exception as exc:  # pragma: no cover - defensive
            raise LearnError(f"label {label!r}: {exc}") from exc
    return RuleSet(rules=rules)
