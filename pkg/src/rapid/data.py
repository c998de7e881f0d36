"""Domain model: ground facts, attribute records, datasets, feature vectors.

Records are the symbolic stand-in for perception output: each one carries a
set of ground predicate atoms (object existence, per-object attributes) plus
per-sort numeric values. No image data exists anywhere in this package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

# Argument kinds a predicate position can declare.
KIND_IMAGE = "image"
KIND_OBJECT = "object"
KIND_SYMBOL = "symbol"
KIND_NUMERIC = "numeric"
KINDS = (KIND_IMAGE, KIND_OBJECT, KIND_SYMBOL, KIND_NUMERIC)

SORT_SEP = "#"


class DatasetError(ValueError):
    """Raised on malformed dataset or vocabulary input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Var:
    """A logic variable. Constants are plain ``str`` (symbols) or ``float``."""

    name: str

    def __repr__(self) -> str:
        return f"Var({self.name})"


Term = Union[Var, str, float]


def is_variable(term: Term) -> bool:
    return isinstance(term, Var)


def sort_of(term: str) -> str:
    """Object sort of an instance term: ``truck#2`` and ``truck`` are both sort ``truck``."""
    return term.split(SORT_SEP, 1)[0]


@dataclass(frozen=True)
class PredicateAtom:
    """One (possibly negated) predicate application.

    Ground atoms (record facts) contain only constants; rule atoms may
    contain variables.
    """

    name: str
    args: tuple[Term, ...]
    negated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def is_comparison(self) -> bool:
        return self.name in ("greater", "smaller")

    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def variables(self) -> tuple[Var, ...]:
        seen = []
        for a in self.args:
            if is_variable(a) and a not in seen:
                seen.append(a)
        return tuple(seen)

    def __str__(self) -> str:
        parts = ",".join(format_term(a) for a in self.args)
        return f"{'!' if self.negated else ''}{self.name}({parts})"


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, float):
        if math.isfinite(term) and term == int(term):
            return str(int(term))
        return repr(term)
    return term


# Primitive predicate table: name -> argument kinds.
_BASE_ENTRIES = {
    "object": (KIND_IMAGE, KIND_OBJECT),
    "overlap": (KIND_OBJECT, KIND_OBJECT),
    "color": (KIND_OBJECT, KIND_SYMBOL),
    "num": (KIND_OBJECT, KIND_NUMERIC),
    "area": (KIND_OBJECT, KIND_NUMERIC),
    "greater": (KIND_NUMERIC, KIND_NUMERIC),
    "smaller": (KIND_NUMERIC, KIND_NUMERIC),
}


@dataclass(frozen=True)
class PredicateVocabulary:
    """Declares every predicate an atom may use: name -> per-argument kinds.

    Object sorts observed in a dataset are registered as unary-style "sort
    predicates" (``truck(X,A)``) so rules can introduce typed object
    variables. ``aliases`` maps alternative names onto a canonical sort
    (``people`` -> ``person``).
    """

    entries: Mapping[str, tuple[str, ...]]
    sorts: frozenset[str] = frozenset()
    aliases: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def base(cls) -> "PredicateVocabulary":
        return cls(entries=dict(_BASE_ENTRIES))

    def arity(self, name: str) -> int:
        return len(self.entries[name])

    def kinds(self, name: str) -> tuple[str, ...]:
        return self.entries[name]

    def has(self, name: str) -> bool:
        return name in self.entries

    def is_sort_predicate(self, name: str) -> bool:
        return name in self.sorts or (name in self.aliases)

    def canonical_sort(self, name: str) -> str:
        return self.aliases.get(name, name)

    def numeric_attr_names(self) -> frozenset[str]:
        """Predicates shaped like ``num``/``area``: (object, numeric)."""
        return frozenset(
            name
            for name, kinds in self.entries.items()
            if kinds == (KIND_OBJECT, KIND_NUMERIC)
        )

    def with_sorts(self, sorts: Iterable[str]) -> "PredicateVocabulary":
        new_sorts = set(self.sorts)
        entries = dict(self.entries)
        for s in sorts:
            if s in self.aliases:
                continue
            new_sorts.add(s)
            entries.setdefault(s, (KIND_IMAGE, KIND_OBJECT))
        return PredicateVocabulary(entries=entries, sorts=frozenset(new_sorts), aliases=dict(self.aliases))

    def with_entries(self, extra: Mapping[str, tuple[str, ...]]) -> "PredicateVocabulary":
        entries = dict(self.entries)
        entries.update(extra)
        return PredicateVocabulary(entries=entries, sorts=self.sorts, aliases=dict(self.aliases))

    def with_aliases(self, aliases: Mapping[str, str]) -> "PredicateVocabulary":
        merged = dict(self.aliases)
        merged.update(aliases)
        entries = dict(self.entries)
        for alias in aliases:
            entries.setdefault(alias, (KIND_IMAGE, KIND_OBJECT))
        return PredicateVocabulary(entries=entries, sorts=self.sorts, aliases=merged)

    def validate_atom(self, atom: PredicateAtom) -> None:
        if not self.has(atom.name):
            raise DatasetError(f"unknown predicate {atom.name!r}")
        kinds = self.kinds(atom.name)
        if len(atom.args) != len(kinds):
            raise DatasetError(
                f"predicate {atom.name!r} expects {len(kinds)} arguments, got {len(atom.args)}"
            )
        for term, kind in zip(atom.args, kinds):
            if isinstance(term, float) and kind != KIND_NUMERIC:
                raise DatasetError(f"{atom}: numeric constant in {kind} position")

    @classmethod
    def from_json(cls, text: str) -> "PredicateVocabulary":
        """Load ``{name: {"arity": int, "kinds": [...], "alias_of": sort?}}``."""
        raw = json.loads(text)
        vocab = cls.base()
        entries: dict[str, tuple[str, ...]] = {}
        sorts: set[str] = set()
        aliases: dict[str, str] = {}
        for name, spec in raw.items():
            kinds = tuple(spec["kinds"])
            if spec.get("arity", len(kinds)) != len(kinds):
                raise DatasetError(f"vocabulary entry {name!r}: arity does not match kinds")
            for k in kinds:
                if k not in KINDS:
                    raise DatasetError(f"vocabulary entry {name!r}: unknown kind {k!r}")
            if "alias_of" in spec:
                aliases[name] = spec["alias_of"]
            elif kinds == (KIND_IMAGE, KIND_OBJECT) and name != "object":
                sorts.add(name)
            entries[name] = kinds
        return cls(
            entries={**vocab.entries, **entries},
            sorts=frozenset(sorts),
            aliases=aliases,
        )

    def to_json(self) -> str:
        out = {}
        for name in sorted(self.entries):
            if name in _BASE_ENTRIES and name not in self.aliases:
                continue
            spec: dict = {"arity": len(self.entries[name]), "kinds": list(self.entries[name])}
            if name in self.aliases:
                spec["alias_of"] = self.aliases[name]
            out[name] = spec
        return json.dumps(out, indent=2, sort_keys=True)


@dataclass(frozen=True, eq=False)
class AttributeRecord:
    """One image's ground facts plus optional ground-truth label."""

    id: str
    facts: frozenset[PredicateAtom]
    numeric_attrs: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    label: Optional[str] = None

    def object_instances(self) -> tuple[str, ...]:
        insts = sorted(
            a.args[1] for a in self.facts if a.name == "object" and isinstance(a.args[1], str)
        )
        return tuple(insts)

    def sorts_present(self) -> frozenset[str]:
        present = {sort_of(t) for t in self.object_instances()}
        for per_sort in self.numeric_attrs.values():
            present.update(per_sort)
        return frozenset(present)

    def numeric_value(self, attr: str, sort: str) -> Optional[float]:
        return self.numeric_attrs.get(attr, {}).get(sort)

    def with_label(self, label: Optional[str]) -> "AttributeRecord":
        return replace(self, label=label)

    def __repr__(self) -> str:
        return f"AttributeRecord(id={self.id!r}, label={self.label!r}, {len(self.facts)} facts)"


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of records with their shared vocabulary."""

    records: tuple[AttributeRecord, ...]
    labels: tuple[str, ...]
    vocabulary: PredicateVocabulary

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def by_id(self) -> dict[str, AttributeRecord]:
        return {r.id: r for r in self.records}

    @property
    def object_sorts(self) -> tuple[str, ...]:
        """All object sorts observed anywhere in the dataset, sorted (featurization dims)."""
        sorts: set[str] = set()
        for r in self.records:
            sorts.update(r.sorts_present())
        return tuple(sorted(sorts))


@dataclass(frozen=True)
class FeatureVector:
    """Per-sort object counts for one record; the diversity-clustering representation."""

    dims: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) != len(self.counts):
            raise ValueError("dims and counts length mismatch")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)


def featurize(record: AttributeRecord, dims: Sequence[str]) -> FeatureVector:
    """Count objects of each sort in ``dims``: the ``num`` value when declared,
    otherwise the number of object facts of that sort, otherwise 0."""
    if not dims:
        raise ValueError("dims must be non-empty")
    instance_counts: dict[str, int] = {}
    for inst in record.object_instances():
        s = sort_of(inst)
        instance_counts[s] = instance_counts.get(s, 0) + 1
    counts = []
    for d in dims:
        declared = record.numeric_value("num", d)
        if declared is not None:
            counts.append(int(round(declared)))
        else:
            counts.append(instance_counts.get(d, 0))
    return FeatureVector(dims=tuple(dims), counts=tuple(counts))


def cosine_similarity(a: FeatureVector, b: FeatureVector) -> float:
    """Cosine of the angle between two count vectors; zero vectors score 0."""
    if a.dims != b.dims:
        raise ValueError("feature vectors have different dims")
    va, vb = a.as_array(), b.as_array()
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))


def _coerce_number(value, context: str, line: Optional[int]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetError(f"{context}: expected a number, got {value!r}", line)
    value = float(value)
    if not math.isfinite(value):
        raise DatasetError(f"{context}: non-finite number", line)
    return value


def _record_from_obj(obj: dict, vocab: PredicateVocabulary, line: int) -> tuple[AttributeRecord, set[str]]:
    if not isinstance(obj, dict):
        raise DatasetError("record is not a JSON object", line)
    rid = obj.get("id")
    if not isinstance(rid, str) or not rid:
        raise DatasetError("missing or empty 'id'", line)
    sorts_seen: set[str] = set()
    facts: set[PredicateAtom] = set()
    numeric_attr_names = vocab.numeric_attr_names()

    for raw in obj.get("facts", []):
        if not isinstance(raw, list) or not raw or not isinstance(raw[0], str):
            raise DatasetError(f"malformed fact {raw!r}", line)
        name, args = raw[0], raw[1:]
        if not vocab.has(name):
            raise DatasetError(f"unknown predicate {name!r}", line)
        if name in ("greater", "smaller"):
            raise DatasetError(f"comparison predicate {name!r} cannot be a fact", line)
        if name in numeric_attr_names:
            raise DatasetError(
                f"numeric attribute {name!r} must be given via its map, not a fact", line
            )
        if vocab.is_sort_predicate(name):
            raise DatasetError(
                f"sort predicate {name!r} cannot be a fact; use [\"object\", instance]", line
            )
        kinds = vocab.kinds(name)
        if kinds and kinds[0] == KIND_IMAGE:
            args = [rid] + list(args)
        if len(args) != len(kinds):
            raise DatasetError(
                f"predicate {name!r} expects {len(kinds)} arguments, got {len(args)}", line
            )
        terms: list[Term] = []
        for value, kind in zip(args, kinds):
            if kind == KIND_NUMERIC:
                terms.append(_coerce_number(value, f"fact {name}", line))
            elif isinstance(value, str) and value:
                terms.append(value)
                if kind == KIND_OBJECT:
                    sorts_seen.add(sort_of(value))
            else:
                raise DatasetError(f"fact {name}: bad {kind} argument {value!r}", line)
        facts.add(PredicateAtom(name, tuple(terms)))

    numeric_attrs: dict[str, dict[str, float]] = {}

    def add_attr(attr: str, mapping, ctx: str):
        if not isinstance(mapping, dict):
            raise DatasetError(f"{ctx}: expected an object of sort -> number", line)
        for sort, value in mapping.items():
            v = _coerce_number(value, f"{ctx}[{sort}]", line)
            numeric_attrs.setdefault(attr, {})[sort] = v
            sorts_seen.add(sort)
            facts.add(PredicateAtom(attr, (sort, v)))

    if "num" in obj:
        add_attr("num", obj["num"], "num")
    if "area" in obj:
        add_attr("area", obj["area"], "area")
    for attr, mapping in obj.get("extra", {}).items():
        if not isinstance(attr, str) or not attr:
            raise DatasetError(f"bad extra attribute name {attr!r}", line)
        add_attr(attr, mapping, f"extra[{attr}]")

    label = obj.get("label")
    if label is not None and (not isinstance(label, str) or not label):
        raise DatasetError(f"bad label {label!r}", line)

    record = AttributeRecord(
        id=rid, facts=frozenset(facts), numeric_attrs=numeric_attrs, label=label
    )
    return record, sorts_seen


def parse_dataset(
    stream: Union[str, IO[str], Iterable[str]],
    vocabulary: Optional[PredicateVocabulary] = None,
) -> Dataset:
    """Parse a JSON Lines dataset.

    Any malformed line rejects the whole input; errors carry the 1-based
    line number. Object sorts and numeric attribute names observed in the
    data are registered in the returned dataset's vocabulary.
    """
    if isinstance(stream, str):
        lines: Iterator[str] = iter(stream.splitlines())
    elif hasattr(stream, "read"):
        lines = iter(stream.read().splitlines())
    else:
        lines = iter(stream)

    vocab = vocabulary if vocabulary is not None else PredicateVocabulary.base()

    # Pre-scan for extra numeric attribute names so facts validate.
    raw_objs: list[tuple[int, dict]] = []
    extra_attrs: set[str] = set()
    for lineno, text in enumerate(lines, start=1):
        text = text.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON ({exc.msg})", lineno) from exc
        raw_objs.append((lineno, obj))
        if isinstance(obj, dict):
            extra_attrs.update(k for k in obj.get("extra", {}) if isinstance(k, str))
    if not raw_objs:
        raise DatasetError("empty dataset")
    new_attrs = {a: (KIND_OBJECT, KIND_NUMERIC) for a in extra_attrs if not vocab.has(a)}
    if new_attrs:
        vocab = vocab.with_entries(new_attrs)

    records: list[AttributeRecord] = []
    labels: list[str] = []
    seen_ids: set[str] = set()
    all_sorts: set[str] = set()
    for lineno, obj in raw_objs:
        record, sorts_seen = _record_from_obj(obj, vocab, lineno)
        if record.id in seen_ids:
            raise DatasetError(f"duplicate id {record.id!r}", lineno)
        seen_ids.add(record.id)
        all_sorts.update(sorts_seen)
        if record.label is not None and record.label not in labels:
            labels.append(record.label)
        records.append(record)

    vocab = vocab.with_sorts(sorted(all_sorts))
    return Dataset(records=tuple(records), labels=tuple(labels), vocabulary=vocab)


def record_to_obj(record: AttributeRecord, vocab: PredicateVocabulary) -> dict:
    numeric_attr_names = vocab.numeric_attr_names()
    plain_facts = []
    for atom in sorted(record.facts, key=str):
        if atom.name in numeric_attr_names:
            continue  # regenerated from the numeric maps
        kinds = vocab.kinds(atom.name)
        args = list(atom.args)
        if kinds and kinds[0] == KIND_IMAGE:
            args = args[1:]
        plain_facts.append([atom.name] + [a if isinstance(a, str) else float(a) for a in args])
    obj: dict = {"id": record.id, "facts": plain_facts}
    if "num" in record.numeric_attrs:
        obj["num"] = dict(sorted(record.numeric_attrs["num"].items()))
    if "area" in record.numeric_attrs:
        obj["area"] = dict(sorted(record.numeric_attrs["area"].items()))
    extras = {
        attr: dict(sorted(values.items()))
        for attr, values in sorted(record.numeric_attrs.items())
        if attr not in ("num", "area")
    }
    if extras:
        obj["extra"] = extras
    if record.label is not None:
        obj["label"] = record.label
    return obj


def serialize_dataset(dataset: Dataset) -> str:
    """Inverse of ``parse_dataset`` up to fact-set equality; byte-deterministic."""
    lines = [
        json.dumps(record_to_obj(r, dataset.vocabulary), sort_keys=False)
        for r in dataset.records
    ]
    return "\n".join(lines) + "\n"


def records_equivalent(a: AttributeRecord, b: AttributeRecord) -> bool:
    return (
        a.id == b.id
        and a.facts == b.facts
        and {k: dict(v) for k, v in a.numeric_attrs.items()}
        == {k: dict(v) for k, v in b.numeric_attrs.items()}
        and a.label == b.label
    )
