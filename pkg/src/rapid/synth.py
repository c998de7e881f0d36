"""Synthetic dataset generation from planted gold rules.

Each generated record is built to satisfy exactly one gold rule (its
label's) at noise 0; a noise rate corrupts a matching fraction of records
so their facts no longer agree with their label. Generation is fully
deterministic under the seed, down to the serialized bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .data import Dataset, PredicateVocabulary, parse_dataset, serialize_dataset
from .dsl import Clause, RuleSet, parse_ruleset, print_ruleset
from .evaluate import rule_satisfied
from .oracle import GoldSpec


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for one synthetic task."""

    labels: tuple[str, ...]
    rules: str  # gold rules, DSL text, one rule per label
    pool_size: int = 60
    seed: int = 0
    noise_rate: float = 0.0
    ambient_sorts: tuple[str, ...] = ()
    max_ambient: int = 3
    instance_range: tuple[int, int] = (1, 3)
    categorical_attrs: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    numeric_ranges: Mapping[tuple[str, str], tuple[float, float]] = field(default_factory=dict)
    max_attempts: int = 500

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        raw = json.loads(text)
        numeric_ranges = {}
        for key, rng in raw.get("numeric_ranges", {}).items():
            sort, _, attr = key.partition(".")
            numeric_ranges[(sort, attr)] = (float(rng[0]), float(rng[1]))
        return cls(
            labels=tuple(raw["labels"]),
            rules=raw["rules"],
            pool_size=int(raw.get("pool_size", 60)),
            seed=int(raw.get("seed", 0)),
            noise_rate=float(raw.get("noise_rate", 0.0)),
            ambient_sorts=tuple(raw.get("ambient_sorts", ())),
            max_ambient=int(raw.get("max_ambient", 3)),
            instance_range=tuple(raw.get("instance_range", (1, 3))),
            categorical_attrs={
                k: tuple(v) for k, v in raw.get("categorical_attrs", {}).items()
            },
            numeric_ranges=numeric_ranges,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "labels": list(self.labels),
                "rules": self.rules,
                "pool_size": self.pool_size,
                "seed": self.seed,
                "noise_rate": self.noise_rate,
                "ambient_sorts": list(self.ambient_sorts),
                "max_ambient": self.max_ambient,
                "instance_range": list(self.instance_range),
                "categorical_attrs": {k: list(v) for k, v in self.categorical_attrs.items()},
                "numeric_ranges": {
                    f"{s}.{a}": list(r) for (s, a), r in self.numeric_ranges.items()
                },
            },
            indent=2,
            sort_keys=True,
        )


def _build_vocab(spec: GeneratorSpec) -> PredicateVocabulary:
    vocab = PredicateVocabulary.base()
    if spec.categorical_attrs:
        vocab = vocab.with_entries(
            {name: ("image", "symbol") for name in spec.categorical_attrs}
        )
    sorts = set(spec.ambient_sorts) | {s for s, _ in spec.numeric_ranges}
    if sorts:
        vocab = vocab.with_sorts(sorted(sorts))
    return vocab


class _Scene:
    """Mutable record sketch during sampling."""

    def __init__(self):
        self.sorts: dict[str, int] = {}  # sort -> instance count
        self.attr_values: dict[str, str] = {}  # categorical attr -> value
        self.numeric: dict[tuple[str, str], float] = {}  # (sort, attr) -> value
        self.overlaps: set[tuple[str, str]] = set()

    def to_obj(self, rid: str, label: Optional[str]) -> dict:
        facts = []
        for sort in sorted(self.sorts):
            count = self.sorts[sort]
            if count == 1:
                facts.append(["object", sort])
            else:
                facts.extend(["object", f"{sort}#{i}"] for i in range(count))
        for attr in sorted(self.attr_values):
            facts.append([attr, self.attr_values[attr]])
        for a, b in sorted(self.overlaps):
            facts.append(["overlap", a, b])
        obj: dict = {"id": rid, "facts": facts}
        num = {s: v for (s, a), v in self.numeric.items() if a == "num"}
        area = {s: v for (s, a), v in self.numeric.items() if a == "area"}
        extra: dict[str, dict[str, float]] = {}
        for (s, a), v in self.numeric.items():
            if a not in ("num", "area"):
                extra.setdefault(a, {})[s] = v
        if num:
            obj["num"] = dict(sorted(num.items()))
        if area:
            obj["area"] = dict(sorted(area.items()))
        if extra:
            obj["extra"] = {k: dict(sorted(v.items())) for k, v in sorted(extra.items())}
        if label is not None:
            obj["label"] = label
        return obj


def _clause_requirements(clause: Clause, spec: GeneratorSpec, vocab: PredicateVocabulary):
    """Extract must/must-not structure from one gold clause."""
    req_sorts: set[str] = set()
    forb_sorts: set[str] = set()
    req_attr: dict[str, str] = {}
    forb_attr: dict[str, set[str]] = {}
    bounds: dict[tuple[str, str], list] = {}  # (sort, attr) -> [lo, hi]
    req_overlap: set[tuple[str, str]] = set()
    forbid_overlap = False
    var_sorts: dict[str, str] = {}

    for atom in clause.atoms:
        name = atom.name
        if name == "object":
            target = atom.args[1]
            if not isinstance(target, str):
                raise GenerationError(f"cannot generate from {atom}: variable object sort")
            (forb_sorts if atom.negated else req_sorts).add(vocab.canonical_sort(target))
        elif vocab.is_sort_predicate(name):
            sort = vocab.canonical_sort(name)
            (forb_sorts if atom.negated else req_sorts).add(sort)
            obj = atom.args[1]
            if not atom.negated and hasattr(obj, "name"):
                var_sorts[obj.name] = sort
        elif name in spec.categorical_attrs:
            value = atom.args[1]
            if atom.negated:
                forb_attr.setdefault(name, set()).add(value)
            else:
                if name in req_attr and req_attr[name] != value:
                    raise GenerationError(f"clause requires two values for {name}")
                req_attr[name] = value
        elif name in ("greater", "smaller"):
            var = atom.args[0]
            alpha = atom.args[1]
            # The owning (sort, attr) pair is recovered from the clause: find
            # the numeric attribute atom introducing this variable.
            owner = None
            for other in clause.atoms:
                kinds = vocab.kinds(other.name) if vocab.has(other.name) else None
                if (
                    kinds == ("object", "numeric")
                    and hasattr(other.args[1], "name")
                    and hasattr(var, "name")
                    and other.args[1].name == var.name
                ):
                    sort_var = other.args[0]
                    sort = (
                        var_sorts.get(sort_var.name)
                        if hasattr(sort_var, "name")
                        else vocab.canonical_sort(str(sort_var))
                    )
                    owner = (sort, other.name)
            if owner is None or owner[0] is None:
                raise GenerationError(f"cannot trace comparison {atom} to a sort attribute")
            if atom.negated:
                raise GenerationError("negated comparisons are not supported in gold rules")
            lo, hi = bounds.setdefault(owner, [None, None])
            if name == "greater":
                bounds[owner][0] = max(alpha, lo) if lo is not None else alpha
            else:
                bounds[owner][1] = min(alpha, hi) if hi is not None else alpha
        elif name == "overlap":
            s1 = var_sorts.get(atom.args[0].name) if hasattr(atom.args[0], "name") else None
            s2 = var_sorts.get(atom.args[1].name) if hasattr(atom.args[1], "name") else None
            if atom.negated:
                forbid_overlap = True
            elif s1 and s2:
                req_overlap.add((s1, s2))
                req_sorts.update((s1, s2))
            else:
                raise GenerationError(f"cannot generate overlap {atom}: untyped variables")
        elif vocab.has(name) and vocab.kinds(name) == ("object", "numeric"):
            continue  # numeric chain link; handled with its comparison
        else:
            raise GenerationError(f"cannot generate from atom {atom}")
    return req_sorts, forb_sorts, req_attr, forb_attr, bounds, req_overlap, forbid_overlap


def _mentioned_sorts(rules: RuleSet, spec: GeneratorSpec, vocab: PredicateVocabulary) -> set[str]:
    sorts: set[str] = set()
    for rule in rules:
        for clause in rule.clauses:
            for atom in clause.atoms:
                if atom.name == "object" and isinstance(atom.args[1], str):
                    sorts.add(vocab.canonical_sort(atom.args[1]))
                elif vocab.is_sort_predicate(atom.name):
                    sorts.add(vocab.canonical_sort(atom.name))
    return sorts


def generate_synthetic(spec: GeneratorSpec) -> tuple[Dataset, GoldSpec]:
    """Sample a dataset whose records each satisfy exactly their gold rule
    (before noise), plus the matching gold specification."""
    vocab = _build_vocab(spec)
    rules = parse_ruleset(spec.rules, vocab)
    if set(rules.labels) != set(spec.labels):
        raise GenerationError("gold rules do not cover exactly the spec labels")
    rng = np.random.default_rng(spec.seed)
    mentioned = _mentioned_sorts(rules, spec, vocab)
    ambient = [s for s in spec.ambient_sorts if s not in mentioned]

    label_seq = [spec.labels[i % len(spec.labels)] for i in range(spec.pool_size)]
    rng.shuffle(label_seq)

    objs: list[dict] = []
    for i, label in enumerate(label_seq):
        rid = f"r{i:04d}"
        scene = _sample_scene(label, rules, spec, vocab, rng, mentioned, ambient)
        if spec.noise_rate > 0 and rng.random() < spec.noise_rate:
            _corrupt(scene, spec, vocab, rng, mentioned)
        objs.append(scene.to_obj(rid, label))

    text = "\n".join(json.dumps(o, sort_keys=False) for o in objs) + "\n"
    dataset = parse_dataset(text, vocab)
    gold = GoldSpec.from_text(spec.rules, dataset)
    return dataset, gold


def _sample_scene(label, rules, spec, vocab, rng, mentioned, ambient) -> "_Scene":
    rule = rules.get(label)
    others = [rules.get(l) for l in rules.labels if l != label]
    for _attempt in range(spec.max_attempts):
        clause = rule.clauses[int(rng.integers(len(rule.clauses)))]
        try:
            req_s, forb_s, req_a, forb_a, bounds, req_ov, no_ov = _clause_requirements(
                clause, spec, vocab
            )
        except GenerationError:
            raise
        if req_s & forb_s:
            continue
        scene = _Scene()
        lo_i, hi_i = spec.instance_range
        for sort in sorted(req_s):
            scene.sorts[sort] = int(rng.integers(lo_i, hi_i + 1))
        for sort in ambient:
            if len([s for s in scene.sorts if s in ambient]) >= spec.max_ambient:
                break
            if rng.random() < 0.5:
                scene.sorts[sort] = int(rng.integers(lo_i, hi_i + 1))
        for attr, values in sorted(spec.categorical_attrs.items()):
            if attr in req_a:
                scene.attr_values[attr] = req_a[attr]
            else:
                allowed = [v for v in values if v not in forb_a.get(attr, ())]
                if not allowed:
                    break
                scene.attr_values[attr] = str(allowed[int(rng.integers(len(allowed)))])
        for (sort, attr), (lo, hi) in sorted(spec.numeric_ranges.items()):
            if sort in forb_s:
                continue
            b = bounds.get((sort, attr), [None, None])
            required = (sort, attr) in bounds
            if not required and sort not in scene.sorts:
                # Unconstrained by this clause: present sometimes, so other
                # labels' thresholds stay contrastive. Rejection below keeps
                # exclusivity intact.
                if rng.random() >= 0.4:
                    continue
            lo_eff = lo if b[0] is None else max(lo, b[0])
            hi_eff = hi if b[1] is None else min(hi, b[1])
            if lo_eff >= hi_eff:
                raise GenerationError(
                    f"empty numeric interval for {sort}.{attr} in label {label!r}"
                )
            if attr == "num":
                start = int(np.ceil(lo_eff)) if b[0] is None else int(np.floor(lo_eff)) + 1
                stop = int(np.floor(hi_eff)) if b[1] is None else int(np.ceil(hi_eff)) - 1
                if start > stop:
                    raise GenerationError(
                        f"empty integer interval for {sort}.num in label {label!r}"
                    )
                value = float(rng.integers(start, stop + 1))
                scene.sorts[sort] = int(value)
            else:
                value = float(rng.uniform(lo_eff, hi_eff))
            scene.numeric[(sort, attr)] = value
            scene.sorts.setdefault(sort, 1)
        if not no_ov:
            for s1, s2 in sorted(req_ov):
                scene.overlaps.add((s1, s2))

        record = _scene_record(scene, vocab)
        if rule_satisfied(record, rule, vocab) and not any(
            rule_satisfied(record, o, vocab) for o in others
        ):
            return scene
    raise GenerationError(
        f"could not sample a record for label {label!r}: gold rules may overlap"
    )


def _scene_record(scene: "_Scene", vocab: PredicateVocabulary):
    obj = scene.to_obj("probe", None)
    text = json.dumps(obj)
    return parse_dataset(text, vocab).records[0]


def _corrupt(scene, spec, vocab, rng, mentioned) -> None:
    """One random label-breaking mutation; the record keeps its gold label."""
    moves = []
    present_mentioned = [s for s in scene.sorts if s in mentioned]
    absent_mentioned = [s for s in sorted(mentioned) if s not in scene.sorts]
    if present_mentioned:
        moves.append("drop_sort")
    if absent_mentioned:
        moves.append("add_sort")
    if scene.attr_values:
        moves.append("flip_attr")
    if scene.numeric:
        moves.append("jitter")
    if not moves:
        return
    move = moves[int(rng.integers(len(moves)))]
    if move == "drop_sort":
        victim = present_mentioned[int(rng.integers(len(present_mentioned)))]
        del scene.sorts[victim]
        scene.numeric = {k: v for k, v in scene.numeric.items() if k[0] != victim}
    elif move == "add_sort":
        lo_i, hi_i = spec.instance_range
        scene.sorts[absent_mentioned[int(rng.integers(len(absent_mentioned)))]] = int(
            rng.integers(lo_i, hi_i + 1)
        )
    elif move == "flip_attr":
        attrs = sorted(scene.attr_values)
        attr = attrs[int(rng.integers(len(attrs)))]
        values = [v for v in spec.categorical_attrs.get(attr, ()) if v != scene.attr_values[attr]]
        if values:
            scene.attr_values[attr] = values[int(rng.integers(len(values)))]
    elif move == "jitter":
        keys = sorted(scene.numeric)
        key = keys[int(rng.integers(len(keys)))]
        lo, hi = spec.numeric_ranges.get(key, (0.0, 1.0))
        scene.numeric[key] = float(rng.uniform(lo, hi))


def audit_exclusive(dataset: Dataset, gold: GoldSpec) -> float:
    """Fraction of records satisfying exactly their own gold rule."""
    vocab = dataset.vocabulary
    ok = 0
    for r in dataset.records:
        if r.label is None:
            continue
        own = rule_satisfied(r, gold.gold_rules.get(r.label), vocab)
        other = any(
            rule_satisfied(r, gold.gold_rules.get(l), vocab)
            for l in gold.gold_rules.labels
            if l != r.label
        )
        ok += own and not other
    labeled = sum(1 for r in dataset.records if r.label is not None)
    return ok / labeled if labeled else 1.0


def write_task(spec: GeneratorSpec, out_dir) -> tuple[Dataset, GoldSpec]:
    """Generate and persist dataset.jsonl, gold_rules.dsl, vocabulary.json, spec.json."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset, gold = generate_synthetic(spec)
    (out / "dataset.jsonl").write_text(serialize_dataset(dataset))
    (out / "gold_rules.dsl").write_text(print_ruleset(gold.gold_rules) + "\n")
    (out / "vocabulary.json").write_text(_build_vocab(spec).to_json() + "\n")
    (out / "spec.json").write_text(spec.to_json() + "\n")
    return dataset, gold


# --- task presets used by the experiment suite ---

def traffic_task(seed: int = 0, pool_size: int = 90, noise_rate: float = 0.0) -> GeneratorSpec:
    """Three road-scene labels; one label hinges on a truck-count threshold,
    one on characteristic objects, one on absences."""
    rules = "\n".join(
        [
            "downtown(X) :- object(X,building).",
            "mountain_road(X) :- object(X,mountain) ; object(X,rock).",
            "highway(X) :- truck(X,A), num(A,N), greater(N,5) ;"
            " !object(X,building), !object(X,mountain), !object(X,rock), object(X,road).",
        ]
    )
    return GeneratorSpec(
        labels=("downtown", "mountain_road", "highway"),
        rules=rules,
        pool_size=pool_size,
        seed=seed,
        noise_rate=noise_rate,
        ambient_sorts=("road", "car", "sky", "tree", "sign", "person", "bus"),
        max_ambient=4,
        instance_range=(1, 4),
        numeric_ranges={("truck", "num"): (1.0, 9.0)},
    )


def glaucoma_task(seed: int = 0, pool_size: int = 60, noise_rate: float = 0.0) -> GeneratorSpec:
    """Two labels split by a single anatomical area ratio."""
    rules = "\n".join(
        [
            "normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.31).",
            "glaucoma(X) :- ACDR(X,A), area(A,N), greater(N,0.31).",
        ]
    )
    return GeneratorSpec(
        labels=("normal", "glaucoma"),
        rules=rules,
        pool_size=pool_size,
        seed=seed,
        noise_rate=noise_rate,
        instance_range=(1, 1),
        numeric_ranges={("ACDR", "area"): (0.05, 0.75)},
    )


def bird_task(seed: int = 0, pool_size: int = 96, noise_rate: float = 0.0) -> GeneratorSpec:
    """Three species told apart by wing/tail/crown colour combinations; the
    first label's gold rule needs eight clauses."""
    wings = [f"w{i}" for i in range(8)]
    tails = ["t0", "t1"]
    crowns = ["c0", "c1"]
    a_clauses = [
        f"has_wing_color(X,{wings[i]}), has_tail_color(X,{tails[i % 2]})" for i in range(8)
    ]
    b_clauses = [
        f"has_wing_color(X,{wings[i]}), has_tail_color(X,{tails[1 - i % 2]}), has_crown_color(X,c0)"
        for i in range(8)
    ]
    c_clauses = [
        f"has_wing_color(X,{wings[i]}), has_tail_color(X,{tails[1 - i % 2]}), has_crown_color(X,c1)"
        for i in range(8)
    ]
    rules = "\n".join(
        [
            f"warbler_a(X) :- {' ; '.join(a_clauses)}.",
            f"warbler_b(X) :- {' ; '.join(b_clauses)}.",
            f"warbler_c(X) :- {' ; '.join(c_clauses)}.",
        ]
    )
    return GeneratorSpec(
        labels=("warbler_a", "warbler_b", "warbler_c"),
        rules=rules,
        pool_size=pool_size,
        seed=seed,
        noise_rate=noise_rate,
        categorical_attrs={
            "has_wing_color": tuple(wings),
            "has_tail_color": tuple(tails),
            "has_crown_color": tuple(crowns),
        },
    )


def traffic_selection_task(
    seed: int = 0, pool_size: int = 120, noise_rate: float = 0.0
) -> GeneratorSpec:
    """Selection-strategy benchmark: each scene label is a disjunction over
    four marker objects, so records whose marker the learner has not yet seen
    are exactly the conflicted, mislabeled ones. Rules stay imperfect for
    many iterations, which is what separates selection strategies."""
    markers = {
        "downtown": (
            "skyscraper", "office", "shop", "plaza", "tram", "fountain",
            "billboard", "crosswalk", "cafe", "statue", "theater", "subway",
        ),
        "highway": (
            "bridge", "toll", "barrier", "ramp", "overpass", "rest_stop",
            "divider", "exit_sign", "gantry", "shoulder", "underpass", "guardrail",
        ),
        "mountain_road": (
            "cliff", "pine", "boulder", "trail", "waterfall", "ridge",
            "tunnel", "switchback", "scree", "summit", "gorge", "cairn",
        ),
    }
    rules = "\n".join(
        f"{label}(X) :- " + " ; ".join(f"object(X,{m})" for m in ms) + "."
        for label, ms in markers.items()
    )
    return GeneratorSpec(
        labels=tuple(markers),
        rules=rules,
        pool_size=pool_size,
        seed=seed,
        noise_rate=noise_rate,
        ambient_sorts=("road", "car", "sky", "tree", "sign", "person"),
        max_ambient=4,
        instance_range=(1, 4),
    )


def random_recovery_task(seed: int) -> GeneratorSpec:
    """Randomized planted task in the rule-recovery regime: 2-3 labels,
    5-15 object sorts, one numeric attribute."""
    rng = np.random.default_rng(seed)
    n_labels = int(rng.integers(2, 4))
    n_sorts = int(rng.integers(5, 16))
    sorts = [f"s{i}" for i in range(n_sorts)]
    labels = [f"l{i}" for i in range(n_labels)]
    use_numeric = bool(rng.integers(0, 2)) or n_labels == 2
    rules = []
    numeric_ranges = {}
    if use_numeric and n_labels == 2:
        cut = round(float(rng.uniform(0.3, 0.7)), 2)
        rules.append(f"{labels[0]}(X) :- {sorts[0]}(X,A), area(A,N), smaller(N,{cut}).")
        rules.append(f"{labels[1]}(X) :- {sorts[0]}(X,A), area(A,N), greater(N,{cut}).")
        numeric_ranges[(sorts[0], "area")] = (0.05, 0.95)
        ambient = tuple(sorts[1:])
    else:
        # Each label claims its own discriminating sorts; the last label may
        # instead be defined by absences.
        per_label = 2 if n_sorts >= 2 * n_labels else 1
        discr = sorts[: per_label * n_labels]
        for i, label in enumerate(labels):
            own = discr[per_label * i : per_label * (i + 1)]
            if per_label == 2 and i == n_labels - 1 and rng.random() < 0.5:
                negs = ", ".join(f"!object(X,{d})" for d in discr[: per_label * i])
                rules.append(f"{label}(X) :- {negs}, object(X,{own[0]}) ; object(X,{own[1]}).")
            elif per_label == 2:
                rules.append(f"{label}(X) :- object(X,{own[0]}) ; object(X,{own[1]}).")
            else:
                rules.append(f"{label}(X) :- object(X,{own[0]}).")
        ambient = tuple(sorts[per_label * n_labels :])
    return GeneratorSpec(
        labels=tuple(labels),
        rules="\n".join(rules),
        pool_size=72,
        seed=seed,
        ambient_sorts=ambient,
        max_ambient=min(4, len(ambient)),
        instance_range=(1, 3),
        numeric_ranges=numeric_ranges,
    )
