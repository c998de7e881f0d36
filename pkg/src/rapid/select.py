"""Multi-criteria batch selection for the labeling loop.

Records that conflict under the current rules (no rule fires, or several
do) score high; the top scorers are then clustered on object-count vectors
and one representative picked per cluster, so a batch is both informative
and diverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .data import AttributeRecord, FeatureVector, PredicateVocabulary, featurize
from .dsl import RuleSet
from .evaluate import ruleset_csrs


@dataclass(frozen=True)
class SelectionConfig:
    lam: float = 0.6
    m_intermediate: Optional[int] = None  # defaults to 3 * n_batch
    n_batch: int = 3
    strategy: str = "multi-criteria"
    seed: int = 0

    STRATEGIES = ("multi-criteria", "random", "informativeness-only", "diversity-only")

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.n_batch < 1:
            raise ValueError("n_batch must be >= 1")
        if self.m_intermediate is not None and self.m_intermediate < self.n_batch:
            raise ValueError("m_intermediate must be >= n_batch")
        if self.strategy not in self.STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    @property
    def m_effective(self) -> int:
        return self.m_intermediate if self.m_intermediate is not None else 3 * self.n_batch


@dataclass(frozen=True)
class ScoredRecord:
    record_id: str
    score: float
    n_labels: int  # number of rules the record satisfies
    u: float  # mean unsatisfaction of the unmet rules, in [0,1]


@dataclass(frozen=True)
class SelectionBatch:
    ids: tuple[str, ...]
    scored: Mapping[str, ScoredRecord]
    strategy: str


def informativeness(
    record: AttributeRecord,
    rules: RuleSet,
    lam: float = 0.6,
    vocab: Optional[PredicateVocabulary] = None,
) -> ScoredRecord:
    """Conflict score: 0 when exactly one rule fires, else lam * (#fired) plus
    how far the unfired rules are from firing."""
    if len(rules) == 0:
        raise ValueError("informativeness requires a non-empty rule set")
    csr = ruleset_csrs(record, rules, vocab)
    n_labels = sum(1 for v in csr.values() if v == 1.0)
    unsatisfied = [v for v in csr.values() if v != 1.0]
    u = 1.0 - sum(unsatisfied) / len(unsatisfied) if unsatisfied else 0.0
    score = 0.0 if n_labels == 1 else lam * n_labels + u
    return ScoredRecord(record_id=record.id, score=score, n_labels=n_labels, u=u)


def _normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return vectors / safe


def _kmeans(points: np.ndarray, k: int, seed: int, max_iter: int = 100) -> np.ndarray:
    """Seeded k-means++ on already-normalized points; returns assignments.
    Empty clusters are repaired by stealing the farthest point of a
    multi-member cluster, so exactly k clusters come back non-empty."""
    rng = np.random.default_rng(seed)
    n = len(points)
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[int(rng.integers(n))]
    for j in range(1, k):
        d2 = np.min(
            ((points[:, None, :] - centroids[None, :j, :]) ** 2).sum(axis=2), axis=1
        )
        total = float(d2.sum())
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = points[idx]

    assign = np.full(n, -1, dtype=int)
    for _it in range(max_iter):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(d2, axis=1)
        for j in range(k):
            if np.any(new_assign == j):
                continue
            counts = np.bincount(new_assign, minlength=k)
            donors = np.where(counts[new_assign] > 1)[0]
            own = d2[donors, new_assign[donors]]
            steal = donors[int(np.argmax(own))]
            new_assign[steal] = j
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = points[assign == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    return assign


def diversity_pick(
    candidates: Sequence[tuple[str, FeatureVector]],
    n: int,
    seed: int = 0,
) -> list[str]:
    """Cluster candidates into n groups (cosine geometry: unit-normalized
    k-means) and return each cluster's medoid id."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > len(candidates):
        raise ValueError(f"cannot pick {n} from {len(candidates)} candidates")
    ids = [rid for rid, _ in candidates]
    raw = np.stack([fv.as_array() for _, fv in candidates])
    points = _normalize_rows(raw)
    if n == len(candidates):
        return list(ids)
    assign = _kmeans(points, n, seed)
    centroids = np.stack([points[assign == j].mean(axis=0) for j in range(n)])
    picked = []
    for j in range(n):
        members = np.where(assign == j)[0]
        d2 = ((points[members] - centroids[j]) ** 2).sum(axis=1)
        order = sorted(zip(d2, (ids[i] for i in members)))
        picked.append(order[0][1])
    return picked


def select_batch(
    pool: Sequence[AttributeRecord],
    rules: RuleSet,
    config: SelectionConfig,
    dims: Optional[Sequence[str]] = None,
    vocab: Optional[PredicateVocabulary] = None,
) -> SelectionBatch:
    """Choose the next batch of records to inspect, per the configured strategy."""
    n = config.n_batch
    if len(pool) < n:
        raise ValueError(f"pool of {len(pool)} is smaller than batch size {n}")
    if dims is None:
        sorts = sorted(set().union(*[r.sorts_present() for r in pool]))
        dims = sorts if sorts else ["_none"]

    scored = {r.id: informativeness(r, rules, config.lam, vocab) for r in pool}
    by_rank = sorted(pool, key=lambda r: (-scored[r.id].score, r.id))

    if config.strategy == "informativeness-only":
        ids = tuple(r.id for r in by_rank[:n])
    elif config.strategy == "random":
        rng = np.random.default_rng(config.seed)
        all_ids = sorted(r.id for r in pool)
        ids = tuple(rng.choice(all_ids, size=n, replace=False))
    elif config.strategy == "diversity-only":
        cands = [(r.id, featurize(r, dims)) for r in sorted(pool, key=lambda r: r.id)]
        picked = set(diversity_pick(cands, n, config.seed))
        ids = tuple(r.id for r in by_rank if r.id in picked)
    else:  # multi-criteria
        m = min(config.m_effective, len(pool))
        top = by_rank[:m]
        cands = [(r.id, featurize(r, dims)) for r in top]
        picked = set(diversity_pick(cands, n, config.seed))
        ids = tuple(r.id for r in by_rank if r.id in picked)

    return SelectionBatch(
        ids=ids,
        scored={rid: scored[rid] for rid in ids},
        strategy=config.strategy,
    )
