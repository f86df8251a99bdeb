"""ReliefF attribute relevance for an ordinal response treated as nominal classes."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dataset import OrdinalDataset, class_conditional, diff_rows, distance_matrix


@dataclass(frozen=True)
class ReliefFParams:
    k_neighbors: int = 10
    pivots: int | None = None  # None: every row is a pivot
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.pivots is not None and self.pivots < 1:
            raise ValueError("pivots must be >= 1 or None")


@dataclass
class AttributeScore:
    attribute: str
    score: float
    rank: int = 0

    def to_dict(self) -> dict:
        return {"attribute": self.attribute, "score": self.score, "rank": self.rank}


@dataclass
class ReliefFResult:
    """Scores in attribute declaration order plus run metadata."""

    scores: list[AttributeScore]
    params: ReliefFParams
    pivot_count: int
    k_effective: int
    skipped_hit_pivots: int = 0
    metadata: dict = field(default_factory=dict)

    def ranking(self) -> list[AttributeScore]:
        return sorted(self.scores, key=lambda s: s.rank)

    def score_of(self, attribute: str) -> float:
        for s in self.scores:
            if s.attribute == attribute:
                return s.score
        raise KeyError(attribute)

    def to_dict(self) -> dict:
        return {
            # n_jobs never changes the scores, so it stays out of the artifact
            "params": {k: v for k, v in asdict(self.params).items() if k != "n_jobs"},
            "pivot_count": self.pivot_count,
            "k_effective": self.k_effective,
            "skipped_hit_pivots": self.skipped_hit_pivots,
            "scores": [s.to_dict() for s in self.ranking()],
        }


def rank_attributes(scores: Iterable[AttributeScore]) -> list[AttributeScore]:
    """Sort by descending score, ties kept in declaration order, and fill ``rank``."""
    scores = list(scores)
    if not scores:
        raise ValueError("cannot rank an empty score list")
    ordered = sorted(scores, key=lambda s: -s.score)
    for r, s in enumerate(ordered, start=1):
        s.rank = r
    return ordered


def stable_sum(terms: np.ndarray, axis: int = 0) -> np.ndarray:
    """Sum that depends only on the multiset of terms, not their order."""
    return np.sort(terms, axis=axis).sum(axis=axis)


def neighbor_weights(dist: np.ndarray, k: int) -> np.ndarray:
    """Weights selecting the ``k`` nearest entries of ``dist``.

    Entries strictly closer than the k-th distance get weight 1; entries tied
    at the k-th distance share the remaining weight, so the total is exactly ``k``.
    """
    m = dist.size
    k = min(k, m)
    kth = np.partition(dist, k - 1)[k - 1]
    closer = dist < kth
    tied = dist == kth
    w = closer.astype(float)
    w[tied] = (k - closer.sum()) / tied.sum()
    return w


def _pivot_contribution(
    r: int,
    dist_row: np.ndarray,
    diffs: np.ndarray,
    y: np.ndarray,
    classes: np.ndarray,
    priors: dict[int, float],
    k: int,
) -> tuple[np.ndarray, bool]:
    """Weight update of one pivot, before division by the pivot count."""
    own = y[r]
    not_self = np.arange(y.size) != r
    n_attr = diffs.shape[1]
    miss_norm = 1.0 - priors[int(own)]
    parts = []
    skipped_hit = False
    for c in classes:
        members = np.flatnonzero((y == c) & not_self)
        if members.size == 0:
            if c == own:
                skipped_hit = True
            continue
        kk = min(k, members.size)
        w = neighbor_weights(dist_row[members], kk)
        mean_diff = stable_sum(w[:, None] * diffs[members]) / kk
        if c == own:
            parts.append(-mean_diff)
        else:
            parts.append(priors[int(c)] / miss_norm * mean_diff)
    if not parts:
        return np.zeros(n_attr), skipped_hit
    return stable_sum(np.array(parts)), skipped_hit


def relieff_scores(dataset: OrdinalDataset, params: ReliefFParams | None = None) -> ReliefFResult:
    """ReliefF relevance of every attribute for the response.

    Each response code is its own class. For every pivot the ``k`` nearest
    hits (same class) pull weights down by their diffs, and the ``k`` nearest
    misses of every other class push them up, weighted by that class's prior
    relative to all non-pivot classes. Neighbours tied at the k-th distance
    are all used with fractional weights. Scores are clamped to [-1, 1].
    """
    params = params or ReliefFParams()
    n = dataset.n_rows
    y = dataset.response
    classes = np.unique(y)
    priors = {int(c): float(np.mean(y == c)) for c in classes}
    table = class_conditional(dataset)
    dist = distance_matrix(dataset, table)
    k = min(params.k_neighbors, n - 1)

    if params.pivots is None or params.pivots >= n:
        pivots = np.arange(n)
    else:
        rng = np.random.default_rng(params.seed)
        pivots = np.sort(rng.choice(n, size=params.pivots, replace=False))

    def run(chunk: np.ndarray) -> list[tuple[np.ndarray, bool]]:
        out = []
        for r in chunk:
            diffs = np.stack(
                [diff_rows(dataset, table, np.array([r]), a)[0] for a in range(dataset.n_attributes)],
                axis=1,
            )
            out.append(_pivot_contribution(int(r), dist[r], diffs, y, classes, priors, k))
        return out

    if params.n_jobs > 1 and pivots.size > 1:
        chunks = np.array_split(pivots, params.n_jobs)
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            results = [item for part in pool.map(run, chunks) for item in part]
    else:
        results = run(pivots)

    contributions = np.array([c for c, _ in results]) / pivots.size
    skipped = sum(1 for _, s in results if s)
    weights = np.clip(stable_sum(contributions), -1.0, 1.0)

    scores = [AttributeScore(name, float(w)) for name, w in zip(dataset.attribute_names, weights)]
    rank_attributes(scores)
    return ReliefFResult(
        scores=scores,
        params=params,
        pivot_count=int(pivots.size),
        k_effective=k,
        skipped_hit_pivots=skipped,
        metadata={"classes": [int(c) for c in classes], "rows": n},
    )
