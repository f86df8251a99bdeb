"""Value-level reinforcement factors of ordinal attributes with permutation nulls.

For an attribute ``A`` every row ``R`` is paired with its nearest neighbours
``S`` (its context). When ``A(S) > A(R)`` an upward event is recorded at
value ``A(S)``, successful when the response also went up. When
``A(S) < A(R)`` a downward event is recorded at value ``A(R)``, successful
when the response went down. Reinforcement of a cell is its success rate.
Significance comes from re-running the counts after shuffling column ``A``.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .dataset import MISSING, OrdinalDataset, class_conditional, distance_matrix

SCHEMA_VERSION = 1


class Direction(str, enum.Enum):
    UP = "UP"
    DOWN = "DOWN"


class StepRule(str, enum.Enum):
    """Which attribute changes count as events.

    ENDPOINT credits any jump to its upper value; ADJACENT keeps only
    one-code changes.
    """

    ENDPOINT = "endpoint"
    ADJACENT = "adjacent"


@dataclass(frozen=True)
class OrdEvalParams:
    context_size: int | None = None  # None: min(n - 1, 30)
    bootstrap: int = 200
    alpha: float = 0.05
    min_support: int = 5
    seed: int = 0
    exclude_evaluated_attribute: bool = True
    step_rule: StepRule = StepRule.ADJACENT
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "step_rule", StepRule(self.step_rule))
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.bootstrap < 0:
            raise ValueError("bootstrap must be >= 0")
        if 0 < self.bootstrap < 50:
            raise ValueError("at least 50 bootstrap replicates are needed for significance")
        if self.context_size is not None and self.context_size < 1:
            raise ValueError("context_size must be >= 1")
        if self.min_support < 1:
            raise ValueError("min_support must be >= 1")

    def resolved_k(self, n_rows: int) -> int:
        k = min(n_rows - 1, 30) if self.context_size is None else self.context_size
        return max(1, min(k, n_rows - 1))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["step_rule"] = self.step_rule.value
        del d["n_jobs"]  # scheduling never changes results
        return d


@dataclass(frozen=True)
class NullBox:
    """Quantiles of a cell's permutation distribution.

    ``q025`` and ``q975`` are the whisker quantiles ``alpha/2`` and
    ``1 - alpha/2`` (2.5% and 97.5% at the default alpha).
    """

    q025: float
    q25: float
    median: float
    q75: float
    q975: float
    mean: float = 0.0
    std: float = 0.0
    samples: int = 0

    @classmethod
    def from_samples(cls, samples: np.ndarray, alpha: float) -> "NullBox | None":
        samples = samples[~np.isnan(samples)]
        if samples.size == 0:
            return None
        q = np.quantile(samples, [alpha / 2, 0.25, 0.5, 0.75, 1 - alpha / 2])
        return cls(
            *(float(x) for x in q),
            mean=float(samples.mean()),
            std=float(samples.std(ddof=1)) if samples.size > 1 else 0.0,
            samples=int(samples.size),
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ReinforcementCell:
    direction: Direction
    value: int
    probability: float | None
    success_count: int
    event_count: int
    anti_count: int
    anti_probability: float | None
    null_box: NullBox | None = None
    anti_null_box: NullBox | None = None
    significant: bool = False
    anti_significant: bool = False

    @property
    def defined(self) -> bool:
        return self.probability is not None

    @property
    def reinforcing(self) -> bool:
        """Alias of ``significant``: the change pushes the response along beyond chance."""
        return self.significant

    @property
    def below_null(self) -> bool:
        """Probability under the lower whisker; reported, never counted as evidence."""
        return self.defined and self.null_box is not None and self.probability < self.null_box.q025

    def to_dict(self) -> dict:
        return {
            "direction": self.direction.value,
            "value": self.value,
            "probability": self.probability,
            "success": self.success_count,
            "events": self.event_count,
            "anti": self.anti_count,
            "anti_probability": self.anti_probability,
            "null_box": None if self.null_box is None else self.null_box.to_dict(),
            "anti_null_box": None if self.anti_null_box is None else self.anti_null_box.to_dict(),
            "significant": self.significant,
            "anti_significant": self.anti_significant,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReinforcementCell":
        box = d.get("null_box")
        anti_box = d.get("anti_null_box")
        return cls(
            direction=Direction(d["direction"]),
            value=int(d["value"]),
            probability=d["probability"],
            success_count=int(d["success"]),
            event_count=int(d["events"]),
            anti_count=int(d.get("anti", 0)),
            anti_probability=d.get("anti_probability"),
            null_box=None if box is None else NullBox(**box),
            anti_null_box=None if anti_box is None else NullBox(**anti_box),
            significant=bool(d["significant"]),
            anti_significant=bool(d.get("anti_significant", False)),
        )


@dataclass(frozen=True)
class ReinforcementProfile:
    attribute: str
    scale: int
    cells: tuple[ReinforcementCell, ...]
    base_rates: dict
    params: dict = field(default_factory=dict)
    omnibus_p: float | None = None

    def cell(self, direction: Direction | str, value: int) -> ReinforcementCell:
        direction = Direction(direction)
        for c in self.cells:
            if c.direction is direction and c.value == value:
                return c
        raise KeyError((direction, value))

    def significant_cells(self) -> list[ReinforcementCell]:
        return [c for c in self.cells if c.significant]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "attribute": self.attribute,
            "scale": self.scale,
            "base_rates": dict(self.base_rates),
            "omnibus_p": self.omnibus_p,
            "params": dict(self.params),
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReinforcementProfile":
        return cls(
            attribute=d["attribute"],
            scale=int(d["scale"]),
            cells=tuple(ReinforcementCell.from_dict(c) for c in d["cells"]),
            base_rates=dict(d["base_rates"]),
            params=dict(d.get("params", {})),
            omnibus_p=d.get("omnibus_p"),
        )


@dataclass(frozen=True)
class ReinforcementCounts:
    """Raw event tallies indexed by attribute code (index 0 and 1 unused)."""

    up_events: np.ndarray
    up_success: np.ndarray
    up_anti: np.ndarray
    down_events: np.ndarray
    down_success: np.ndarray
    down_anti: np.ndarray
    base_up: float
    base_down: float
    pairs: int

    def as_dict(self) -> dict:
        return {
            name: getattr(self, name).tolist()
            for name in ("up_events", "up_success", "up_anti", "down_events", "down_success", "down_anti")
        }


# ---------------------------------------------------------------------------
# contexts and counts
# ---------------------------------------------------------------------------

def context_mask(dist: np.ndarray, k: int) -> np.ndarray:
    """Boolean ``(n, n)`` mask: row ``r`` marks its ``k`` nearest other rows, ties at the k-th included."""
    n = dist.shape[0]
    k = max(1, min(k, n - 1))
    d = dist.astype(float, copy=True)
    np.fill_diagonal(d, np.inf)
    kth = np.partition(d, k - 1, axis=1)[:, k - 1]
    mask = d <= kth[:, None]
    np.fill_diagonal(mask, False)
    return mask


def context_pairs(dataset: OrdinalDataset, attribute: int, params: OrdEvalParams) -> tuple[np.ndarray, np.ndarray]:
    """Ordered ``(pivot, neighbour)`` index arrays over all pivots."""
    exclude = attribute if params.exclude_evaluated_attribute else None
    dist = distance_matrix(dataset, class_conditional(dataset), exclude=exclude)
    mask = context_mask(dist, params.resolved_k(dataset.n_rows))
    return np.nonzero(mask)


def nearest_context(
    dataset: OrdinalDataset, pivot: int, attribute: int, params: OrdEvalParams
) -> np.ndarray:
    """Sorted row indices forming the context of ``pivot`` when evaluating ``attribute``."""
    exclude = attribute if params.exclude_evaluated_attribute else None
    dist = distance_matrix(dataset, class_conditional(dataset), exclude=exclude)
    mask = context_mask(dist, params.resolved_k(dataset.n_rows))
    return np.flatnonzero(mask[pivot])


def _tally(
    col: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    scale: int,
    step_rule: StepRule,
) -> tuple[np.ndarray, ...]:
    a_r, a_s = col[rows], col[cols]
    y_r, y_s = y[rows], y[cols]
    valid = (a_r != MISSING) & (a_s != MISSING)
    if step_rule is StepRule.ADJACENT:
        up = valid & (a_s - a_r == 1)
        down = valid & (a_r - a_s == 1)
    else:
        up = valid & (a_s > a_r)
        down = valid & (a_s < a_r)
    size = scale + 1
    up_v, down_v = a_s[up], a_r[down]
    return (
        np.bincount(up_v, minlength=size),
        np.bincount(up_v, weights=y_s[up] > y_r[up], minlength=size).astype(np.int64),
        np.bincount(up_v, weights=y_s[up] < y_r[up], minlength=size).astype(np.int64),
        np.bincount(down_v, minlength=size),
        np.bincount(down_v, weights=y_s[down] < y_r[down], minlength=size).astype(np.int64),
        np.bincount(down_v, weights=y_s[down] > y_r[down], minlength=size).astype(np.int64),
    )


def compute_reinforcements(
    dataset: OrdinalDataset,
    attribute: int | str,
    params: OrdEvalParams | None = None,
    pairs: tuple[np.ndarray, np.ndarray] | None = None,
) -> ReinforcementCounts:
    """Success, anti-success and event counts per direction and value.

    Base rates are the shares of context pairs whose response went up
    (respectively down), irrespective of the attribute.
    """
    params = params or OrdEvalParams()
    a = dataset.attribute_index(attribute)
    if pairs is None:
        pairs = context_pairs(dataset, a, params)
    rows, cols = pairs
    scale = dataset.attribute_scales[a].max_code
    counts = _tally(dataset.cells[:, a], dataset.response, rows, cols, scale, params.step_rule)
    y = dataset.response
    n_pairs = rows.size
    base_up = float(np.count_nonzero(y[cols] > y[rows]) / n_pairs) if n_pairs else 0.0
    base_down = float(np.count_nonzero(y[cols] < y[rows]) / n_pairs) if n_pairs else 0.0
    return ReinforcementCounts(*counts, base_up=base_up, base_down=base_down, pairs=int(n_pairs))


def _rates(success: np.ndarray, events: np.ndarray, min_support: int) -> np.ndarray:
    out = np.full(events.shape, np.nan)
    ok = events >= min_support
    out[ok] = success[ok] / events[ok]
    return out


# ---------------------------------------------------------------------------
# permutation null
# ---------------------------------------------------------------------------

def attribute_seed(seed: int, attribute: int) -> np.random.SeedSequence:
    """RNG stream for one attribute, derived from the master seed."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(int(attribute),))


def permuted_column(col: np.ndarray, seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Uniform random shuffle of ``col``; its value histogram is unchanged."""
    return np.random.default_rng(seed_seq).permutation(col)


def _replicate_rates(
    dataset: OrdinalDataset,
    a: int,
    params: OrdEvalParams,
    pairs: tuple[np.ndarray, np.ndarray],
    seed_seq: np.random.SeedSequence,
) -> np.ndarray:
    """Rates of one shuffled replicate, shape ``(4, s + 1)``: up, down, up-anti, down-anti."""
    col = permuted_column(dataset.cells[:, a], seed_seq)
    if not params.exclude_evaluated_attribute:
        pairs = context_pairs(dataset.with_column(a, col), a, params)
    scale = dataset.attribute_scales[a].max_code
    ue, us, ua, de, ds, da = _tally(col, dataset.response, *pairs, scale, params.step_rule)
    m = params.min_support
    return np.stack([_rates(us, ue, m), _rates(ds, de, m), _rates(ua, ue, m), _rates(da, de, m)])


def null_distribution(
    dataset: OrdinalDataset,
    attribute: int | str,
    params: OrdEvalParams | None = None,
    pairs: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Reinforcement rates under random shuffles of the attribute column.

    Returns an array of shape ``(B, 4, s + 1)`` holding, per replicate, the
    up, down, up-anti and down-anti rates by value (NaN where undefined).
    Replicate ``b`` draws from its own stream, so results do not depend on
    ``n_jobs``.
    """
    params = params or OrdEvalParams()
    a = dataset.attribute_index(attribute)
    if pairs is None:
        pairs = context_pairs(dataset, a, params)
    streams = attribute_seed(params.seed, a).spawn(params.bootstrap)

    def run(seq):
        return _replicate_rates(dataset, a, params, pairs, seq)

    scale = dataset.attribute_scales[a].max_code
    if params.bootstrap == 0:
        return np.empty((0, 4, scale + 1))
    if params.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            reps = list(pool.map(run, streams))
    else:
        reps = [run(s) for s in streams]
    return np.stack(reps)


def omnibus_p_value(observed: np.ndarray, nulls: np.ndarray) -> float | None:
    """Permutation p-value that any cell reinforces more than chance.

    ``observed`` holds the ``(4, s + 1)`` rates of the real column and
    ``nulls`` the ``(B, 4, s + 1)`` shuffled rates. Each rate is standardized
    by its null mean and spread, and the statistic sums squared positive
    z-scores over the cells defined in ``observed``. Comparing against the
    same statistic on every replicate accounts for the correlation between
    cells.
    """
    if nulls.shape[0] == 0:
        return None
    observed = observed[:, 2:]
    nulls = nulls[:, :, 2:]
    usable = ~np.isnan(observed) & (np.sum(~np.isnan(nulls), axis=0) >= 2)
    if not usable.any():
        return None
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.nanmean(np.where(usable, nulls, 0.0), axis=0)
        std = np.nanstd(np.where(usable, nulls, 0.0), axis=0, ddof=1)
    std = np.where(std > 0, std, np.inf)

    def stat(rates):
        z = np.where(usable, (rates - mean) / std, 0.0)
        z = np.nan_to_num(z, nan=0.0)
        return np.sum(np.clip(z, 0.0, None) ** 2, axis=(-2, -1))

    t_obs = stat(observed)
    t_null = stat(nulls)
    return float((1 + np.count_nonzero(t_null >= t_obs)) / (1 + t_null.size))


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def _beyond(p: float | None, box: NullBox | None) -> bool:
    """Bar stretches past the upper whisker of its null box."""
    return p is not None and box is not None and p > box.q975


def evaluate_attribute(
    dataset: OrdinalDataset,
    attribute: int | str,
    params: OrdEvalParams | None = None,
) -> ReinforcementProfile:
    """Reinforcement profile of one attribute: rates, null boxes and significance."""
    params = params or OrdEvalParams()
    a = dataset.attribute_index(attribute)
    pairs = context_pairs(dataset, a, params)
    counts = compute_reinforcements(dataset, a, params, pairs)
    nulls = null_distribution(dataset, a, params, pairs)
    scale = dataset.attribute_scales[a].max_code
    m = params.min_support
    observed = np.stack([
        _rates(counts.up_success, counts.up_events, m),
        _rates(counts.down_success, counts.down_events, m),
        _rates(counts.up_anti, counts.up_events, m),
        _rates(counts.down_anti, counts.down_events, m),
    ])

    cells = []
    for v in range(2, scale + 1):
        for direction, events, success, anti, idx in (
            (Direction.UP, counts.up_events, counts.up_success, counts.up_anti, 0),
            (Direction.DOWN, counts.down_events, counts.down_success, counts.down_anti, 1),
        ):
            e = int(events[v])
            prob = float(success[v] / e) if e >= m else None
            anti_prob = float(anti[v] / e) if e >= m else None
            box = NullBox.from_samples(nulls[:, idx, v], params.alpha) if nulls.size else None
            anti_box = NullBox.from_samples(nulls[:, idx + 2, v], params.alpha) if nulls.size else None
            anti_sig = _beyond(anti_prob, anti_box)
            cells.append(
                ReinforcementCell(
                    direction=direction,
                    value=v,
                    probability=prob,
                    success_count=int(success[v]),
                    event_count=e,
                    anti_count=int(anti[v]),
                    anti_probability=anti_prob,
                    null_box=box,
                    anti_null_box=anti_box,
                    significant=_beyond(prob, box),
                    anti_significant=anti_sig,
                )
            )
    return ReinforcementProfile(
        attribute=dataset.attribute_names[a],
        scale=scale,
        cells=tuple(cells),
        base_rates={"up": counts.base_up, "down": counts.base_down},
        params=params.to_dict(),
        omnibus_p=omnibus_p_value(observed, nulls),
    )


def evaluate_all(dataset: OrdinalDataset, params: OrdEvalParams | None = None) -> list[ReinforcementProfile]:
    """Profiles of every attribute in declaration order.

    Each attribute draws from the stream ``attribute_seed(seed, index)``, so a
    profile equals the one from ``evaluate_attribute`` on the same index.
    """
    params = params or OrdEvalParams()
    indices = range(dataset.n_attributes)
    if params.n_jobs > 1 and dataset.n_attributes > 1:
        inner = replace(params, n_jobs=1)
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            return list(pool.map(lambda a: evaluate_attribute(dataset, a, inner), indices))
    return [evaluate_attribute(dataset, a, params) for a in indices]
