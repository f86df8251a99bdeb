from __future__ import annotations

import numpy as np
import pytest

from ordeval import (
    Direction,
    KanoCategory,
    KanoShape,
    NullBox,
    OrdinalDataset,
    OrdinalScale,
    ReinforcementCell,
    ReinforcementProfile,
    SyntheticPopulationSpec,
    load_csv,
)
from ordeval.synth import AttributeSpec

# Six respondents, two attributes on 1..3, response on 1..3, one missing cell.
SIX_ROW_CSV = b"""a,b,y
1,2,1
2,2,1
3,1,2
3,NA,2
1,3,3
2,1,3
"""


@pytest.fixture
def six_rows() -> OrdinalDataset:
    return load_csv(SIX_ROW_CSV, "y", scales={"a": 3, "b": 3}, response_scale=3)


@pytest.fixture
def eight_rows() -> OrdinalDataset:
    cells = np.array([
        [1, 4, 2], [2, 4, 0], [3, 1, 5], [4, 2, 5],
        [5, 3, 1], [2, 5, 3], [3, 3, 0], [1, 2, 4],
    ])
    y = np.array([1, 2, 2, 3, 3, 1, 2, 1])
    scales = (OrdinalScale(5),) * 3
    return OrdinalDataset(("p", "q", "r"), scales, OrdinalScale(3), cells, y)


def random_dataset(rng: np.random.Generator, n: int, a: int, scale: int = 7, missing: float = 0.0):
    cells = rng.integers(1, scale + 1, size=(n, a))
    if missing:
        cells[rng.random((n, a)) < missing] = 0
    y = rng.integers(1, scale + 1, size=n)
    if np.unique(y).size < 2:
        y[0], y[1] = 1, 2
    names = tuple(f"x{j}" for j in range(a))
    return OrdinalDataset(names, (OrdinalScale(scale),) * a, OrdinalScale(scale), cells, y)


NULL = NullBox(q025=0.2, q25=0.27, median=0.3, q75=0.33, q975=0.4, mean=0.3, std=0.05, samples=200)


def make_profile(
    reinforcing: dict[tuple[str, int], float] | None = None,
    anti: set[tuple[str, int]] = frozenset(),
    undefined: set[tuple[str, int]] = frozenset(),
    scale: int = 7,
    omnibus_p: float | None = 0.001,
    name: str = "attr",
) -> ReinforcementProfile:
    """Profile whose cells sit at the null median except the listed ones.

    ``reinforcing`` maps ``(direction, value)`` to a probability above the
    null's 97.5% whisker (0.4); ``anti`` marks cells with significant
    anti-reinforcement.
    """
    reinforcing = reinforcing or {}
    cells = []
    for v in range(2, scale + 1):
        for d in (Direction.UP, Direction.DOWN):
            key = (d.value, v)
            if key in undefined:
                cells.append(ReinforcementCell(d, v, None, 1, 2, 0, None, NULL, NULL))
                continue
            p = reinforcing.get(key, 0.3)
            is_anti = key in anti
            cells.append(ReinforcementCell(
                d, v, p, int(p * 100), 100, 90 if is_anti else 10, 0.9 if is_anti else 0.1,
                NULL, NULL, significant=p > NULL.q975, anti_significant=is_anti,
            ))
    return ReinforcementProfile(name, scale, tuple(cells), {"up": 0.3, "down": 0.3}, {}, omnibus_p)


def both(values, p=0.7) -> dict[tuple[str, int], float]:
    """UP and DOWN cells at each value, all with probability ``p``."""
    return {(d, v): p for v in values for d in ("UP", "DOWN")}


K = KanoCategory
FIVE_SHAPES = (
    AttributeSpec("must", KanoShape(K.MUST_BE, magnitude=2.0)),
    AttributeSpec("onedim", KanoShape(K.ONE_DIMENSIONAL, slope=1.0)),
    AttributeSpec("attr", KanoShape(K.ATTRACTIVE, magnitude=2.0)),
    AttributeSpec("indiff", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
    AttributeSpec("rev", KanoShape(K.REVERSE, slope=0.75)),
)


def five_category_spec(seed: int, n: int = 500, noise: float = 0.5) -> SyntheticPopulationSpec:
    return SyntheticPopulationSpec(n, FIVE_SHAPES, noise_sigma=noise, seed=seed)
