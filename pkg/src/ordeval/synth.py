"""Synthetic survey populations with known Kano behaviour.

Every attribute code is drawn uniformly. The response is the neutral
midpoint plus the weighted sum of each attribute's idealized Kano curve plus
Gaussian noise, rounded half-up and clamped to the response scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from .dataset import OrdinalDataset, OrdinalScale
from .kano import BASE_CATEGORIES, KanoCategory

SCHEMA_VERSION = 1

# subgroups lighter than this are noted but do not change the dominant category
MINORITY_WEIGHT = 0.1


class SpecError(ValueError):
    """Invalid population spec; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class KanoShape:
    """Idealized curve of one attribute.

    ``threshold`` is where MUST_BE stops hurting / ATTRACTIVE starts paying
    off; ``magnitude`` is the full height of that step. ``slope`` is the per-code
    change of the linear categories.
    """

    category: KanoCategory
    threshold: int | None = None
    slope: float = 1.0
    magnitude: float = 3.0
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "category", KanoCategory(self.category))
        if self.category is KanoCategory.MIXED:
            raise ValueError("a shape must use a base category, not MIXED")
        if self.weight < 0:
            raise ValueError("weight must be >= 0")

    def resolved_threshold(self, scale: int) -> int:
        if self.threshold is not None:
            return self.threshold
        return 3 if self.category is KanoCategory.MUST_BE else scale


def ideal_contribution(shape: KanoShape, value: int, scale: int = 7) -> float:
    """Satisfaction shift of ``value`` under ``shape``; 0 means neutral."""
    if not 1 <= value <= scale:
        raise ValueError(f"value {value} outside 1..{scale}")
    mid = (1 + scale) / 2
    cat = shape.category
    if cat is KanoCategory.INDIFFERENT_INCONCLUSIVE:
        return 0.0
    if cat is KanoCategory.ONE_DIMENSIONAL:
        return shape.slope * (value - mid)
    if cat is KanoCategory.REVERSE:
        return -shape.slope * (value - mid)
    t = shape.resolved_threshold(scale)
    if cat is KanoCategory.MUST_BE:
        if value >= t or t <= 1:
            return 0.0
        return -shape.magnitude * (t - value) / (t - 1)
    # ATTRACTIVE
    if value < t:
        return 0.0
    return shape.magnitude * (value - t + 1) / (scale - t + 1)


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    shape: KanoShape
    expected: KanoCategory | None = None  # overrides ground truth, for comparator checks


@dataclass(frozen=True)
class SubgroupSpec:
    weight: float
    overrides: Mapping[str, KanoShape] = field(default_factory=dict)


@dataclass(frozen=True)
class SyntheticPopulationSpec:
    n: int
    attributes: tuple[AttributeSpec, ...]
    scale: int = 7
    noise_sigma: float = 0.5
    subgroups: tuple[SubgroupSpec, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "subgroups", tuple(self.subgroups))
        validate_spec(self)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def effective_subgroups(self) -> tuple[SubgroupSpec, ...]:
        return self.subgroups or (SubgroupSpec(1.0),)

    def shapes(self, subgroup: SubgroupSpec) -> list[KanoShape]:
        return [subgroup.overrides.get(a.name, a.shape) for a in self.attributes]

    def with_seed(self, seed: int) -> "SyntheticPopulationSpec":
        return replace(self, seed=seed)

    # -- JSON ---------------------------------------------------------------

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SyntheticPopulationSpec":
        def shape_from(obj, path):
            if not isinstance(obj, Mapping):
                raise SpecError(path, "must be an object")
            try:
                cat = KanoCategory(obj["category"])
            except KeyError:
                raise SpecError(f"{path}.category", "required") from None
            except ValueError:
                raise SpecError(f"{path}.category", f"unknown category {obj['category']!r}") from None
            kwargs = {"category": cat}
            for key in ("threshold", "slope", "magnitude", "weight"):
                if key in obj and obj[key] is not None:
                    if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
                        raise SpecError(f"{path}.{key}", "must be a number")
                    kwargs[key] = obj[key]
            try:
                return KanoShape(**kwargs)
            except ValueError as exc:
                raise SpecError(path, str(exc)) from None

        if not isinstance(d, Mapping):
            raise SpecError("$", "spec must be a JSON object")
        for key in ("n", "attributes"):
            if key not in d:
                raise SpecError(key, "required")
        if not isinstance(d["n"], int) or isinstance(d["n"], bool):
            raise SpecError("n", "must be an integer")
        if not isinstance(d["attributes"], list):
            raise SpecError("attributes", "must be a list")
        attrs = []
        for i, a in enumerate(d["attributes"]):
            path = f"attributes[{i}]"
            if not isinstance(a, Mapping) or "name" not in a:
                raise SpecError(f"{path}.name", "required")
            expected = a.get("expected")
            if expected is not None:
                try:
                    expected = KanoCategory(expected)
                except ValueError:
                    raise SpecError(f"{path}.expected", f"unknown category {expected!r}") from None
            attrs.append(AttributeSpec(str(a["name"]), shape_from(a, path), expected))
        groups = []
        for i, g in enumerate(d.get("subgroups", []) or []):
            path = f"subgroups[{i}]"
            if not isinstance(g, Mapping) or "weight" not in g:
                raise SpecError(f"{path}.weight", "required")
            overrides = {
                name: shape_from(s, f"{path}.overrides.{name}")
                for name, s in (g.get("overrides") or {}).items()
            }
            groups.append(SubgroupSpec(float(g["weight"]), overrides))
        return cls(
            n=d["n"],
            attributes=tuple(attrs),
            scale=d.get("scale", 7),
            noise_sigma=d.get("noise_sigma", 0.5),
            subgroups=tuple(groups),
            seed=d.get("seed", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "SyntheticPopulationSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("$", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        def shape_dict(s: KanoShape) -> dict:
            return {
                "category": s.category.value,
                "threshold": s.threshold,
                "slope": s.slope,
                "magnitude": s.magnitude,
                "weight": s.weight,
            }

        attrs = []
        for a in self.attributes:
            item = {"name": a.name, **shape_dict(a.shape)}
            if a.expected is not None:
                item["expected"] = a.expected.value
            attrs.append(item)
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "scale": self.scale,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "attributes": attrs,
            "subgroups": [
                {"weight": g.weight, "overrides": {k: shape_dict(v) for k, v in g.overrides.items()}}
                for g in self.subgroups
            ],
        }


def validate_spec(spec: SyntheticPopulationSpec) -> None:
    if spec.n < 1:
        raise SpecError("n", "must be >= 1")
    if not spec.attributes:
        raise SpecError("attributes", "at least one attribute is required")
    if not isinstance(spec.scale, int) or spec.scale < 2:
        raise SpecError("scale", "must be an integer >= 2")
    if not spec.noise_sigma >= 0:
        raise SpecError("noise_sigma", "must be >= 0")
    names = [a.name for a in spec.attributes]
    if len(set(names)) != len(names):
        raise SpecError("attributes", "names must be unique")
    if "response" in names:
        raise SpecError("attributes", "'response' is reserved for the response column")

    def check_shape(shape: KanoShape, path: str):
        t = shape.threshold
        if t is not None and not 1 <= t <= spec.scale:
            raise SpecError(f"{path}.threshold", f"must lie in 1..{spec.scale}")

    for i, a in enumerate(spec.attributes):
        check_shape(a.shape, f"attributes[{i}]")
    if spec.subgroups:
        total = 0.0
        for i, g in enumerate(spec.subgroups):
            if not 0 < g.weight <= 1:
                raise SpecError(f"subgroups[{i}].weight", "must lie in (0, 1]")
            total += g.weight
            for name, shape in g.overrides.items():
                if name not in names:
                    raise SpecError(f"subgroups[{i}].overrides.{name}", "unknown attribute")
                check_shape(shape, f"subgroups[{i}].overrides.{name}")
        if abs(total - 1.0) > 1e-9:
            raise SpecError("subgroups", f"weights sum to {total}, expected 1")


def _normalized_weights(shapes: list[KanoShape]) -> np.ndarray:
    """Rescale weights to average 1, so a lone attribute keeps its own curve."""
    w = np.array([s.weight for s in shapes], dtype=float)
    total = w.sum()
    if total == 0:
        return w
    return w * len(w) / total


def generate_population(spec: SyntheticPopulationSpec) -> OrdinalDataset:
    """Draw a dataset from ``spec``; identical seeds give identical datasets."""
    rng = np.random.default_rng(spec.seed)
    s = spec.scale
    n, a = spec.n, len(spec.attributes)
    groups = spec.effective_subgroups()
    group_of = rng.choice(len(groups), size=n, p=[g.weight for g in groups])
    cells = rng.integers(1, s + 1, size=(n, a))
    noise = rng.normal(0.0, spec.noise_sigma, size=n) if spec.noise_sigma > 0 else np.zeros(n)

    latent = np.full(n, (1 + s) / 2)
    for gi, group in enumerate(groups):
        shapes = spec.shapes(group)
        weights = _normalized_weights(shapes)
        curves = np.array([[ideal_contribution(sh, v, s) for v in range(1, s + 1)] for sh in shapes])
        members = group_of == gi
        for j in range(a):
            latent[members] += weights[j] * curves[j, cells[members, j] - 1]
    response = np.clip(np.floor(latent + noise + 0.5), 1, s).astype(np.int64)
    if np.unique(response).size < 2:
        raise SpecError("$", "spec produces a constant response; add signal or noise")

    scale = OrdinalScale(s)
    return OrdinalDataset(
        spec.attribute_names,
        tuple(scale for _ in range(a)),
        scale,
        cells,
        response,
    )


@dataclass
class GroundTruth:
    attribute: str
    dominant: KanoCategory
    components: tuple[KanoCategory, ...] = ()
    per_subgroup: tuple[KanoCategory, ...] = ()
    notes: str = ""

    def to_dict(self) -> dict:
        d = {
            "attribute": self.attribute,
            "dominant": self.dominant.value,
            "per_subgroup": [c.value for c in self.per_subgroup],
            "notes": self.notes,
        }
        if self.dominant is KanoCategory.MIXED:
            d["mixed_components"] = [c.value for c in self.components]
        return d


def ground_truth(spec: SyntheticPopulationSpec) -> list[GroundTruth]:
    """Generating category of each attribute, per subgroup and population-wide.

    Subgroups below :data:`MINORITY_WEIGHT` are listed in ``notes`` only. If
    the remaining subgroups disagree the dominant category is MIXED.
    """
    groups = spec.effective_subgroups()
    out = []
    for j, attr in enumerate(spec.attributes):
        per = tuple(spec.shapes(g)[j].category for g in groups)
        major = [c for c, g in zip(per, groups) if g.weight >= MINORITY_WEIGHT]
        minor = sorted({c for c, g in zip(per, groups) if g.weight < MINORITY_WEIGHT} - set(major),
                       key=BASE_CATEGORIES.index)
        distinct = sorted(set(major), key=BASE_CATEGORIES.index)
        notes = ""
        if minor:
            notes = "minority subgroup: " + ", ".join(c.value for c in minor)
        if attr.expected is not None:
            out.append(GroundTruth(attr.name, attr.expected, (), per, "expected overridden by spec"))
        elif len(distinct) == 1:
            out.append(GroundTruth(attr.name, distinct[0], (), per, notes))
        else:
            out.append(GroundTruth(attr.name, KanoCategory.MIXED, tuple(distinct), per, notes))
    return out
