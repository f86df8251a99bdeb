"""Kano quality categories inferred from reinforcement profiles."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from statistics import NormalDist

from .engine import Direction, ReinforcementProfile

SCHEMA_VERSION = 1


class KanoCategory(str, enum.Enum):
    MUST_BE = "MUST_BE"
    ONE_DIMENSIONAL = "ONE_DIMENSIONAL"
    ATTRACTIVE = "ATTRACTIVE"
    INDIFFERENT_INCONCLUSIVE = "INDIFFERENT_INCONCLUSIVE"
    REVERSE = "REVERSE"
    MIXED = "MIXED"


BASE_CATEGORIES = (
    KanoCategory.MUST_BE,
    KanoCategory.ONE_DIMENSIONAL,
    KanoCategory.ATTRACTIVE,
    KanoCategory.INDIFFERENT_INCONCLUSIVE,
    KanoCategory.REVERSE,
)

PHRASES = {
    KanoCategory.MUST_BE: "Must-be quality",
    KanoCategory.ONE_DIMENSIONAL: "One-dimensional quality",
    KanoCategory.ATTRACTIVE: "Attractive quality",
    KanoCategory.INDIFFERENT_INCONCLUSIVE: "Inconclusive",
    KanoCategory.REVERSE: "Reverse quality",
}

NOTE_INSUFFICIENT = "insufficient support"
NOTE_FLAT = "no significant reinforcement"
NOTE_GATE = "significant cells do not survive the omnibus permutation test"


@dataclass(frozen=True)
class KanoRules:
    """Knobs of the rule set.

    ``zone_fraction`` sizes the low and high zones (rounded up) over values
    ``2..s``. ONE_DIMENSIONAL needs significant values covering at least
    ``coverage`` of the defined values. An end zone whose lift exceeds
    ``dominance`` times that of the other occupied zones makes the result
    MIXED. Reinforcing evidence outside the strongest end zone that spans
    fewer than ``minor_values`` values has to pass a Bonferroni-corrected z
    test at ``family_alpha``, else it is dropped as a chance hit.

    With ``familywise`` set the profile first has to pass a gate: its
    omnibus permutation p-value must be at most ``family_alpha``. Profiles
    failing the gate are INDIFFERENT_INCONCLUSIVE. Past the gate every cell
    outside its whiskers is evidence.
    """

    zone_fraction: float = 1 / 3
    coverage: float = 0.5
    dominance: float = 1.5
    minor_values: int = 2
    familywise: bool = True
    family_alpha: float = 0.05


@dataclass(frozen=True)
class Evidence:
    direction: Direction
    value: int
    kind: str  # "reinforcing" or "anti"

    def to_dict(self) -> dict:
        return {"direction": self.direction.value, "value": self.value, "kind": self.kind}


@dataclass
class KanoClassification:
    attribute: str
    category: KanoCategory
    components: tuple[KanoCategory, ...] = ()
    evidence: list[Evidence] = field(default_factory=list)
    zones: dict[str, list[int]] = field(default_factory=dict)
    notes: str = ""

    def same_category(self, other: "KanoClassification | KanoCategory", components=()) -> bool:
        if isinstance(other, KanoClassification):
            other, components = other.category, other.components
        if self.category is not other:
            return False
        return other is not KanoCategory.MIXED or set(self.components) == set(components)

    def to_dict(self) -> dict:
        d = {
            "attribute": self.attribute,
            "category": self.category.value,
            "evidence": [e.to_dict() for e in self.evidence],
            "zones": {k: list(v) for k, v in self.zones.items()},
            "notes": self.notes,
        }
        if self.category is KanoCategory.MIXED:
            d["mixed_components"] = [c.value for c in self.components]
        return d


def zone_partition(scale: int, rules: KanoRules | None = None) -> dict[str, list[int]]:
    """Split values ``2..scale`` into low, mid and high zones."""
    rules = rules or KanoRules()
    values = list(range(2, scale + 1))
    edge = min(len(values), math.ceil(len(values) * rules.zone_fraction))
    low = values[:edge]
    high_edge = min(len(values) - len(low), edge)
    high = values[len(values) - high_edge:] if high_edge else []
    mid = values[len(low): len(values) - len(high)]
    return {"low": low, "mid": mid, "high": high}


def category_phrase(classification: KanoClassification, group: str = "respondents") -> str:
    """Two-column summary wording, drawn from a closed vocabulary.

    MIXED reads "<first> and for a certain group of <group> <second>".
    """
    if classification.category is KanoCategory.MIXED:
        first, *rest = classification.components
        tail = " and ".join(PHRASES[c][0].lower() + PHRASES[c][1:] for c in rest)
        return f"{PHRASES[first]} and for a certain group of {group} {tail}"
    return PHRASES[classification.category]


def _z(cell) -> float:
    """Standardized distance of a cell's probability from its null mean."""
    box = cell.null_box
    if box.std > 0:
        return (cell.probability - box.mean) / box.std
    return math.inf if cell.probability > box.mean else 0.0


def _contiguous(values: list[int]) -> bool:
    return bool(values) and values[-1] - values[0] == len(values) - 1


def classify(profile: ReinforcementProfile, rules: KanoRules | None = None) -> KanoClassification:
    """Assign a Kano category from the significant cells of ``profile``.

    Evidence is the set of cells whose reinforcement is significantly above
    its null ("reinforcing") plus cells whose anti-reinforcement is
    significantly above its null ("anti"). A zone's lift is the largest
    ``probability - null median`` among its reinforcing cells. When an end
    zone (low or high) is occupied and fewer than ``rules.minor_values``
    reinforcing values lie outside the end zone with the larger lift, each of
    those values is kept only when one of its cells clears a z threshold
    Bonferroni-corrected over the defined cells. Rules, first match wins:

    1. no evidence, or the omnibus gate of ``rules`` fails:
       INDIFFERENT_INCONCLUSIVE
    2. more anti cells than reinforcing cells: REVERSE
    3. reinforcing values only in the low zone: MUST_BE
    4. only in the high zone: ATTRACTIVE
    5. an end zone whose lift exceeds ``dominance`` times the lift of every
       other occupied zone: MIXED of that end's category with ONE_DIMENSIONAL
       (mid occupied) or the opposite end's category
    6. at least two zones including mid, covering at least ``coverage`` of
       the defined values (exactly that share only as one contiguous run):
       ONE_DIMENSIONAL
    7. low zone plus upper zones: MIXED of MUST_BE with ONE_DIMENSIONAL (mid
       occupied) or ATTRACTIVE
    8. mid and high: MIXED of ATTRACTIVE and ONE_DIMENSIONAL; mid only:
       ONE_DIMENSIONAL
    """
    rules = rules or KanoRules()
    zones = zone_partition(profile.scale, rules)
    zone_of = {v: name for name, vals in zones.items() for v in vals}

    defined = [c for c in profile.cells if c.defined]
    defined_values = sorted({c.value for c in defined})
    reinforcing = [c for c in defined if c.reinforcing]
    anti = [c for c in defined if c.anti_significant]
    evidence = [Evidence(c.direction, c.value, "reinforcing") for c in reinforcing]
    evidence += [Evidence(c.direction, c.value, "anti") for c in anti]
    evidence.sort(key=lambda e: (e.value, e.direction.value, e.kind))
    passes_gate = (
        not rules.familywise
        or profile.omnibus_p is None
        or profile.omnibus_p <= rules.family_alpha
    )

    n_reinforcing = len(reinforcing)
    lift = {"low": 0.0, "mid": 0.0, "high": 0.0}
    for c in reinforcing:
        z = zone_of[c.value]
        lift[z] = max(lift[z], c.probability - c.null_box.median)

    # Sparse evidence outside the strongest end zone must pass a
    # Bonferroni-corrected z test against its null, else it is a chance hit.
    notes = ""
    ends = [z for z in ("low", "high") if lift[z] > 0]
    if ends:
        anchor = max(ends, key=lambda z: (lift[z], z == "low"))
        outside = {c.value for c in reinforcing if zone_of[c.value] != anchor}
        if outside and len(outside) < rules.minor_values:
            z_crit = NormalDist().inv_cdf(1 - rules.family_alpha / (2 * len(defined)))
            weak = {v for v in outside
                    if not any(_z(c) > z_crit for c in reinforcing if c.value == v)}
            if weak:
                reinforcing = [c for c in reinforcing if c.value not in weak]
                notes = "weak isolated value " + ", ".join(map(str, sorted(weak))) + " ignored"
                lift = {z: max([c.probability - c.null_box.median for c in reinforcing
                                if zone_of[c.value] == z], default=0.0) for z in lift}

    sig_values = sorted({c.value for c in reinforcing})
    hit = {z: [v for v in sig_values if zone_of[v] == z] for z in ("low", "mid", "high")}

    def result(category, components=(), note=""):
        text = "; ".join(t for t in (note, notes) if t)
        return KanoClassification(
            profile.attribute, category, tuple(components), evidence, dict(hit), text
        )

    MB, OD, AT = KanoCategory.MUST_BE, KanoCategory.ONE_DIMENSIONAL, KanoCategory.ATTRACTIVE
    if not defined_values:
        return result(KanoCategory.INDIFFERENT_INCONCLUSIVE, note=NOTE_INSUFFICIENT)
    if not evidence:
        return result(KanoCategory.INDIFFERENT_INCONCLUSIVE, note=NOTE_FLAT)
    if not passes_gate:
        return result(KanoCategory.INDIFFERENT_INCONCLUSIVE, note=NOTE_GATE)
    if len(anti) > n_reinforcing:
        return result(KanoCategory.REVERSE)

    occupied = [z for z in ("low", "mid", "high") if hit[z]]
    if occupied == ["low"]:
        return result(MB)
    if occupied == ["high"]:
        return result(AT)

    for end, category, other_end in (("low", MB, AT), ("high", AT, MB)):
        rest = [z for z in occupied if z != end]
        if hit[end] and rest and all(lift[end] > rules.dominance * lift[z] for z in rest):
            partner = OD if hit["mid"] else other_end
            return result(KanoCategory.MIXED, (category, partner), note=f"{end} zone dominates")

    covered = len(sig_values) / len(defined_values)
    spread = len(occupied) >= 2 and hit["mid"]
    if spread and (covered > rules.coverage or (covered == rules.coverage and _contiguous(sig_values))):
        return result(OD)
    if hit["low"]:
        return result(KanoCategory.MIXED, (MB, OD if hit["mid"] else AT))
    if hit["high"]:
        return result(KanoCategory.MIXED, (AT, OD))
    return result(OD, note="mid-zone evidence only")


def classify_all(
    profiles: list[ReinforcementProfile], rules: KanoRules | None = None
) -> list[KanoClassification]:
    if not profiles:
        raise ValueError("no profiles to classify")
    return [classify(p, rules) for p in profiles]
