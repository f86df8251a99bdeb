import pytest

from ordeval import KanoCategory, KanoRules, classify, classify_all
from ordeval.kano import NOTE_FLAT, NOTE_GATE, NOTE_INSUFFICIENT, PHRASES, category_phrase, zone_partition

from conftest import both, make_profile

K = KanoCategory
ALL_CELLS = {(d, v) for v in range(2, 8) for d in ("UP", "DOWN")}


def category(**kw):
    c = classify(make_profile(**kw))
    return c.category, c.components


# -- the rule examples ---------------------------------------------------------

def test_spread_across_values_is_one_dimensional():
    assert category(reinforcing=both([3, 4, 5, 6])) == (K.ONE_DIMENSIONAL, ())


def test_bottom_values_only_is_must_be():
    assert category(reinforcing=both([2, 3])) == (K.MUST_BE, ())


def test_top_value_only_is_attractive():
    assert category(reinforcing={("UP", 7): 0.8}) == (K.ATTRACTIVE, ())


def test_no_significant_cells_is_flat_indifferent():
    c = classify(make_profile())
    assert c.category is K.INDIFFERENT_INCONCLUSIVE
    assert c.notes == NOTE_FLAT and c.evidence == []


def test_low_plus_upper_values_without_coverage_is_mixed():
    assert category(reinforcing=both([2, 5, 6])) == (K.MIXED, (K.MUST_BE, K.ONE_DIMENSIONAL))


def test_all_undefined_is_insufficient_support():
    c = classify(make_profile(undefined=ALL_CELLS))
    assert (c.category, c.notes) == (K.INDIFFERENT_INCONCLUSIVE, NOTE_INSUFFICIENT)


def test_anti_cells_outnumbering_regular_ones_is_reverse():
    anti = {(d, v) for v in (3, 4, 5) for d in ("UP", "DOWN")}
    assert category(anti=anti, reinforcing={("UP", 2): 0.6}) == (K.REVERSE, ())


def test_failed_omnibus_gate_is_indifferent():
    c = classify(make_profile(reinforcing=both([2, 3]), omnibus_p=0.3))
    assert (c.category, c.notes) == (K.INDIFFERENT_INCONCLUSIVE, NOTE_GATE)
    assert classify(make_profile(reinforcing=both([2, 3]), omnibus_p=0.3),
                    KanoRules(familywise=False)).category is K.MUST_BE


def test_contiguous_half_coverage_counts_as_one_dimensional():
    assert category(reinforcing=both([4, 5, 6])) == (K.ONE_DIMENSIONAL, ())


def test_dominant_low_zone_with_weaker_upper_cells_is_mixed():
    cells = {**both([2, 3], 0.9), **both([4, 5, 6], 0.5)}
    assert category(reinforcing=cells) == (K.MIXED, (K.MUST_BE, K.ONE_DIMENSIONAL))


def test_weak_isolated_value_is_dropped_as_chance_hit():
    c = classify(make_profile(reinforcing={**both([2, 3], 0.9), ("UP", 6): 0.42}))
    assert c.category is K.MUST_BE
    assert "6" in c.notes


def test_strong_isolated_value_is_kept():
    c = classify(make_profile(reinforcing={**both([2, 3], 0.9), ("UP", 6): 0.7}))
    assert (c.category, c.components) == (K.MIXED, (K.MUST_BE, K.ATTRACTIVE))


def test_mid_only_is_one_dimensional_with_note():
    c = classify(make_profile(reinforcing=both([4])))
    assert c.category is K.ONE_DIMENSIONAL and c.notes


# -- discipline patterns from a CIO survey ----------------------------------

def test_requirements_pattern_reads_attractive_with_one_dimensional_group():
    # up 3->4, 4->5, 6->7; down 4->3, 7->6; strongest at the top
    cells = {("UP", 4): 0.6, ("UP", 5): 0.6, ("DOWN", 4): 0.6, ("UP", 7): 0.9, ("DOWN", 7): 0.9}
    c = classify(make_profile(reinforcing=cells))
    assert category_phrase(c, group="CIOs") == (
        "Attractive quality and for a certain group of CIOs one-dimensional quality"
    )


def test_no_significant_values_reads_inconclusive():
    assert category_phrase(classify(make_profile())) == "Inconclusive"


def test_testing_pattern_reads_must_be_first():
    # strongest up 1->2, weaker up 5->6 and down 6->5
    cells = {("UP", 2): 0.9, ("UP", 6): 0.6, ("DOWN", 6): 0.6}
    c = classify(make_profile(reinforcing=cells))
    assert c.category is K.MIXED and c.components[0] is K.MUST_BE
    assert category_phrase(c, group="CIOs").startswith("Must-be quality and for a certain group of CIOs")


def test_deployment_pattern_is_must_be():
    c = classify(make_profile(reinforcing={("UP", 2): 0.9}))
    assert category_phrase(c) == "Must-be quality"


def test_project_management_pattern_is_attractive():
    c = classify(make_profile(reinforcing={("UP", 7): 0.7}))
    assert category_phrase(c) == "Attractive quality"


# -- zones, phrases, serialization --------------------------------------------

@pytest.mark.parametrize("scale, expected", [
    (7, {"low": [2, 3], "mid": [4, 5], "high": [6, 7]}),
    (5, {"low": [2, 3], "mid": [], "high": [4, 5]}),
    (3, {"low": [2], "mid": [], "high": [3]}),
    (2, {"low": [2], "mid": [], "high": []}),
])
def test_zone_partition(scale, expected):
    assert zone_partition(scale) == expected


def test_phrases_form_a_closed_vocabulary():
    assert set(PHRASES) == set(K) - {K.MIXED}
    c = classify(make_profile(reinforcing=both([2, 5, 6])))
    assert category_phrase(c) == (
        "Must-be quality and for a certain group of respondents one-dimensional quality"
    )


def test_classification_dict():
    d = classify(make_profile(reinforcing=both([2, 5, 6]))).to_dict()
    assert d["category"] == "MIXED"
    assert d["mixed_components"] == ["MUST_BE", "ONE_DIMENSIONAL"]
    assert {"direction": "UP", "value": 2, "kind": "reinforcing"} in d["evidence"]
    assert "mixed_components" not in classify(make_profile()).to_dict()


def test_evidence_is_drawn_from_significant_cells():
    prof = make_profile(reinforcing=both([2, 3, 6]), anti={("UP", 5)})
    c = classify(prof)
    sig = {(x.direction, x.value) for x in prof.significant_cells()}
    anti = {(x.direction, x.value) for x in prof.cells if x.anti_significant}
    for e in c.evidence:
        assert (e.direction, e.value) in (sig if e.kind == "reinforcing" else anti)


def test_classify_all_preserves_order():
    profs = [make_profile(name=f"a{i}") for i in range(6)]
    out = classify_all(profs)
    assert [c.attribute for c in out] == [f"a{i}" for i in range(6)]
    assert all(c.category is K.INDIFFERENT_INCONCLUSIVE for c in out)
    with pytest.raises(ValueError):
        classify_all([])
