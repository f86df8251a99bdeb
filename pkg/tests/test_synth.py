import json

import numpy as np
import pytest

from ordeval import (
    KanoCategory,
    KanoShape,
    OrdEvalParams,
    SubgroupSpec,
    SyntheticPopulationSpec,
    evaluate_attribute,
    generate_population,
    ground_truth,
    ideal_contribution,
    to_csv,
)
from ordeval.synth import AttributeSpec, SpecError

from conftest import FIVE_SHAPES, five_category_spec

K = KanoCategory
UNIFORM_CHI2_99 = 16.812  # chi-square quantile, 6 degrees of freedom, 0.99


def test_indifferent_curve_is_flat():
    assert all(ideal_contribution(KanoShape(K.INDIFFERENT_INCONCLUSIVE), v) == 0 for v in range(1, 8))


def test_score_of_four_is_neutral():
    assert ideal_contribution(KanoShape(K.ONE_DIMENSIONAL, slope=1.0), 4) == 0.0


def test_reverse_negates_one_dimensional():
    for v in range(1, 8):
        assert ideal_contribution(KanoShape(K.REVERSE), v) == -ideal_contribution(KanoShape(K.ONE_DIMENSIONAL), v)


def test_step_curves():
    must = [ideal_contribution(KanoShape(K.MUST_BE, magnitude=2.0), v) for v in range(1, 8)]
    assert must == [-2.0, -1.0, 0, 0, 0, 0, 0]
    attr = [ideal_contribution(KanoShape(K.ATTRACTIVE, magnitude=2.0), v) for v in range(1, 8)]
    assert attr == [0, 0, 0, 0, 0, 0, 2.0]
    with pytest.raises(ValueError):
        ideal_contribution(KanoShape(K.MUST_BE), 8)


def test_noiseless_attractive_step_of_three():
    spec = SyntheticPopulationSpec(
        400, (AttributeSpec("x", KanoShape(K.ATTRACTIVE, threshold=7, magnitude=3.0)),), noise_sigma=0.0
    )
    ds = generate_population(spec)
    x, y = ds.cells[:, 0], ds.response
    assert np.all(y[x == 7] == 7)
    assert np.all(y[x < 7] == 4)


def test_same_seed_same_dataset():
    assert generate_population(five_category_spec(3)) == generate_population(five_category_spec(3))
    assert generate_population(five_category_spec(3)) != generate_population(five_category_spec(4))


def test_codes_within_scale_and_uniform():
    ds = generate_population(five_category_spec(0, n=3000, noise=2.0))
    assert ds.cells.min() >= 1 and ds.cells.max() <= 7
    assert ds.response.min() >= 1 and ds.response.max() <= 7
    expected = ds.n_rows / 7
    for j in range(ds.n_attributes):
        counts = np.bincount(ds.cells[:, j], minlength=8)[1:]
        assert ((counts - expected) ** 2 / expected).sum() < UNIFORM_CHI2_99


def test_noiseless_response_is_a_function_of_attributes():
    ds = generate_population(five_category_spec(1, n=2000, noise=0.0))
    seen = {}
    for row, y in zip(map(tuple, ds.cells), ds.response):
        assert seen.setdefault(row, y) == y


def test_mixture_shows_low_and_upper_zone_evidence():
    attrs = (
        AttributeSpec("x", KanoShape(K.MUST_BE, magnitude=2.0)),
        AttributeSpec("d1", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
        AttributeSpec("d2", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
    )
    groups = (SubgroupSpec(0.5), SubgroupSpec(0.5, {"x": KanoShape(K.ONE_DIMENSIONAL)}))
    ds = generate_population(SyntheticPopulationSpec(1000, attrs, subgroups=groups, seed=0))
    prof = evaluate_attribute(ds, "x", OrdEvalParams(seed=0))
    sig = {c.value for c in prof.significant_cells()}
    assert sig & {2, 3}
    assert sig & {4, 5, 6, 7}


# -- validation -----------------------------------------------------------------

@pytest.mark.parametrize("kwargs, path", [
    ({"n": 0}, "n"),
    ({"attributes": ()}, "attributes"),
    ({"noise_sigma": -1.0}, "noise_sigma"),
    ({"subgroups": (SubgroupSpec(0.5),)}, "subgroups"),
    ({"subgroups": (SubgroupSpec(0.0), SubgroupSpec(1.0))}, "subgroups[0].weight"),
    ({"attributes": (AttributeSpec("a", KanoShape(K.MUST_BE, threshold=9)),)}, "attributes[0].threshold"),
])
def test_invalid_specs_name_the_field(kwargs, path):
    base = {"n": 10, "attributes": FIVE_SHAPES}
    with pytest.raises(SpecError) as err:
        SyntheticPopulationSpec(**{**base, **kwargs})
    assert err.value.path == path


def test_json_errors_carry_paths():
    with pytest.raises(SpecError) as err:
        SyntheticPopulationSpec.from_json('{"n": 5, "attributes": [{"name": "a", "category": "NOPE"}]}')
    assert err.value.path == "attributes[0].category"
    with pytest.raises(SpecError) as err:
        SyntheticPopulationSpec.from_json("{")
    assert err.value.path == "$"


def test_json_round_trip():
    groups = (SubgroupSpec(0.3, {"must": KanoShape(K.ONE_DIMENSIONAL)}), SubgroupSpec(0.7))
    spec = SyntheticPopulationSpec(50, FIVE_SHAPES, subgroups=groups, seed=8)
    again = SyntheticPopulationSpec.from_json(json.dumps(spec.to_dict()))
    assert again == spec
    assert to_csv(generate_population(again)) == to_csv(generate_population(spec))


def test_constant_response_is_rejected():
    spec = SyntheticPopulationSpec(20, (AttributeSpec("a", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),), noise_sigma=0)
    with pytest.raises(SpecError):
        generate_population(spec)


# -- ground truth -----------------------------------------------------------------

def test_single_subgroup_truth_echoes_shapes():
    truth = ground_truth(five_category_spec(0))
    assert [t.dominant for t in truth] == [K.MUST_BE, K.ONE_DIMENSIONAL, K.ATTRACTIVE,
                                           K.INDIFFERENT_INCONCLUSIVE, K.REVERSE]


def test_disagreeing_subgroups_give_mixed():
    groups = (SubgroupSpec(0.5), SubgroupSpec(0.5, {"must": KanoShape(K.ONE_DIMENSIONAL)}))
    t = ground_truth(SyntheticPopulationSpec(10, FIVE_SHAPES, subgroups=groups))[0]
    assert t.dominant is K.MIXED
    assert t.components == (K.MUST_BE, K.ONE_DIMENSIONAL)
    assert t.to_dict()["mixed_components"] == ["MUST_BE", "ONE_DIMENSIONAL"]


def test_tiny_minority_is_only_noted():
    groups = (SubgroupSpec(0.99), SubgroupSpec(0.01, {"must": KanoShape(K.ATTRACTIVE)}))
    t = ground_truth(SyntheticPopulationSpec(10, FIVE_SHAPES, subgroups=groups))[0]
    assert t.dominant is K.MUST_BE
    assert "ATTRACTIVE" in t.notes


def test_expected_override():
    attrs = (AttributeSpec("a", KanoShape(K.MUST_BE), expected=K.REVERSE),)
    assert ground_truth(SyntheticPopulationSpec(10, attrs))[0].dominant is K.REVERSE
