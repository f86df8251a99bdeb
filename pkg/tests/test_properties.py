"""Invariants checked over generated inputs."""

import dataclasses

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from ordeval import (
    KanoCategory,
    OrdEvalParams,
    OrdinalDataset,
    OrdinalScale,
    ReliefFParams,
    SyntheticPopulationSpec,
    class_conditional,
    classify,
    compute_reinforcements,
    distance_matrix,
    generate_population,
    load_csv,
    relieff_scores,
    to_csv,
    value_diff,
)
from ordeval.kano import zone_partition
from ordeval.synth import AttributeSpec, SpecError

import oracles
from conftest import K, KanoShape, make_profile, random_dataset

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def datasets(draw, max_rows=24, max_attrs=4, missing=True):
    n = draw(st.integers(4, max_rows))
    a = draw(st.integers(1, max_attrs))
    scale = draw(st.integers(2, 7))
    rate = draw(st.sampled_from([0.0, 0.1, 0.3])) if missing else 0.0
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return random_dataset(rng, n, a, scale=scale, missing=rate)


def appended(ds, name, column, scale):
    return OrdinalDataset(ds.attribute_names + (name,), ds.attribute_scales + (scale,), ds.response_scale,
                          np.column_stack([ds.cells, column]), ds.response)


def permuted(ds, order):
    return OrdinalDataset(ds.attribute_names, ds.attribute_scales, ds.response_scale,
                          ds.cells[order], ds.response[order])


# -- dataset-core ----------------------------------------------------------------

@FAST
@given(datasets())
def test_value_diff_is_a_unit_interval_quantity(ds):
    t = class_conditional(ds)
    for j in range(ds.n_attributes):
        for i in range(ds.n_rows):
            d = value_diff(j, i, (i + 1) % ds.n_rows, ds, t)
            assert 0.0 <= d <= 1.0


@FAST
@given(datasets())
def test_distance_matrix_is_symmetric_and_bounded(ds):
    dm = distance_matrix(ds)
    assert np.array_equal(dm, dm.T)
    assert np.all(dm >= 0) and np.all(dm <= ds.n_attributes + 1e-12)
    assert np.all(np.diag(dm)[~(ds.cells == 0).any(axis=1)] == 0)


@FAST
@given(datasets())
def test_smoothed_rows_sum_to_one(ds):
    for p in class_conditional(ds).probs:
        rows = p[1:, 1:]
        present = rows.sum(axis=1) > 0
        assert np.allclose(rows[present].sum(axis=1), 1.0)


@FAST
@given(datasets())
def test_csv_round_trip(ds):
    scales = {n: s.max_code for n, s in zip(ds.attribute_names, ds.attribute_scales)}
    again = load_csv(to_csv(ds), "response", scales=scales, response_scale=ds.response_scale.max_code)
    assert again == ds


# -- relieff ---------------------------------------------------------------------

@FAST
@given(datasets(missing=False), st.integers(1, 5))
def test_relieff_scores_are_bounded(ds, k):
    for s in relieff_scores(ds, ReliefFParams(k_neighbors=k)).scores:
        assert -1.0 <= s.score <= 1.0


@FAST
@given(datasets(), st.randoms(use_true_random=False))
def test_relieff_is_row_permutation_invariant(ds, rnd):
    order = list(range(ds.n_rows))
    rnd.shuffle(order)
    a = [s.score for s in relieff_scores(ds).scores]
    b = [s.score for s in relieff_scores(permuted(ds, order)).scores]
    assert a == b


@FAST
@given(datasets(max_attrs=3))
def test_duplicated_attribute_scores_equal_its_twin(ds):
    dup = appended(ds, "twin", ds.cells[:, 0], ds.attribute_scales[0])
    res = relieff_scores(dup)
    assert res.score_of(ds.attribute_names[0]) == res.score_of("twin")


@FAST
@given(datasets(missing=False))
def test_constant_attribute_leaves_other_scores_unchanged(ds):
    extra = appended(ds, "const", np.ones(ds.n_rows, dtype=int), OrdinalScale(2))
    before = [s.score for s in relieff_scores(ds).scores]
    res = relieff_scores(extra)
    after = [s.score for s in res.scores][:-1]
    assert np.allclose(before, after, atol=1e-12, rtol=0)
    assert res.score_of("const") == 0.0


# -- ordeval engine --------------------------------------------------------------

def counts(ds, a, k):
    c = compute_reinforcements(ds, a, OrdEvalParams(context_size=k))
    return {key: list(v) for key, v in c.as_dict().items()}


@FAST
@given(datasets(max_rows=14, max_attrs=3), st.integers(1, 6))
def test_counts_equal_the_oracle(ds, k):
    scales = [s.max_code for s in ds.attribute_scales]
    for a in range(ds.n_attributes):
        want = oracles.reinforcement_counts(ds.cells.tolist(), ds.response.tolist(), scales, a, k)
        assert counts(ds, a, k) == want


@FAST
@given(datasets(), st.randoms(use_true_random=False))
def test_counts_are_row_permutation_invariant(ds, rnd):
    order = list(range(ds.n_rows))
    rnd.shuffle(order)
    shuffled = permuted(ds, order)
    for a in range(ds.n_attributes):
        assert counts(ds, a, 3) == counts(shuffled, a, 3)


@FAST
@given(datasets())
def test_successes_and_anti_never_exceed_events(ds):
    for a in range(ds.n_attributes):
        c = compute_reinforcements(ds, a, OrdEvalParams(context_size=5))
        for d in ("up", "down"):
            events = getattr(c, f"{d}_events")
            assert np.all(getattr(c, f"{d}_success") <= events)
            assert np.all(getattr(c, f"{d}_anti") <= events)
            assert np.all(getattr(c, f"{d}_success") + getattr(c, f"{d}_anti") <= events)


# -- kano --------------------------------------------------------------------------

cell_keys = st.tuples(st.sampled_from(["UP", "DOWN"]), st.integers(2, 7))
profiles = st.builds(
    make_profile,
    reinforcing=st.dictionaries(cell_keys, st.floats(0.41, 1.0), max_size=12),
    anti=st.sets(cell_keys, max_size=4),
    undefined=st.sets(cell_keys, max_size=4),
    omnibus_p=st.sampled_from([0.001, 0.04, 0.2, None]),
)


@settings(max_examples=200, deadline=None)
@given(profiles)
def test_classification_is_deterministic_and_grounded(prof):
    a, b = classify(prof), classify(prof)
    assert a == b
    significant = {(c.direction, c.value) for c in prof.cells if c.significant or c.anti_significant}
    assert {(e.direction, e.value) for e in a.evidence} <= significant
    if a.category is KanoCategory.MIXED:
        assert len(a.components) == 2
    else:
        assert a.components == ()


@settings(max_examples=200, deadline=None)
@given(profiles, st.data())
def test_removing_evidence_never_creates_a_category(prof, data):
    if classify(prof).category is not KanoCategory.INDIFFERENT_INCONCLUSIVE:
        return
    sig = [i for i, c in enumerate(prof.cells) if c.significant]
    if not sig:
        return
    i = data.draw(st.sampled_from(sig))
    c = prof.cells[i]
    weaker = dataclasses.replace(c, probability=c.null_box.median, significant=False)
    cells = prof.cells[:i] + (weaker,) + prof.cells[i + 1:]
    assert classify(dataclasses.replace(prof, cells=cells)).category is KanoCategory.INDIFFERENT_INCONCLUSIVE


@given(st.integers(2, 15))
def test_zones_partition_the_values(scale):
    zones = zone_partition(scale)
    flat = zones["low"] + zones["mid"] + zones["high"]
    assert sorted(flat) == list(range(2, scale + 1))
    assert len(set(flat)) == len(flat)
    if zones["low"] and zones["high"]:
        assert max(zones["low"]) < min(zones["high"])


# -- synth -------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(1, 200), st.integers(2, 9), st.floats(0.0, 3.0), st.integers(0, 10**6))
def test_generated_codes_stay_in_scale(n, scale, sigma, seed):
    attrs = (AttributeSpec("a", KanoShape(K.ONE_DIMENSIONAL, slope=2.0)),
             AttributeSpec("b", KanoShape(K.MUST_BE)))
    spec = SyntheticPopulationSpec(n, attrs, scale=scale, noise_sigma=sigma, seed=seed)
    try:
        ds = generate_population(spec)
    except SpecError:
        assume(False)  # tiny samples can draw a constant response, which is rejected
    assert ds.cells.min() >= 1 and ds.cells.max() <= scale
    assert ds.response.min() >= 1 and ds.response.max() <= scale
