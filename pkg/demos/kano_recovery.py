"""Generate one attribute per Kano category and check what comes back.

Each run draws 500 respondents with uniform attribute codes, builds the
response from the ideal curve of every attribute plus Gaussian noise, and
classifies the resulting reinforcement profiles.
"""

from ordeval import (
    KanoCategory,
    KanoShape,
    OrdEvalParams,
    SyntheticPopulationSpec,
    classify_all,
    evaluate_all,
    generate_population,
    ground_truth,
)
from ordeval.synth import AttributeSpec

K = KanoCategory
ATTRIBUTES = (
    AttributeSpec("must", KanoShape(K.MUST_BE, magnitude=2.0)),
    AttributeSpec("onedim", KanoShape(K.ONE_DIMENSIONAL, slope=1.0)),
    AttributeSpec("attr", KanoShape(K.ATTRACTIVE, magnitude=2.0)),
    AttributeSpec("indiff", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
    AttributeSpec("rev", KanoShape(K.REVERSE, slope=0.75)),
)

hits = {a.name: 0 for a in ATTRIBUTES}
seeds = range(5)
for seed in seeds:
    spec = SyntheticPopulationSpec(500, ATTRIBUTES, noise_sigma=0.5, seed=seed)
    truth = ground_truth(spec)
    got = classify_all(evaluate_all(generate_population(spec), OrdEvalParams(seed=seed)))
    for t, c in zip(truth, got):
        hits[t.attribute] += c.category is t.dominant
        print(f"seed {seed}  {t.attribute:<7} expected {t.dominant.value:<25} got {c.category.value}")

print()
for name, n in hits.items():
    print(f"{name:<7} {n}/{len(seeds)}")
