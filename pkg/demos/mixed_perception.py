"""Two halves of a population that disagree about one attribute.

Half the respondents treat ``service`` as must-be (only poor service hurts),
the other half as one-dimensional. The profile shows reinforcement both at
the bottom of the scale and higher up, and the classifier reports a mixed
category. The SVG plot is written next to this script.
"""

from pathlib import Path

from ordeval import (
    KanoCategory,
    KanoShape,
    OrdEvalParams,
    SubgroupSpec,
    SyntheticPopulationSpec,
    classify,
    evaluate_attribute,
    generate_population,
)
from ordeval.kano import category_phrase
from ordeval.report import render_profile
from ordeval.synth import AttributeSpec

K = KanoCategory
attributes = (
    AttributeSpec("service", KanoShape(K.MUST_BE, magnitude=2.0)),
    AttributeSpec("noise_a", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
    AttributeSpec("noise_b", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
)
halves = (SubgroupSpec(0.5), SubgroupSpec(0.5, {"service": KanoShape(K.ONE_DIMENSIONAL)}))
spec = SyntheticPopulationSpec(1000, attributes, subgroups=halves, seed=3)

profile = evaluate_attribute(generate_population(spec), "service", OrdEvalParams(seed=3))
for cell in sorted(profile.significant_cells(), key=lambda c: (c.value, c.direction.value)):
    print(f"{cell.direction.value:<4} {cell.value}  p={cell.probability:.3f}  null q975={cell.null_box.q975:.3f}")

result = classify(profile)
print(result.category.value, [c.value for c in result.components])
print(category_phrase(result, group="customers"))

out = Path(__file__).with_name("service_profile.svg")
out.write_text(render_profile(profile))
print(f"plot written to {out}")
