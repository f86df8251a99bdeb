"""Load a survey CSV, rank its attributes and classify each one.

The survey is drawn from a synthetic population so the demo is
self-contained: delivery is must-be, support one-dimensional, price has no
effect. Run from the repository root::

    python3 demos/quickstart.py
"""

import tempfile
from pathlib import Path

from ordeval import (
    KanoCategory,
    KanoShape,
    OrdEvalParams,
    SyntheticPopulationSpec,
    classify_all,
    evaluate_all,
    generate_population,
    load_csv,
    relieff_scores,
    to_csv,
)
from ordeval.report import render_text_report
from ordeval.synth import AttributeSpec

K = KanoCategory
spec = SyntheticPopulationSpec(400, (
    AttributeSpec("delivery", KanoShape(K.MUST_BE, magnitude=2.0)),
    AttributeSpec("support", KanoShape(K.ONE_DIMENSIONAL)),
    AttributeSpec("price", KanoShape(K.INDIFFERENT_INCONCLUSIVE)),
), seed=7)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "survey.csv"
    path.write_text(to_csv(generate_population(spec)))
    data = load_csv(path.read_bytes(), "response", scales=dict.fromkeys(("delivery", "support", "price"), 7))

print(f"{data.n_rows} respondents, {data.report.rows_rejected} rows rejected")
ranking = relieff_scores(data)
profiles = evaluate_all(data, OrdEvalParams(seed=7))
classes = classify_all(profiles)
print(render_text_report(profiles, classes, ranking.scores))
