"""Value-level evaluation of ordinal survey attributes and Kano classification."""

from .dataset import (
    MISSING,
    ClassConditionalTable,
    DatasetError,
    OrdinalDataset,
    OrdinalScale,
    ValidationReport,
    class_conditional,
    distance_matrix,
    instance_distance,
    load_csv,
    to_csv,
    value_diff,
)
from .engine import (
    Direction,
    NullBox,
    OrdEvalParams,
    ReinforcementCell,
    ReinforcementProfile,
    StepRule,
    compute_reinforcements,
    evaluate_all,
    evaluate_attribute,
    nearest_context,
    null_distribution,
)
from .kano import KanoCategory, KanoClassification, KanoRules, classify, classify_all
from .relieff import AttributeScore, ReliefFParams, rank_attributes, relieff_scores
from .synth import (
    KanoShape,
    SubgroupSpec,
    SyntheticPopulationSpec,
    generate_population,
    ground_truth,
    ideal_contribution,
)

__version__ = "0.1.0"
