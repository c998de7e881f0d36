"""Logic labeling rules from few examples, refined by active learning and edits."""

from .data import (
    AttributeRecord,
    Dataset,
    DatasetError,
    FeatureVector,
    PredicateAtom,
    PredicateVocabulary,
    Var,
    cosine_similarity,
    featurize,
    parse_dataset,
    serialize_dataset,
)
from .dsl import (
    Clause,
    DslSyntaxError,
    Rule,
    RuleSet,
    clause_key,
    clauses_equal,
    first_inconsistent_clause,
    parse_rule,
    parse_ruleset,
    print_rule,
    print_ruleset,
    rules_equal,
    rulesets_equal,
)
from .evaluate import (
    LabelDecision,
    assign_label,
    clause_csr,
    clause_satisfied,
    rule_csr,
    rule_satisfied,
    ruleset_csrs,
    sat,
)
from .learn import (
    CandidateLiteral,
    FeedbackConstraints,
    LearnConfig,
    LearnError,
    gain,
    init_candidates,
    learn_clause,
    learn_rule,
    learn_ruleset,
    significance,
)
from .oracle import (
    GoldSpec,
    RuleEdit,
    apply_edit,
    constraints_from_edit,
    correct_labels,
    count_clause_differences,
    edit_rule,
)
from .select import (
    ScoredRecord,
    SelectionBatch,
    SelectionConfig,
    diversity_pick,
    informativeness,
    select_batch,
)
from .harness import (
    ExperimentConfig,
    IterationMetrics,
    LabelingLoop,
    compute_metrics,
    run_experiment,
    run_loop,
)
from .synth import GeneratorSpec, generate_synthetic

__all__ = [name for name in dir() if not name.startswith("_")]
