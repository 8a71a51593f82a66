"""Epistemic message-exchange games over discourse graphs."""

from .analysis import (
    AgreementOutcome,
    DefenseScript,
    DisinterestReport,
    DogWhistleWitness,
    EvidenceOutcome,
    e_defensible,
    is_ambiguous,
    is_disinterested,
    is_dog_whistle,
    is_predictive,
    liminf_update,
    simulate_agreement,
    truth_interested_update,
    two_history_outcome,
)
from .discourse import (
    Cdu,
    CommitmentSet,
    CoherenceReport,
    Edu,
    History,
    RelationInstance,
    UnderspecifiedForm,
    commitments,
    completions,
    entails,
    enumerate_completions,
    history_distance,
    semantically_distinct,
    validate_history,
)
from .epistemic import (
    BeliefTrajectory,
    Distribution,
    StrategyTable,
    TypeSpace,
    bayes_update,
    check_prior_symmetry,
    compatible,
    interpret,
    marginal_over_histories,
    marginal_over_types,
    run_rounds,
    safety_check,
)
from .game import (
    GameTree,
    Jury,
    Move,
    Play,
    Turn,
    WinSpec,
    admissible_attacks,
    attack_ratio,
    discounted_score,
    dual,
    estimate_limit_win,
    evaluate_win,
    extend,
    external_truth_win,
    solve_finite,
    turn,
    uniform_tree,
)
from .scenarios import BUILTIN_NAMES, GameSpec, ScenarioError, builtin, load_scenario, serialize_scenario

__version__ = "0.1.0"
