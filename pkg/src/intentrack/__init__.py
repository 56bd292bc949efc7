"""Online Bayesian goal inference and Monte Carlo trajectory forecasting for
gridworld targets."""

from .grid import (
    Cell,
    DistanceField,
    GridError,
    GridMap,
    distance_field,
    distance_matrix,
    shortest_grid_path,
    step_cost,
    successors,
)
from .kinematics import (
    KinematicsError,
    StepDistribution,
    boltzmann_probs,
    progress_cost,
    sample_step,
    step_distribution,
)
from .inference import (
    AlphaGrid,
    Belief,
    GoalSet,
    InferenceError,
    IntentModel,
    MethodConfig,
    ObservationGapError,
    estimate_alpha,
    estimate_alpha_overall,
    evolve_alpha_weights,
    evolve_goal_prior,
    goal_transition_matrix,
    ingest,
    init_belief,
    observation_likelihood,
    update,
)
from .predictor import (
    Ellipse,
    PredictionResult,
    allocate_samples,
    ellipse_from_cov,
    exact_step_distribution,
    predict,
    rollout,
)
from .scenario import (
    PredictionSpec,
    Scenario,
    Segment,
    TraceRecord,
    TrajectoryTruth,
    boundary_goals,
    generate_trajectory,
    load_scenario,
    make_case1,
    make_case2,
    make_mc_trial,
    save_scenario,
)
from .metrics import aggregate, alpha_error, prediction_error, true_goal_prob
from .stats import TestReport, compare_methods, dunn_test, kruskal_wallis
from .runner import RunPlan, bench, run
from .estimator import IntentionPredictor

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "Belief",
    "Cell",
    "DistanceField",
    "Ellipse",
    "GoalSet",
    "GridError",
    "GridMap",
    "InferenceError",
    "IntentModel",
    "IntentionPredictor",
    "KinematicsError",
    "MethodConfig",
    "ObservationGapError",
    "PredictionResult",
    "PredictionSpec",
    "RunPlan",
    "Scenario",
    "Segment",
    "StepDistribution",
    "TestReport",
    "TraceRecord",
    "TrajectoryTruth",
    "aggregate",
    "allocate_samples",
    "alpha_error",
    "bench",
    "boltzmann_probs",
    "boundary_goals",
    "compare_methods",
    "distance_field",
    "distance_matrix",
    "dunn_test",
    "ellipse_from_cov",
    "estimate_alpha",
    "estimate_alpha_overall",
    "evolve_alpha_weights",
    "evolve_goal_prior",
    "exact_step_distribution",
    "generate_trajectory",
    "goal_transition_matrix",
    "ingest",
    "init_belief",
    "kruskal_wallis",
    "load_scenario",
    "make_case1",
    "make_case2",
    "make_mc_trial",
    "observation_likelihood",
    "predict",
    "prediction_error",
    "progress_cost",
    "rollout",
    "run",
    "sample_step",
    "save_scenario",
    "shortest_grid_path",
    "step_cost",
    "step_distribution",
    "successors",
    "true_goal_prob",
    "update",
]
