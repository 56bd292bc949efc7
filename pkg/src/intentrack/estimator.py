"""scikit-learn style facade over the tracking pipeline.

``IntentionPredictor`` consumes an observed trajectory with ``fit`` /
``partial_fit`` and produces forecasts with ``predict``; parameters follow
the sklearn convention (stored verbatim in ``__init__``, validated on fit),
so the estimator clones and composes with the wider ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .grid import GridMap
from .inference import (
    Belief,
    GoalSet,
    IntentModel,
    MethodConfig,
    estimate_alpha_overall,
    ingest,
    init_belief,
)
from .predictor import PredictionResult, predict
from .scenario import boundary_goals
from .validation import check_trajectory


class IntentionPredictor(BaseEstimator):
    """Online joint goal/temperature tracker with Monte Carlo forecasts.

    Parameters
    ----------
    variant : {'B', 'A', 'G', 'P'}
        Which adaptive components are active: goal switching ('G', 'P')
        and/or temperature adaptation ('A', 'P').
    goals : list of (x, y) or None
        Candidate destinations; None spreads ``n_goals`` around the boundary.
    grid_width, grid_height, cell_size, obstacles, connectivity, allow_stay
        Map geometry, matching the scenario JSON schema.
    horizon, n_samples
        Forecast length and rollout budget for ``predict``.
    bridge_gaps : bool
        When True, non-adjacent consecutive observations are bridged with a
        shortest lattice path instead of raising.

    Examples
    --------
    >>> est = IntentionPredictor(grid_width=21, grid_height=17, cell_size=0.5,
    ...                          n_goals=4, n_samples=100, horizon=5)
    >>> est.fit([[10, 8], [11, 8], [12, 8]])     # doctest: +ELLIPSIS
    IntentionPredictor(...)
    >>> est.predict().shape
    (5, 2)
    """

    def __init__(
        self,
        variant: str = "P",
        goals=None,
        n_goals: int = 12,
        grid_width: int = 101,
        grid_height: int = 81,
        cell_size: float = 0.1,
        obstacles=None,
        connectivity: int = 8,
        allow_stay: bool = True,
        fixed_alpha: float = 20.0,
        prior_shape: float = 3.0,
        prior_scale: float = 3.0,
        p_stay: float = 0.9975,
        alpha_grid_lo: float = 0.05,
        alpha_grid_hi: float = 200.0,
        alpha_grid_points: int = 128,
        alpha_grid_log: bool = True,
        alpha_estimator: str = "expectation",
        horizon: int = 20,
        n_samples: int = 500,
        bridge_gaps: bool = True,
        seed: int = 0,
    ):
        self.variant = variant
        self.goals = goals
        self.n_goals = n_goals
        self.grid_width = grid_width
        self.grid_height = grid_height
        self.cell_size = cell_size
        self.obstacles = obstacles
        self.connectivity = connectivity
        self.allow_stay = allow_stay
        self.fixed_alpha = fixed_alpha
        self.prior_shape = prior_shape
        self.prior_scale = prior_scale
        self.p_stay = p_stay
        self.alpha_grid_lo = alpha_grid_lo
        self.alpha_grid_hi = alpha_grid_hi
        self.alpha_grid_points = alpha_grid_points
        self.alpha_grid_log = alpha_grid_log
        self.alpha_estimator = alpha_estimator
        self.horizon = horizon
        self.n_samples = n_samples
        self.bridge_gaps = bridge_gaps
        self.seed = seed

    # -- sklearn plumbing ---------------------------------------------------

    def _build(self) -> None:
        grid = GridMap.from_spec(
            self.grid_width,
            self.grid_height,
            self.cell_size,
            self.obstacles or (),
            self.connectivity,
            self.allow_stay,
        )
        if self.goals is not None:
            goal_set = GoalSet.from_coords(grid, self.goals)
        else:
            goal_set = boundary_goals(grid, self.n_goals)
        config = MethodConfig(
            variant=self.variant,
            fixed_alpha=self.fixed_alpha,
            prior_shape=self.prior_shape,
            prior_scale=self.prior_scale,
            p_stay=self.p_stay,
            grid_lo=self.alpha_grid_lo,
            grid_hi=self.alpha_grid_hi,
            grid_points=self.alpha_grid_points,
            grid_log=self.alpha_grid_log,
            estimator=self.alpha_estimator,
        )
        self.grid_ = grid
        self.model_ = IntentModel.build(grid, goal_set, config)

    def _require_fitted(self) -> None:
        if not hasattr(self, "belief_"):
            raise NotFittedError("call fit or partial_fit with observations first")

    # -- estimation -----------------------------------------------------

    def fit(self, X, y=None):
        """Reset the belief and consume an observed trajectory (k, 2)."""
        self._build()
        cells = check_trajectory(self.grid_, X)
        self.belief_ = init_belief(self.model_, cells[0])
        self.n_steps_ = 0
        for cell in cells[1:]:
            self.belief_ = ingest(self.model_, self.belief_, cell, self.bridge_gaps)
        self.n_steps_ = self.belief_.step
        return self

    def partial_fit(self, X, y=None):
        """Consume more observations without resetting the belief."""
        if not hasattr(self, "model_"):
            return self.fit(X, y)
        cells = check_trajectory(self.grid_, X)
        for cell in cells:
            self.belief_ = ingest(self.model_, self.belief_, cell, self.bridge_gaps)
        self.n_steps_ = self.belief_.step
        return self

    # -- forecasting ------------------------------------------------------

    def predict(self, X=None, horizon: int | None = None) -> np.ndarray:
        """Forecast mean positions (world coordinates) for the next steps.

        ``X``, when given, is ingested first (like ``partial_fit``).
        """
        if X is not None:
            self.partial_fit(X)
        return self.predict_result(horizon=horizon).means

    def predict_result(self, horizon: int | None = None) -> PredictionResult:
        """Full forecast: means, covariances, and per-goal rollout counts."""
        self._require_fitted()
        return predict(
            self.model_,
            self.belief_,
            n_samples=self.n_samples,
            horizon=horizon or self.horizon,
            seed=self.seed + self.belief_.step,
        )

    def predict_proba(self) -> np.ndarray:
        """Posterior probability of each candidate goal."""
        self._require_fitted()
        return np.array(self.belief_.goal_post)

    def alpha_estimate(self) -> float:
        """Overall posterior estimate of the path-following temperature."""
        self._require_fitted()
        return estimate_alpha_overall(self.model_, self.belief_)

    @property
    def belief(self) -> Belief:
        self._require_fitted()
        return self.belief_
