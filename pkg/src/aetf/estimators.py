"""scikit-learn style wrappers.

A fitted frame estimator acts as a spreading transformer: ``transform``
maps per-user symbols of shape ``(n_samples, N)`` to the ``(n_samples, M)``
superposed chip sequences ``X @ F.T``. ``CapacityEstimator`` consumes a
fitted frame (or a :class:`BipolarFrame`) and exposes the Monte-Carlo
capacity as fitted attributes.
"""

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .capacity import IID_MODES, CapacityConfig, db_to_linear, monte_carlo
from .frames import BipolarFrame, build_frame, random_bipolar_frame, verify_profile
from .gf2 import FrameShape
from .search import GaConfig, run_ga


def check_shape(n_users, m_rows):
    for name, v in (("n_users", n_users), ("m_rows", m_rows)):
        if not isinstance(v, numbers.Integral) or isinstance(v, bool):
            raise TypeError(f"{name} must be an integer, got {v!r}")
    return FrameShape(int(n_users), int(m_rows))


def check_seed(random_state):
    if random_state is None:
        return 0
    if isinstance(random_state, numbers.Integral) and random_state >= 0:
        return int(random_state)
    raise ValueError(f"random_state must be a nonnegative integer, got {random_state!r}")


class _FrameTransformerMixin(TransformerMixin):
    def transform(self, X):
        check_is_fitted(self, "frame_")
        X = check_array(X, dtype=[np.float64, np.complex128])
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.frame_.entries.T

    def _fitted(self, frame):
        self.frame_ = frame
        self.components_ = frame.entries
        self.n_features_in_ = frame.shape.n_users
        return self


class GDSFrame(_FrameTransformerMixin, BaseEstimator):
    """AETF built from Hadamard rows indexed by a GA-found generalized difference set.

    ``fit`` ignores ``X`` (the construction depends only on the shape).
    """

    def __init__(self, n_users=16, m_rows=6, population_size=100, max_generations=2000,
                 crossover_prob=0.9, mutation_prob=0.1, weight_peak=1.0,
                 weight_rest=1e-4, success_threshold=1e-9, random_state=0):
        self.n_users = n_users
        self.m_rows = m_rows
        self.population_size = population_size
        self.max_generations = max_generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.weight_peak = weight_peak
        self.weight_rest = weight_rest
        self.success_threshold = success_threshold
        self.random_state = random_state

    def fit(self, X=None, y=None):
        shape = check_shape(self.n_users, self.m_rows)
        cfg = GaConfig(
            population_size=self.population_size,
            max_generations=self.max_generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            weight_peak=self.weight_peak,
            weight_rest=self.weight_rest,
            rng_seed=check_seed(self.random_state),
            success_threshold=self.success_threshold,
        )
        result = run_ga(shape, cfg)
        self.best_set_ = result.best_set
        self.fitness_ = result.best_fitness
        self.fitness_history_ = result.fitness_history
        self.n_iter_ = result.generations_run
        self.converged_ = result.converged
        return self._fitted(build_frame(result.best_set))

    def profile_report(self, tol=1e-12):
        check_is_fitted(self, "best_set_")
        return verify_profile(self.best_set_, tol)

    def score(self, X=None, y=None):
        """Negated GA fitness, so larger is better."""
        check_is_fitted(self, "fitness_")
        return -self.fitness_


class RandomBipolarFrame(_FrameTransformerMixin, BaseEstimator):
    def __init__(self, n_users=16, m_rows=6, random_state=0):
        self.n_users = n_users
        self.m_rows = m_rows
        self.random_state = random_state

    def fit(self, X=None, y=None):
        shape = check_shape(self.n_users, self.m_rows)
        return self._fitted(random_bipolar_frame(shape, check_seed(self.random_state)))


class CapacityEstimator(BaseEstimator):
    """Monte-Carlo capacity of random K-column subframes.

    ``fit`` accepts a :class:`BipolarFrame` or a fitted frame estimator.
    """

    def __init__(self, k_active=4, snr_db=10.0, trials=1000, iid_mode="fresh_frame_per_trial",
                 epsilon_floor=0.0, random_state=0):
        self.k_active = k_active
        self.snr_db = snr_db
        self.trials = trials
        self.iid_mode = iid_mode
        self.epsilon_floor = epsilon_floor
        self.random_state = random_state

    def fit(self, X, y=None):
        frame = X.frame_ if hasattr(X, "frame_") else X
        if not isinstance(frame, BipolarFrame):
            raise TypeError("fit expects a BipolarFrame or a fitted frame estimator")
        if self.iid_mode not in IID_MODES:
            raise ValueError(f"iid_mode must be one of {IID_MODES}")
        cfg = CapacityConfig(
            k_active=self.k_active,
            snr=db_to_linear(self.snr_db),
            trials=self.trials,
            seed=check_seed(self.random_state),
            iid_mode=self.iid_mode,
            epsilon_floor=self.epsilon_floor,
        )
        if cfg.k_active > frame.shape.n_users:
            raise ValueError(f"k_active={cfg.k_active} exceeds N={frame.shape.n_users}")
        self.estimate_ = monte_carlo(frame, cfg)
        self.capacity_per_user_ = self.estimate_.capacity_per_user
        self.practical_per_user_ = self.estimate_.practical_per_user
        return self
