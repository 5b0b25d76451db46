"""Bipolar almost-equiangular tight frames from Hadamard rows and generalized difference sets."""

__version__ = "0.1.0"

from .capacity import CapacityConfig, CapacityEstimate, monte_carlo
from .frames import BipolarFrame, build_frame, random_bipolar_frame, verify_profile, welch_metrics
from .gf2 import FrameShape, walsh_hadamard_transform
from .search import GaConfig, GaResult, run_ga
from .spectra import IndexSet, difference_spectrum, ds_target, gds_target
from .theory import manova_law, mp_law
from .estimators import CapacityEstimator, GDSFrame, RandomBipolarFrame

__all__ = [
    "BipolarFrame", "CapacityConfig", "CapacityEstimate", "CapacityEstimator",
    "FrameShape", "GDSFrame", "GaConfig", "GaResult", "IndexSet", "RandomBipolarFrame",
    "build_frame", "difference_spectrum", "ds_target", "gds_target", "manova_law",
    "monte_carlo", "mp_law", "random_bipolar_frame", "run_ga", "verify_profile",
    "walsh_hadamard_transform", "welch_metrics",
]
