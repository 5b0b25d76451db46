"""Bipolar frames built from Hadamard rows or random signs, and their metrics."""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .gf2 import FrameShape, hadamard_entry, walsh_hadamard_transform
from .spectra import IndexSet, target_correlation_profile, welch_bound

ETF_TOL = 1e-12


@dataclass(frozen=True)
class BipolarFrame:
    """M x N frame of raw +-1 ``signs``; ``entries`` carries the 1/sqrt(M) scaling."""

    signs: np.ndarray = field(repr=False)
    shape: FrameShape
    row_indices: IndexSet = None
    iid_seed: int = None

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.int8)
        if s.shape != (self.shape.m_rows, self.shape.n_users):
            raise ValueError(f"signs have shape {s.shape}, expected {(self.shape.m_rows, self.shape.n_users)}")
        if not np.all(np.abs(s) == 1):
            raise ValueError("frame entries must be +1 or -1")
        s.setflags(write=False)
        object.__setattr__(self, "signs", s)

    @property
    def entries(self):
        return self.signs / np.sqrt(self.shape.m_rows)

    def gram(self):
        f = self.entries
        return f.T @ f

    def to_csv(self):
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(self.signs.tolist())
        return buf.getvalue()


@dataclass(frozen=True)
class CorrelationProfile:
    c: np.ndarray
    realized_ks: frozenset


@dataclass(frozen=True)
class ProfileReport:
    classification: str
    welch_level: float
    upper_level: float
    max_dev_lower: float
    max_dev_upper: float
    max_dev_welch: float
    max_dev_target: float


@dataclass(frozen=True)
class WelchReport:
    i_ms: float
    i_max: float
    welch_bound: float
    tightness_residual: float


def build_frame(s):
    shape = s.shape
    rows = s.as_array()[:, None]
    cols = np.arange(shape.n_users)[None, :]
    return BipolarFrame(hadamard_entry(rows, cols), shape, row_indices=s)


def random_bipolar_frame(shape, seed):
    rng = np.random.default_rng(seed)
    signs = 2 * rng.integers(0, 2, size=(shape.m_rows, shape.n_users), dtype=np.int8) - 1
    return BipolarFrame(signs, shape, iid_seed=seed)


def realized_differences(n_users):
    n = np.arange(n_users)
    d = np.bitwise_xor.outer(n, n)
    return frozenset(int(k) for k in np.unique(d[d > 0]))


def correlation_profile(s):
    """``c[k] = (1/M) sum_m (-1)^<k, u_m>``, the Gram entry of columns ``n`` and ``n ^ k``."""
    c = walsh_hadamard_transform(s.mask().astype(np.int64)) / s.shape.m_rows
    return CorrelationProfile(c, realized_differences(s.shape.n_users))


def excess_profile(s):
    """``M^2 (c_k^2 - welch)``: the Walsh-Hadamard image of the excess spectrum."""
    shape = s.shape
    c = correlation_profile(s).c
    return shape.m_rows**2 * (c**2 - welch_bound(shape.n_users, shape.m_rows))


def verify_profile(s, tol=ETF_TOL):
    shape = s.shape
    target = target_correlation_profile(shape)
    prof = correlation_profile(s)
    ks = np.array(sorted(prof.realized_ks), dtype=np.int64)
    c2 = prof.c[ks] ** 2 if len(ks) else np.zeros(0)
    dev_target = np.abs(c2 - target.levels()[ks]) if len(ks) else np.zeros(0)
    dev_welch = np.abs(c2 - target.welch_level)
    lower = ks < shape.n_minus

    def _max(a):
        return float(a.max()) if a.size else 0.0

    r_welch, r_target = _max(dev_welch), _max(dev_target)
    if r_welch <= tol:
        label = "exact-ETF"
    elif r_target <= tol:
        label = "exact-AETF"
    else:
        label = "approximate"
    return ProfileReport(
        classification=label,
        welch_level=target.welch_level,
        upper_level=target.upper_level,
        max_dev_lower=_max(dev_target[lower]),
        max_dev_upper=_max(dev_target[~lower]),
        max_dev_welch=r_welch,
        max_dev_target=r_target,
    )


def welch_metrics(f):
    n, m = f.shape.n_users, f.shape.m_rows
    g = f.gram()
    off = ~np.eye(n, dtype=bool)
    sq = np.abs(g[off]) ** 2
    i_ms = float(sq.mean()) if sq.size else 0.0
    i_max = float(sq.max()) if sq.size else 0.0
    rows = f.entries @ f.entries.T
    resid = float(np.max(np.abs(rows - (n / m) * np.eye(m))))
    return WelchReport(i_ms, i_max, welch_bound(n, m), resid)
