"""Monte-Carlo NOMA capacity of random K-column subframes."""

from dataclasses import dataclass

import numpy as np

ZERO_EIG_TOL = 1e-10
IID_MODES = ("fresh_frame_per_trial", "fixed_frame")


def db_to_linear(snr_db):
    return 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class CapacityConfig:
    k_active: int
    snr: float = 10.0
    trials: int = 1000
    seed: int = 0
    iid_mode: str = "fresh_frame_per_trial"
    epsilon_floor: float = 0.0

    def __post_init__(self):
        if self.k_active < 1:
            raise ValueError("k_active must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.snr <= 0:
            raise ValueError("snr must be positive (linear scale)")
        if self.iid_mode not in IID_MODES:
            raise ValueError(f"iid_mode must be one of {IID_MODES}")
        if self.epsilon_floor < 0:
            raise ValueError("epsilon_floor must be nonnegative")

    def beta(self, shape):
        return self.k_active / shape.m_rows

    def p(self, shape):
        return self.k_active / shape.n_users


@dataclass(frozen=True)
class CapacityEstimate:
    mean_capacity: float
    mean_practical: float
    stderr_capacity: float
    stderr_practical: float
    k_active: int
    m_rows: int
    trials: int
    singular_trial_count: int

    @property
    def capacity_per_user(self):
        return self.mean_capacity / self.k_active

    @property
    def practical_per_user(self):
        return self.mean_practical / self.k_active

    @property
    def capacity_per_resource(self):
        return self.mean_capacity / self.m_rows

    @property
    def practical_per_resource(self):
        return self.mean_practical / self.m_rows


def sample_subframe(f, k, rng):
    """Exactly ``k`` distinct column indices, uniformly, sorted."""
    n = f.shape.n_users
    if k > n:
        raise ValueError(f"cannot select {k} of {n} columns")
    return np.sort(rng.choice(n, size=k, replace=False))


def _eigs_from_columns(cols):
    """Descending Gram eigenvalues of column stacks ``(..., M, K)``."""
    m, k = cols.shape[-2:]
    if k <= m:
        g = np.swapaxes(cols, -1, -2) @ cols
        ev = np.linalg.eigvalsh(g)
    else:
        g = cols @ np.swapaxes(cols, -1, -2)
        ev = np.linalg.eigvalsh(g)
        ev = np.concatenate([np.zeros(ev.shape[:-1] + (k - m,)), ev], axis=-1)
    ev = np.where(ev < ZERO_EIG_TOL, 0.0, ev)
    return ev[..., ::-1]


def gram_eigenvalues(f, cols):
    """Eigenvalues of the K x K Gram of the selected unit-norm columns.

    Values below 1e-10 are clamped to exactly zero so rank deficiency is
    visible to :func:`practical_capacity`.
    """
    cols = np.asarray(cols)
    if len(np.unique(cols)) != len(cols):
        raise ValueError("column indices must be distinct")
    return _eigs_from_columns(f.entries[:, cols])


def capacity(eigs, snr):
    return np.sum(np.log2(1.0 + snr * np.asarray(eigs, dtype=float)), axis=-1)


def practical_capacity(eigs, snr, epsilon_floor=0.0):
    """``sum log2(snr * lambda)``; ``-inf`` on a zero eigenvalue unless floored."""
    ev = np.maximum(np.asarray(eigs, dtype=float), epsilon_floor)
    with np.errstate(divide="ignore"):
        return np.sum(np.log2(snr * ev), axis=-1)


def _trial_rng(seed, trial):
    return np.random.default_rng([int(seed) & (2**64 - 1), trial])


def _mean_stderr(x):
    x = np.asarray(x, dtype=float)
    mean = float(x.mean())
    if len(x) < 2 or not np.isfinite(mean):
        return mean, (0.0 if len(x) < 2 else float("nan"))
    return mean, float(x.std(ddof=1) / np.sqrt(len(x)))


def trial_eigenvalues(f, cfg):
    """``(trials, K)`` eigenvalue array; trial ``t`` draws from its own seeded stream.

    Frames carrying an ``iid_seed`` are redrawn per trial in
    ``fresh_frame_per_trial`` mode, so the estimate averages over the iid
    ensemble rather than one instance.
    """
    shape = f.shape
    k = cfg.k_active
    if k > shape.n_users:
        raise ValueError(f"k_active={k} exceeds N={shape.n_users}")
    fresh = f.iid_seed is not None and cfg.iid_mode == "fresh_frame_per_trial"
    m = shape.m_rows
    scale = 1.0 / np.sqrt(m)
    stack = np.empty((cfg.trials, m, k))
    for t in range(cfg.trials):
        rng = _trial_rng(cfg.seed, t)
        if fresh:
            stack[t] = (2.0 * rng.integers(0, 2, size=(m, k)) - 1.0) * scale
        else:
            stack[t] = f.entries[:, sample_subframe(f, k, rng)]
    return _eigs_from_columns(stack)


def monte_carlo(f, cfg):
    ev = trial_eigenvalues(f, cfg)
    cap = capacity(ev, cfg.snr)
    pcap = practical_capacity(ev, cfg.snr, cfg.epsilon_floor)
    singular = int(np.sum(~np.isfinite(pcap)))
    mc, sc = _mean_stderr(cap)
    mp, sp = _mean_stderr(pcap)
    return CapacityEstimate(mc, mp, sc, sp, cfg.k_active, f.shape.m_rows, cfg.trials, singular)
