"""XOR difference spectra of index sets and the DS / GDS target spectra."""

from dataclasses import dataclass, field

import numpy as np

from .gf2 import FrameShape, walsh_hadamard_transform


@dataclass(frozen=True)
class IndexSet:
    """Sorted, distinct Hadamard row indices in ``[0, N+)`` with ``|set| = M``."""

    indices: tuple
    shape: FrameShape

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        object.__setattr__(self, "indices", idx)
        if len(set(idx)) != len(idx):
            raise ValueError(f"indices must be distinct: {idx}")
        if len(idx) != self.shape.m_rows:
            raise ValueError(
                f"expected {self.shape.m_rows} indices for {self.shape}, got {len(idx)}"
            )
        if idx and (idx[0] < 0 or idx[-1] >= self.shape.n_plus):
            raise ValueError(f"indices must lie in [0, {self.shape.n_plus})")

    @classmethod
    def from_mask(cls, mask, shape):
        return cls(tuple(np.flatnonzero(mask)), shape)

    def as_array(self):
        return np.asarray(self.indices, dtype=np.int64)

    def mask(self):
        m = np.zeros(self.shape.n_plus, dtype=bool)
        m[list(self.indices)] = True
        return m

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


@dataclass(frozen=True)
class TargetSpectrum:
    values: np.ndarray
    alpha_excess: float = 0.0
    integral: bool = field(default=False)


def difference_spectrum(s):
    """Count ordered pairs ``(a, b)`` of set members with ``a ^ b == l``.

    The diagonal pairs are included, so ``counts[0] == M`` and the counts
    sum to ``M**2``.
    """
    u = s.as_array()
    diffs = np.bitwise_xor.outer(u, u).ravel()
    return np.bincount(diffs, minlength=s.shape.n_plus).astype(np.int64)


def difference_spectra(masks):
    """Spectra for a batch of indicator rows, via the XOR autocorrelation theorem."""
    masks = np.asarray(masks, dtype=np.int64)
    w = walsh_hadamard_transform(masks)
    return walsh_hadamard_transform(w * w) // masks.shape[-1]


def ds_target(shape):
    """Flat difference-set spectrum; only defined when N is a power of two."""
    if not shape.is_power_of_two:
        raise ValueError(f"ds_target needs N == N+, got {shape}; use gds_target")
    n, m = shape.n_users, shape.m_rows
    values = np.empty(shape.n_plus, dtype=float)
    values[0] = m
    if n > 1:
        values[1:] = m * (m - 1) / (n - 1)
    integral = n == 1 or (m * (m - 1)) % (n - 1) == 0
    return TargetSpectrum(values, 0.0, integral)


def alpha_excess(shape):
    """Excess squared correlation allowed on the upper half of the index range."""
    n, m = shape.n_users, shape.m_rows
    if m == 1 or n == 1:
        return 0.0
    return 2.0 * (m - 1) * (1.0 - n / shape.n_plus) / (m * (n - 1))


def gds_target(shape):
    n, m = shape.n_users, shape.m_rows
    if n == 1:
        return TargetSpectrum(np.array([float(m)]), 0.0, True)
    base = m * (m - 1) / (n - 1)
    ratio = n / shape.n_plus
    values = np.full(shape.n_plus, ratio * base)
    values[shape.n_minus] = (2.0 * ratio - 1.0) * base
    values[0] = m
    integral = bool(np.all(np.abs(values - np.round(values)) < 1e-9))
    return TargetSpectrum(values, alpha_excess(shape), integral)


@dataclass(frozen=True)
class CorrelationTarget:
    """Three-level target for squared column correlations ``c_k**2``."""

    shape: FrameShape
    welch_level: float
    upper_level: float

    def levels(self):
        out = np.full(self.shape.n_plus, self.welch_level)
        out[self.shape.n_minus:] = self.upper_level
        out[0] = 1.0
        return out


def welch_bound(n, m):
    if n <= 1:
        return 0.0
    return (n - m) / ((n - 1) * m)


def target_correlation_profile(shape):
    w = welch_bound(shape.n_users, shape.m_rows)
    return CorrelationTarget(shape, w, w + alpha_excess(shape))


def is_difference_set(s):
    spectrum = difference_spectrum(s)
    target = ds_target(s.shape)
    return bool(np.array_equal(spectrum.astype(float), target.values))
