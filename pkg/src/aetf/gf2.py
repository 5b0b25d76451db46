"""Index arithmetic over GF(2)^L and the Sylvester Hadamard kernel."""

from dataclasses import dataclass

import numpy as np


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FrameShape:
    """Dimensions of an M x N frame carved out of an N+ x N+ Hadamard matrix.

    ``n_plus`` is the least power of two >= ``n_users`` and ``n_minus`` is
    half of it. Construction rejects shapes outside ``n_minus < N <= n_plus``
    and ``1 <= M <= N``.
    """

    n_users: int
    m_rows: int

    def __post_init__(self):
        n, m = self.n_users, self.m_rows
        if int(n) != n or int(m) != m:
            raise ValueError("n_users and m_rows must be integers")
        object.__setattr__(self, "n_users", int(n))
        object.__setattr__(self, "m_rows", int(m))
        if self.n_users < 1:
            raise ValueError(f"n_users must be positive, got {n}")
        if not 1 <= self.m_rows <= self.n_users:
            raise ValueError(f"need 1 <= m_rows <= n_users, got M={m}, N={n}")

    @property
    def l_bits(self):
        return max(0, (self.n_users - 1).bit_length())

    @property
    def n_plus(self):
        return 1 << self.l_bits

    @property
    def n_minus(self):
        return self.n_plus // 2

    @property
    def gamma(self):
        return self.m_rows / self.n_users

    @property
    def is_power_of_two(self):
        return self.n_users == self.n_plus

    def __str__(self):
        return f"(N={self.n_users}, M={self.m_rows}, N+={self.n_plus})"


def binary_inner(i, j):
    """Parity of the bitwise AND of ``i`` and ``j``. Works elementwise on arrays."""
    if isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)):
        return bin(int(i) & int(j)).count("1") & 1
    x = np.bitwise_and(np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64))
    return (np.bitwise_count(x) & 1).astype(np.int64)


def hadamard_entry(i, j):
    return 1 - 2 * binary_inner(i, j)


def xor_diff(a, b):
    """Group difference in GF(2)^L, which is just XOR."""
    return np.bitwise_xor(a, b)


def hadamard_matrix(n_plus):
    """Sylvester Hadamard matrix ``H[i, j] = (-1)^<i, j>`` as int8."""
    if not _is_power_of_two(n_plus):
        raise ValueError(f"Hadamard order must be a power of two, got {n_plus}")
    idx = np.arange(n_plus)
    return hadamard_entry(idx[:, None], idx[None, :]).astype(np.int8)


def walsh_hadamard_transform(v):
    """Unnormalized fast Walsh-Hadamard transform along the last axis.

    ``out[..., k] = sum_l v[..., l] * (-1)^<k, l>``. Applying it twice
    multiplies by the length. Integer input stays integer.
    """
    v = np.asarray(v)
    n = v.shape[-1]
    if not _is_power_of_two(n):
        raise ValueError(f"transform length must be a power of two, got {n}")
    out = v.astype(np.result_type(v.dtype, np.int64), copy=True)
    lead = out.shape[:-1]
    h = 1
    while h < n:
        blocks = out.reshape(*lead, n // (2 * h), 2, h)
        a = blocks[..., 0, :].copy()
        b = blocks[..., 1, :]
        blocks[..., 0, :] += b
        blocks[..., 1, :] = a - b
        h *= 2
    return out


def walsh_hadamard_direct(v):
    """O(n^2) reference transform used to check the butterfly."""
    v = np.asarray(v)
    return v @ hadamard_matrix(v.shape[-1]).astype(np.result_type(v.dtype, np.int64))
