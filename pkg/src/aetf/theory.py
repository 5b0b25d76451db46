"""Limiting eigenvalue laws of scaled subframe Grams and their capacities.

Both laws have square-root edges. Integrals are taken in the angle
``x = lo + (hi - lo) sin^2(t)``, which cancels the edge behaviour and
leaves a smooth integrand for :func:`scipy.integrate.quad`.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

QUAD_OPTS = dict(epsabs=1e-11, epsrel=1e-11, limit=200)


@dataclass(frozen=True)
class SpectralLaw:
    kind: str
    beta: float
    gamma: float
    lambda_minus: float
    lambda_plus: float
    atom_mass: float = 0.0
    atom_location: float = 0.0
    zero_mass: float = 0.0

    def density(self, x):
        """Continuous part of the law (atoms excluded)."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.lambda_minus, self.lambda_plus
        inside = (x > lo) & (x < hi)
        xs = np.where(inside, x, 0.5 * (lo + hi))
        val = np.sqrt((hi - xs) * (xs - lo)) / (2 * np.pi * self.beta * xs * (1 - self.gamma * xs))
        return np.where(inside, val, 0.0)

    def _weight(self, theta):
        # density(x) dx after the sin^2 substitution
        lo, hi = self.lambda_minus, self.lambda_plus
        s, c = np.sin(theta), np.cos(theta)
        x = lo + (hi - lo) * s * s
        w = (hi - lo) ** 2 * 2 * s * s * c * c / (2 * np.pi * self.beta * (1 - self.gamma * x))
        return x, w

    def integrate(self, g, upper=None):
        """``int g(x) f(x) dx`` over the continuous part, up to ``upper`` if given."""
        lo, hi = self.lambda_minus, self.lambda_plus
        if hi <= lo:
            return 0.0
        t_max = np.pi / 2
        if upper is not None:
            if upper <= lo:
                return 0.0
            if upper < hi:
                t_max = np.arcsin(np.sqrt((upper - lo) / (hi - lo)))

        def integrand(t):
            x, w = self._weight(t)
            if x <= 0.0:
                return 0.0
            return g(x) * w / x

        val, _ = integrate.quad(integrand, 0.0, t_max, **QUAD_OPTS)
        return val

    def continuous_mass(self):
        return self.integrate(lambda x: 1.0)

    def total_mass(self):
        return self.continuous_mass() + self.atom_mass + self.zero_mass

    def mean(self):
        return self.integrate(lambda x: x) + self.atom_mass * self.atom_location

    def cdf(self, x):
        x = float(x)
        out = self.zero_mass if x >= 0 else 0.0
        out += self.integrate(lambda y: 1.0, upper=x)
        if self.atom_mass and x >= self.atom_location:
            out += self.atom_mass
        return out

    def cdf_grid(self, n=400):
        """Tabulated CDF on ``n`` points of the support, for vectorized lookups."""
        grid = np.linspace(self.lambda_minus, self.lambda_plus, n)
        return grid, np.array([self.cdf(x) for x in grid])


def mp_law(beta):
    """Marchenko-Pastur law with ratio ``beta = K / M``.

    For ``beta > 1`` the rank deficit shows up as ``zero_mass = 1 - 1/beta``.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    r = np.sqrt(beta)
    zero = max(0.0, 1.0 - 1.0 / beta)
    return SpectralLaw("marchenko_pastur", float(beta), 0.0, (1 - r) ** 2, (1 + r) ** 2, zero_mass=zero)


def manova_law(beta, gamma):
    """Wachter-Manova law for K random columns of an M x N tight frame.

    ``beta = K / M``, ``gamma = M / N``. Mass ``(1 + 1/beta - 1/(beta gamma))+``
    sits at ``1 / gamma``; for ``beta > 1`` a further ``1 - 1/beta`` sits at 0.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if beta * gamma > 1:
        raise ValueError(f"beta * gamma = {beta * gamma} exceeds 1 (K > N)")
    a = np.sqrt(beta * (1 - gamma))
    b = np.sqrt(1 - beta * gamma)
    atom = max(0.0, 1 + 1 / beta - 1 / (beta * gamma))
    zero = max(0.0, 1.0 - 1.0 / beta)
    return SpectralLaw(
        "wachter_manova", float(beta), float(gamma), (a - b) ** 2, (a + b) ** 2,
        atom_mass=atom, atom_location=1 / gamma, zero_mass=zero,
    )


def law_capacity_per_user(law, snr):
    val = law.integrate(lambda x: np.log2(1 + snr * x))
    if law.atom_mass:
        val += law.atom_mass * np.log2(1 + snr * law.atom_location)
    return float(val)


def law_practical_capacity_per_user(law, snr):
    if law.zero_mass > 0:
        return float("-inf")
    val = law.integrate(lambda x: np.log2(snr * x))
    if law.atom_mass:
        val += law.atom_mass * np.log2(snr * law.atom_location)
    return float(val)
