"""Equal-mass scalar quantizer for Bernoulli parameters under Jeffreys' prior.

Under the arcsine density ``1 / (pi * sqrt(t * (1 - t)))`` the CDF is
``(2 / pi) * arcsin(sqrt(t))``, so K equal-mass bins have closed-form edges
``sin^2(pi k / 2K)`` and the mass midpoint of bin k is
``sin^2(pi (2k + 1) / 4K)``.
"""

import math
from dataclasses import dataclass

import numpy as np

# Level-count rule K = ceil(1.772 * sqrt(n)); kept as an exact rational so
# the ceiling is computed in integer arithmetic.
LEVEL_NUM = 1772
LEVEL_DEN = 1000
# Exact constant sqrt(2 pi^2 ln2 (1/2 - 3 / (16 ln2))) = 1.7720008...
EXACT_LEVEL_CONSTANT = math.sqrt(2 * math.pi ** 2 * math.log(2) * (0.5 - 3 / (16 * math.log(2))))


def num_levels(n):
    """Number of representation levels for a population of ``n`` symbols."""
    n = int(n)
    if n < 1:
        raise ValueError("population must be >= 1")
    m = LEVEL_NUM * LEVEL_NUM * n
    root = math.isqrt(m - 1) + 1  # ceil(sqrt(m))
    return -(-root // LEVEL_DEN)


def bin_edges(K):
    k = np.arange(K + 1)
    edges = np.sin(np.pi * k / (2 * K)) ** 2
    edges[0], edges[-1] = 0.0, 1.0
    return edges


def representation_level(k, K):
    """Mass midpoint of bin ``k``; works elementwise on arrays."""
    return np.sin(np.pi * (2 * np.asarray(k) + 1) / (4 * np.asarray(K))) ** 2


def quantize_array(theta, K):
    theta = np.clip(np.asarray(theta, dtype=np.float64), 0.0, 1.0)
    K = np.asarray(K)
    k = np.floor((2 * K / np.pi) * np.arcsin(np.sqrt(theta))).astype(np.int64)
    k = np.minimum(k, K - 1)
    return k, representation_level(k, K)


def quantize(theta, K):
    """Return ``(bin index, representation level)`` for ``theta`` in [0, 1]."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if K < 1:
        raise ValueError("K must be >= 1")
    k, r = quantize_array(theta, K)
    return int(k), float(r)


def default_tau(n_bits):
    return math.isqrt(n_bits - 1) + 1 if n_bits > 0 else 1


@dataclass(frozen=True)
class QuantizerSpec:
    """Level-count policy for one compression run.

    ``population`` is the input length N in bits; ``tau`` only matters for
    scheme 2.
    """

    scheme: int = 0
    population: int = 1
    tau: int = 0

    def __post_init__(self):
        if self.scheme not in (0, 1, 2):
            raise ValueError(f"unknown scheme {self.scheme}")

    @property
    def k_fine(self):
        return num_levels(self.population)

    @property
    def k_coarse(self):
        return num_levels(max(self.tau, 1))

    def k_effective(self, state_count):
        return num_levels(-(-self.population // state_count))

    def levels(self, state_count, n_s):
        return scheme_levels(self.scheme, self.population, state_count, n_s, self.tau)


def scheme_levels(scheme, n_bits, state_count, n_s, tau):
    """Level count used to encode the bin index of one state."""
    if scheme == 0:
        return num_levels(n_bits)
    if scheme == 1:
        return num_levels(-(-n_bits // state_count))
    if scheme == 2:
        return num_levels(tau) if n_s < tau else num_levels(n_bits)
    raise ValueError(f"unknown scheme {scheme}")
