"""Product measure on diagonals and z variables, plus normalizations.

The diagonal lives on the probability simplex with plain Lebesgue
measure (total mass 1/(n-1)!).  Each kept pair contributes a uniform
box [-1, 1]^f in its f components, total mass 2^F.  Volumes quoted by
this package are with respect to that plain product measure; multiply
by hs_normalization(spec) to convert to the Hilbert-Schmidt convention,
which carries 2^(F/2) from the off-diagonal metric and sqrt(n) from the
unit-trace slice.

Integrating the positivity indicator over z at fixed diagonal gives a
diagonal-independent constant c (the Bloore factorization again), while
the PPT indicator depends on the diagonal only through the ratio
coordinates.  The weight prod_i d_i^(w_i) with w = weight_exponents
is what the off-diagonal sqrt(d_i d_j) factors integrate to, so

    V_tot = c * integral over simplex of prod d^w
          = c * prod Gamma(w_i + 1) / Gamma(n + sum w).
"""

import math

import numpy as np

from .scenarios import FIELD_COMPONENTS, ShapeMismatchError

__all__ = [
    "DomainError",
    "weight_exponents",
    "simplex_mass",
    "box_mass",
    "sample_simplex",
    "sample_z",
    "hs_normalization",
    "dirichlet_total",
    "spheroidal_to_z",
]


class DomainError(ValueError):
    """Input outside the parameterization's domain."""


def weight_exponents(spec):
    """Exponent w_i of d_i in the integrated off-diagonal weight.

    Each pair (i, j) with f components contributes f/2 to both w_i and
    w_j, because every component carries sqrt(d_i d_j).
    """
    w = np.zeros(spec.n)
    for i, j, f in spec.pairs:
        half = FIELD_COMPONENTS[f] / 2.0
        w[i - 1] += half
        w[j - 1] += half
    return w


def simplex_mass(n):
    """Lebesgue mass of the unit simplex in the sum-to-one coordinates."""
    return 1.0 / math.factorial(n - 1)


def box_mass(spec):
    """Mass of the z box, 2^F."""
    return 2.0 ** spec.z_size


def sample_simplex(rng, n, size):
    """Uniform (Lebesgue) draws from the probability simplex, (size, n)."""
    e = rng.standard_exponential((size, n))
    return e / e.sum(axis=1, keepdims=True)


def sample_z(rng, spec, size):
    """Uniform draws from the z box, (size, F)."""
    return rng.uniform(-1.0, 1.0, (size, spec.z_size))


def hs_normalization(spec):
    """Hilbert-Schmidt volume factor: 2^(F/2) * sqrt(n)."""
    return 2.0 ** (spec.z_size / 2.0) * math.sqrt(spec.n)


def dirichlet_total(spec):
    """Integral over the simplex of prod d_i^(w_i) for this scenario."""
    w = weight_exponents(spec)
    log_num = sum(math.lgamma(wi + 1.0) for wi in w)
    return math.exp(log_num - math.lgamma(spec.n + float(w.sum())))


def spheroidal_to_z(gamma1, gamma2, theta1, theta2, z12, big_z34):
    """Trigonometric chart of the full-real two-qubit positivity body.

    Coordinates: 0 <= gamma1 <= 1, gamma1 <= gamma2 <= 1/gamma1,
    |z12| <= 1, |Z34| <= gamma1, angles in [0, 2 pi).  Returns the six
    z variables (z12, z13, z14, z23, z24, z34) and the chart's Jacobian
    (1 - z12^2) * gamma1 / (2 * gamma2); integrating it over the chart
    box reproduces the positivity mass 32 pi^2 / 27.  Raises DomainError
    off the chart.  Vectorized over ndarray inputs.
    """
    gamma1 = np.asarray(gamma1, dtype=np.float64)
    gamma2 = np.asarray(gamma2, dtype=np.float64)
    theta1 = np.asarray(theta1, dtype=np.float64)
    theta2 = np.asarray(theta2, dtype=np.float64)
    z12 = np.asarray(z12, dtype=np.float64)
    big_z34 = np.asarray(big_z34, dtype=np.float64)
    shape = np.broadcast_shapes(
        gamma1.shape, gamma2.shape, theta1.shape, theta2.shape, z12.shape,
        big_z34.shape,
    )
    gamma1, gamma2, theta1, theta2, z12, big_z34 = (
        np.broadcast_to(a, shape)
        for a in (gamma1, gamma2, theta1, theta2, z12, big_z34)
    )
    bad = (
        (gamma1 < 0.0)
        | (gamma1 > 1.0)
        | (gamma2 < gamma1)
        | (gamma2 * gamma1 > 1.0)
        | (np.abs(z12) > 1.0)
        | (np.abs(big_z34) > gamma1)
        | (theta1 < 0.0)
        | (theta1 >= 2.0 * np.pi)
        | (theta2 < 0.0)
        | (theta2 >= 2.0 * np.pi)
    )
    if np.any(bad):
        raise DomainError("point outside the spheroidal chart")
    k1 = np.sqrt((1.0 - gamma1 * gamma2) / 2.0)
    k2 = np.sqrt((1.0 - gamma1 / gamma2) / 2.0)
    sp = np.sqrt(1.0 + z12)
    sm = np.sqrt(1.0 - z12)
    z13 = k1 * (sp * np.sin(theta1) + sm * np.cos(theta1))
    z23 = k1 * (sp * np.sin(theta1) - sm * np.cos(theta1))
    z14 = k2 * (sp * np.sin(theta2) + sm * np.cos(theta2))
    z24 = k2 * (sp * np.sin(theta2) - sm * np.cos(theta2))
    z34 = 2.0 * k1 * k2 * np.cos(theta1 - theta2) + big_z34
    jac = (1.0 - z12 * z12) * gamma1 / (2.0 * gamma2)
    z = np.stack([z12, z13, z14, z23, z24, z34], axis=-1)
    return z, jac
