"""Relaxed-constraint bounds for the fully populated real two-qubit case.

Exact PPT testing of the 9-parameter real scenario has no known closed
form, but replacing the block-transpose positivity test with a subset of
its principal-minor conditions does.  Each relaxation accepts a superset
of the PPT region, so the share of positivity volume passing a relaxed
test upper-bounds the exact ratio.  This module evaluates those relaxed
separability functions, the derived probability bounds, and seeded Monte
Carlo estimates of the same quantities with the relaxed predicates, so
closed form and sampling can be checked against each other.

Values here use the rescaled (plain-Lebesgue) convention: sixteen times
the unit-diagonal normalization used by the catalog, matching the volume
constants this construction is usually quoted in.
"""

import math

import numpy as np
from scipy.integrate import quad

from . import _plans
from .closedforms import incomplete_beta, jacobian_mu, ratio_expectation
from .estimator import (
    DEFAULT_SAMPLES,
    _BLOCK,
    _bernoulli_estimate,
    _check_samples,
    _draw_simplex,
    _generator,
    _shard_sizes,
    Estimate,
)
from .measure import DomainError, weight_exponents
from .scenarios import make_scenario

__all__ = [
    "RELAXATIONS",
    "BOUND_KINDS",
    "HS_BOX_CONSTANT",
    "HS_TOTAL_VOLUME",
    "UnsupportedRelaxationError",
    "UnknownBoundError",
    "approx_S",
    "quasi_s",
    "bound_volume",
    "bound_probability",
    "estimate_relaxed_S",
    "estimate_relaxed_probability",
]


class UnsupportedRelaxationError(ValueError):
    """The requested relaxation has no closed-form evaluation path."""


class UnknownBoundError(KeyError):
    """Not one of the recognized bound kinds."""


FULL_REAL = make_scenario(
    "qubit-qubit",
    [(i, j, "real") for i in range(1, 5) for j in range(i + 1, 5)],
)

# 2**(F/2) * sqrt(n) for six real entries of a 4x4 matrix
_HS_SCALE = 16.0

HS_BOX_CONSTANT = 512.0 * math.pi**2 / 27.0
HS_TOTAL_VOLUME = math.pi**4 / 60480.0

RELAXATIONS = ("minor14", "minor23", "minor14+3x3")
BOUND_KINDS = ("upper-single-minor", "lower-pieced", "upper-with-3x3")

_RELAX_NAMES = {
    "minor14": "minor14",
    "minor23": "minor23",
    "minor14+3x3": "minor14+3x3",
    "minor14plus3x3": "minor14+3x3",
}
_BOUND_NAMES = {
    "upper-single-minor": "upper-single-minor",
    "uppersingleminor": "upper-single-minor",
    "lower-pieced": "lower-pieced",
    "lowerpieced": "lower-pieced",
    "upper-with-3x3": "upper-with-3x3",
    "upperwith3x3": "upper-with-3x3",
}


def _canon_relaxation(tag):
    key = str(tag).strip().lower()
    if key not in _RELAX_NAMES:
        raise UnsupportedRelaxationError(
            "unknown relaxation %r; choose from %s" % (tag, RELAXATIONS)
        )
    return _RELAX_NAMES[key]


def _canon_bound(kind):
    key = str(kind).strip().lower()
    if key not in _BOUND_NAMES:
        raise UnknownBoundError(
            "unknown bound kind %r; choose from %s" % (kind, BOUND_KINDS)
        )
    return _BOUND_NAMES[key]


def approx_S(relaxation, nu):
    """Closed-form relaxed separability function, rescaled convention.

    minor14 keeps only the quadratic test nu * z14**2 <= 1 that the block
    transpose imposes on the (1,4) entry; minor23 keeps the mirrored test
    z23**2 <= nu.  Each is constant at the box constant on the side where
    its test is vacuous and decays on the other side.  The combined
    minor14+3x3 relaxation has no closed ratio form and must be sampled;
    asking for it here raises UnsupportedRelaxationError.
    """
    tag = _canon_relaxation(relaxation)
    nu = float(nu)
    if not (nu > 0.0) or not math.isfinite(nu):
        raise DomainError("nu must be positive and finite, got %r" % (nu,))
    if tag == "minor14+3x3":
        raise UnsupportedRelaxationError(
            "minor14+3x3 has no closed form; use estimate_relaxed_S"
        )
    if tag == "minor23":
        nu = 1.0 / nu
    if nu <= 1.0:
        return HS_BOX_CONSTANT
    return 256.0 * math.pi**2 * (3.0 * nu - 1.0) / (27.0 * nu**1.5)


def quasi_s(mu):
    """Relaxed separability profile in the side-length variable mu.

    Valid for 0 < mu <= 1 (mu**2 plays the role of the diagonal ratio, a
    substitution that keeps the incomplete-beta arguments polynomial).
    Decreases monotonically from 52 pi**3 / 9 at mu -> 0+ to 5 pi**4 / 3
    at mu = 1.
    """
    mu = float(mu)
    if not (mu > 0.0):
        raise DomainError("mu must be positive, got %r" % (mu,))
    if mu > 1.0:
        raise DomainError("mu must not exceed 1, got %r" % (mu,))
    x = mu * mu
    b1 = incomplete_beta(0.5, 1.5, x)
    b2 = incomplete_beta(1.5, 1.5, x)
    b3 = incomplete_beta(2.5, 1.5, x)
    return (
        math.pi**3
        * (13.0 * b1 * x + (2.0 * x - 13.0) * b2 - 2.0 * b3)
        / (3.0 * mu**3)
    )


def _minor_fraction(r):
    """Share of the box constant surviving the single-entry test at ratio r."""
    if r <= 1.0:
        return 1.0
    u = 1.0 / math.sqrt(r)
    return 0.5 * (3.0 * u - u**3)


def bound_volume(kind):
    """Relaxed-region volume (rescaled convention) behind each bound.

    Computed by quadrature against the exact ratio law of the fully
    populated real scenario, not from tabulated constants, so agreement
    with the quoted closed forms is a genuine check.
    """
    kind = _canon_bound(kind)
    w = weight_exponents(FULL_REAL) + 1.0
    shapes = ((w[0], w[3]), (w[1], w[2]))
    if kind == "upper-single-minor":
        mean = ratio_expectation(_minor_fraction, *shapes)
        return HS_TOTAL_VOLUME * mean
    if kind == "lower-pieced":
        mean = ratio_expectation(
            lambda r: _minor_fraction(r) + _minor_fraction(1.0 / r) - 1.0,
            *shapes,
        )
        return HS_TOTAL_VOLUME * mean
    closed_part = 11.0 * math.pi**4 / 2116800.0
    tail, _ = quad(
        lambda m: jacobian_mu(m) * quasi_s(m),
        0.0,
        1.0,
        epsabs=1e-13,
        epsrel=1e-11,
        limit=200,
    )
    return closed_part + tail


def bound_probability(kind):
    """One of the three probability bounds for the fully populated real case.

    upper-single-minor and upper-with-3x3 genuinely upper-bound the exact
    separability probability (their feasible sets contain the PPT set).
    lower-pieced is the two-test inclusion-exclusion value; it bounds the
    both-tests share from below, not the exact probability, and is
    reported for completeness.
    """
    return bound_volume(kind) / HS_TOTAL_VOLUME


def _relaxed_mask(tag, zz, nu):
    z12 = zz[:, 0]
    z13 = zz[:, 1]
    z14 = zz[:, 2]
    z23 = zz[:, 3]
    if tag == "minor23":
        return z23 * z23 <= nu
    ok = nu * z14 * z14 <= 1.0
    if tag == "minor14+3x3":
        ok = ok & (
            1.0
            + 2.0 * np.sqrt(nu) * z12 * z13 * z14
            - z12 * z12
            - z13 * z13
            - nu * z14 * z14
            >= 0.0
        )
    return ok


def estimate_relaxed_S(relaxation, nu, samples=DEFAULT_SAMPLES, seed=0, shards=1):
    """Monte Carlo relaxed separability function at ratio nu, rescaled.

    Samples the six-entry box, keeps draws passing full positivity and the
    relaxation's tests at this ratio, and scales the acceptance share by
    the box mass and the convention factor.  Deterministic in
    (relaxation, nu, samples, seed, shards).
    """
    tag = _canon_relaxation(relaxation)
    nu = float(nu)
    if not (nu > 0.0) or not math.isfinite(nu):
        raise DomainError("nu must be positive and finite, got %r" % (nu,))
    samples = _check_samples(samples)
    pos_plan = _plans.positivity_plan(FULL_REAL)
    d = np.full(4, 0.25)
    count = 0
    for shard, size in enumerate(_shard_sizes(samples, shards)):
        gen = _generator(seed, 0, shard)
        left = size
        while left > 0:
            b = min(_BLOCK, left)
            zz = gen.uniform(-1.0, 1.0, (b, 6))
            dd = np.broadcast_to(d, (b, 4)).copy()
            ok = _plans.run_plan(pos_plan, dd, zz).astype(bool)
            ok &= _relaxed_mask(tag, zz, nu)
            count += int(ok.sum())
            left -= b
    return _bernoulli_estimate(
        count, samples, _HS_SCALE * 2.0**6, seed, shards
    )


def estimate_relaxed_probability(relaxation, samples=DEFAULT_SAMPLES, seed=0, shards=1):
    """Monte Carlo share of positivity volume passing a relaxed test.

    Joint draw over the diagonal simplex and the z box with the scenario's
    diagonal weights; the ratio estimate uses the delta method for its
    standard error.  Comparable to bound_probability of the matching kind.
    """
    tag = _canon_relaxation(relaxation)
    samples = _check_samples(samples)
    pos_plan = _plans.positivity_plan(FULL_REAL)
    w = weight_exponents(FULL_REAL)
    sx = sxx = sy = syy = sxy = 0.0
    npos = 0
    for shard, size in enumerate(_shard_sizes(samples, shards)):
        gen = _generator(seed, 0, shard)
        rescue = _generator(seed, 1, shard)
        left = size
        while left > 0:
            b = min(_BLOCK, left)
            dd = _draw_simplex(gen, rescue, b, 4)
            zz = gen.uniform(-1.0, 1.0, (b, 6))
            wgt = np.prod(dd**w, axis=1)
            pos = _plans.run_plan(pos_plan, dd, zz).astype(bool)
            nu = (dd[:, 0] * dd[:, 3]) / (dd[:, 1] * dd[:, 2])
            rel = pos & _relaxed_mask(tag, zz, nu)
            x = np.where(pos, wgt, 0.0)
            y = np.where(rel, wgt, 0.0)
            sx += float(x.sum())
            sxx += float((x * x).sum())
            sy += float(y.sum())
            syy += float((y * y).sum())
            sxy += float((x * y).sum())
            npos += int(pos.sum())
            left -= b
    nsamp = float(samples)
    mx = sx / nsamp
    my = sy / nsamp
    if mx <= 0.0:
        raise DomainError("no positive draw in %d samples" % samples)
    var_x = max(sxx / nsamp - mx * mx, 0.0)
    var_y = max(syy / nsamp - my * my, 0.0)
    cov = sxy / nsamp - mx * my
    ratio = my / mx
    var_p = (
        var_y / (mx * mx)
        - 2.0 * ratio * cov / (mx * mx)
        + ratio * ratio * var_x / (mx * mx)
    )
    stderr = math.sqrt(max(var_p, 0.0) / nsamp)
    return Estimate(
        value=ratio,
        stderr=stderr,
        samples=samples,
        accepted=npos,
        seed=seed,
        shards=shards,
    )
