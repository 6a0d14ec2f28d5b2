"""Seeded Monte Carlo estimators for c, S(nu), and the volume pair.

Reproducibility contract: an estimate is a pure function of
(scenario, quantity, samples, seed, shards).  Each shard s consumes its
own Philox stream keyed by [seed, (tag << 32) | s] (tag 0 for the main
stream, tag 1 for the rescue stream that replaces degenerate diagonal
draws), drawing in fixed-size blocks; shard partial sums are combined
in shard order.  The kernel backends return bitwise identical verdicts,
so estimates do not depend on the backend either.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _plans
from .measure import weight_exponents
from .ppt import canonical_diag, det_pt_accept

__all__ = [
    "DegenerateScenarioError",
    "Estimate",
    "VolumeEstimates",
    "SweepTable",
    "estimate_c",
    "estimate_S",
    "estimate_volumes",
    "sweep_S",
    "DEFAULT_SAMPLES",
]

DEFAULT_SAMPLES = 4_000_000
_BLOCK = 65536
_TINY_DIAG = 1e-15


class DegenerateScenarioError(RuntimeError):
    """No draw got any weight; ratio estimates are undefined."""


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    accepted: int
    seed: int
    shards: int

    def z_score(self, reference):
        """Standardized deviation from a reference value."""
        if self.stderr == 0.0:
            return 0.0 if self.value == reference else math.inf
        return (self.value - reference) / self.stderr


@dataclass(frozen=True)
class VolumeEstimates:
    V_tot: Estimate
    V_sep: Estimate
    P: Estimate


@dataclass(frozen=True)
class SweepTable:
    """One row per grid point: ratio coordinates, estimate, closed value."""

    alias: str
    grid: np.ndarray
    estimates: tuple
    closed: tuple

    def rows(self):
        for k in range(self.grid.shape[0]):
            yield (self.grid[k], self.estimates[k], self.closed[k])


def _check_samples(samples):
    samples = int(samples)
    if samples < 1000:
        raise ValueError("samples must be at least 1000, got %d" % samples)
    return samples


def _generator(seed, tag, shard):
    key = np.array(
        [seed % (1 << 64), ((tag << 32) | shard) % (1 << 64)], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))


def _shard_sizes(samples, shards):
    if shards < 1:
        raise ValueError("shards must be >= 1")
    base, rem = divmod(samples, shards)
    return [base + (1 if s < rem else 0) for s in range(shards)]


def _draw_simplex(gen, rescue, count, n):
    e = gen.standard_exponential((count, n))
    d = e / e.sum(axis=1, keepdims=True)
    bad = np.flatnonzero(d.min(axis=1) < _TINY_DIAG)
    while bad.size:
        e2 = rescue.standard_exponential((bad.size, n))
        d2 = e2 / e2.sum(axis=1, keepdims=True)
        d[bad] = d2
        bad = bad[d2.min(axis=1) < _TINY_DIAG]
    return d


def _is_real_qq(spec):
    return spec.split == "qubit-qubit" and all(f == "real" for _, _, f in spec.pairs)


def _real_qq_z6(spec, zz):
    """Scatter a sparse real two-qubit z batch into all six slots."""
    full = np.zeros((zz.shape[0], 6))
    order = {(1, 2): 0, (1, 3): 1, (1, 4): 2, (2, 3): 3, (2, 4): 4, (3, 4): 5}
    col = 0
    for i, j, _ in spec.pairs:
        full[:, order[(i, j)]] = zz[:, col]
        col += 1
    return full


def _bernoulli_estimate(count, samples, factor, seed, shards):
    p = count / samples
    value = factor * p
    stderr = factor * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return Estimate(
        value=value,
        stderr=stderr,
        samples=samples,
        accepted=count,
        seed=seed,
        shards=shards,
    )


def estimate_c(spec, samples=DEFAULT_SAMPLES, seed=0, shards=1):
    """Monte Carlo z-box measure of the positivity body."""
    samples = _check_samples(samples)
    plan = _plans.positivity_plan(spec)
    count = 0
    for shard, size in enumerate(_shard_sizes(samples, shards)):
        gen = _generator(seed, 0, shard)
        left = size
        while left > 0:
            b = min(_BLOCK, left)
            zz = gen.uniform(-1.0, 1.0, (b, spec.z_size))
            dd = np.ones((b, spec.n))
            count += int(_plans.run_plan(plan, dd, zz).sum())
            left -= b
    return _bernoulli_estimate(count, samples, 2.0 ** spec.z_size, seed, shards)


def estimate_S(spec, nu, samples=DEFAULT_SAMPLES, seed=0, shards=1):
    """Monte Carlo separability function at ratio coordinates nu.

    Measures the z-box region that is both positive and PPT at the
    canonical diagonal for nu; the result only depends on nu.
    """
    samples = _check_samples(samples)
    d = canonical_diag(spec.split, nu)
    pos_plan = _plans.positivity_plan(spec)
    fast = _is_real_qq(spec)
    if fast:
        nu_val = float(np.atleast_1d(np.asarray(nu, dtype=np.float64))[0])
    else:
        ppt_plan = _plans.ppt_plan(spec)
    count = 0
    for shard, size in enumerate(_shard_sizes(samples, shards)):
        gen = _generator(seed, 0, shard)
        left = size
        while left > 0:
            b = min(_BLOCK, left)
            zz = gen.uniform(-1.0, 1.0, (b, spec.z_size))
            dd = np.broadcast_to(d, (b, spec.n)).copy()
            ok = _plans.run_plan(pos_plan, dd, zz).astype(bool)
            if fast:
                ok &= det_pt_accept(_real_qq_z6(spec, zz), nu_val)
            else:
                ok &= _plans.run_plan(ppt_plan, dd, zz).astype(bool)
            count += int(ok.sum())
            left -= b
    return _bernoulli_estimate(count, samples, 2.0 ** spec.z_size, seed, shards)


def estimate_volumes(spec, samples=DEFAULT_SAMPLES, seed=0, shards=1):
    """Joint Monte Carlo over (diagonal, z): V_tot, V_sep, and their ratio.

    The PPT verdict is taken at each sampled diagonal directly.  V_sep
    equals V_tot exactly (same draws) whenever the scenario has no
    entangling entries, i.e. the partial transpose fixes every pair.
    """
    samples = _check_samples(samples)
    w = weight_exponents(spec)
    pos_plan = _plans.positivity_plan(spec)
    fast = _is_real_qq(spec)
    if not fast:
        ppt_plan = _plans.ppt_plan(spec)
    n = spec.n
    sx = sxx = sy = syy = sxy = 0.0
    npos = 0
    for shard, size in enumerate(_shard_sizes(samples, shards)):
        gen = _generator(seed, 0, shard)
        rescue = _generator(seed, 1, shard)
        left = size
        while left > 0:
            b = min(_BLOCK, left)
            dd = _draw_simplex(gen, rescue, b, n)
            zz = gen.uniform(-1.0, 1.0, (b, spec.z_size))
            wgt = np.prod(dd**w, axis=1)
            pos = _plans.run_plan(pos_plan, dd, zz).astype(bool)
            if fast:
                nu = (dd[:, 0] * dd[:, 3]) / (dd[:, 1] * dd[:, 2])
                sep = pos & det_pt_accept(_real_qq_z6(spec, zz), nu)
            else:
                sep = pos & _plans.run_plan(ppt_plan, dd, zz).astype(bool)
            x = np.where(pos, wgt, 0.0)
            y = np.where(sep, wgt, 0.0)
            sx += float(x.sum())
            sxx += float((x * x).sum())
            sy += float(y.sum())
            syy += float((y * y).sum())
            sxy += float((x * y).sum())
            npos += int(pos.sum())
            left -= b
    if sx <= 0.0:
        raise DegenerateScenarioError(
            "no positive draw in %d samples; cannot form volume estimates"
            % samples
        )
    norm = 2.0 ** spec.z_size / math.factorial(n - 1)
    nsamp = float(samples)
    mx = sx / nsamp
    my = sy / nsamp
    var_x = max(sxx / nsamp - mx * mx, 0.0)
    var_y = max(syy / nsamp - my * my, 0.0)
    cov = sxy / nsamp - mx * my
    v_tot = Estimate(
        value=norm * mx,
        stderr=norm * math.sqrt(var_x / nsamp),
        samples=samples,
        accepted=npos,
        seed=seed,
        shards=shards,
    )
    v_sep = Estimate(
        value=norm * my,
        stderr=norm * math.sqrt(var_y / nsamp),
        samples=samples,
        accepted=npos,
        seed=seed,
        shards=shards,
    )
    ratio = my / mx
    var_p = (
        var_y / (mx * mx)
        + ratio * ratio * var_x / (mx * mx)
        - 2.0 * ratio * cov / (mx * mx)
    ) / nsamp
    p_est = Estimate(
        value=ratio,
        stderr=math.sqrt(max(var_p, 0.0)),
        samples=samples,
        accepted=npos,
        seed=seed,
        shards=shards,
    )
    return VolumeEstimates(V_tot=v_tot, V_sep=v_sep, P=p_est)


def sweep_S(spec, grid, samples=DEFAULT_SAMPLES, seed=0, shards=1, closed=True):
    """estimate_S on a grid of ratio points, with catalog values when known.

    grid is (P,) for one-ratio splits or (P, n_ratios); point k uses
    seed + k so the whole table is reproducible from one seed.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim == 1:
        pts = grid[:, None]
    else:
        pts = grid
    if pts.shape[1] != spec.n_ratios:
        raise ValueError(
            "grid has %d ratio columns, split %s needs %d"
            % (pts.shape[1], spec.split, spec.n_ratios)
        )
    closed_vals = [None] * pts.shape[0]
    if closed:
        from . import closedforms

        try:
            entry = closedforms.catalog_lookup(spec)
        except closedforms.NotCatalogedError:
            entry = None
        if entry is not None and entry.S is not None:
            closed_vals = []
            for k in range(pts.shape[0]):
                try:
                    closed_vals.append(closedforms.eval_S(entry, pts[k]))
                except Exception:
                    closed_vals.append(None)
    ests = []
    for k in range(pts.shape[0]):
        nu = pts[k] if spec.n_ratios > 1 else float(pts[k, 0])
        ests.append(estimate_S(spec, nu, samples=samples, seed=seed + k, shards=shards))
    from .scenarios import scenario_alias

    return SweepTable(
        alias=scenario_alias(spec),
        grid=pts,
        estimates=tuple(ests),
        closed=tuple(closed_vals),
    )
