"""Partial transposition in the Bloore picture.

For every supported split the partial transpose is an in-place transpose
of square sub-blocks: block size 2 for qubit-qubit, 3 for the qutrit
splits, 4 for the three-qubit bipartite cut (last two qubits grouped),
and 2 for the tripartite cut (transpose on the last qubit).

On z variables the transpose acts combinatorially.  A pair inside a
diagonal block is conjugated in place; a cross-block pair either stays
put (same position within the block) or trades places with a partner
pair, picking up the square root of a diagonal ratio because the moved
entry is re-expressed relative to its new diagonal elements.  Those
ratios are the scenario's natural coordinates nu_1..nu_k.
"""

import numpy as np

from .scenarios import SPLITS, ScenarioSpec, ShapeMismatchError, UnknownSplitError

__all__ = [
    "ZeroDiagonalError",
    "NonPositiveRatioError",
    "pt_pair_map",
    "partial_transpose",
    "ratio_coords",
    "canonical_diag",
    "ppt_predicate",
    "ppt_predicate_batch",
    "det_pt_4x4",
    "det_pt_accept",
]


class ZeroDiagonalError(ValueError):
    """A diagonal entry needed by a ratio is zero (or negative)."""


class NonPositiveRatioError(ValueError):
    """canonical_diag needs every ratio to be finite and > 0."""


def _split(split):
    if isinstance(split, ScenarioSpec):
        split = split.split
    if split not in SPLITS:
        raise UnknownSplitError("unknown split %r" % (split,))
    return SPLITS[split]


def pt_pair_map(split):
    """Map each 1-based upper pair (i, j) to (ti, tj, conjugated).

    Applying the map twice is the identity.  Within-block pairs map to
    themselves with conjugated=True; cross-block pairs with equal
    in-block position map to themselves unconjugated; the rest swap with
    their partner pair unconjugated.
    """
    sp = _split(split)
    n, b = sp.n, sp.block
    out = {}
    for i0 in range(n):
        for j0 in range(i0 + 1, n):
            bi, r = divmod(i0, b)
            bj, c = divmod(j0, b)
            if bi == bj:
                out[(i0 + 1, j0 + 1)] = (i0 + 1, j0 + 1, True)
            else:
                ti = bi * b + c
                tj = bj * b + r
                out[(i0 + 1, j0 + 1)] = (ti + 1, tj + 1, False)
    return out


def partial_transpose(m, split):
    """Block transpose of a dense matrix (complex (n,n) or (n,n,4))."""
    sp = _split(split)
    n, b = sp.n, sp.block
    m = np.asarray(m)
    if m.shape[:2] != (n, n):
        raise ShapeMismatchError(
            "matrix shape %s does not match split %s (n=%d)" % (m.shape, sp.name, n)
        )
    g = n // b
    if m.ndim == 2:
        return (
            m.reshape(g, b, g, b).swapaxes(1, 3).reshape(n, n).copy()
        )
    if m.ndim == 3 and m.shape[2] == 4:
        return (
            m.reshape(g, b, g, b, 4).swapaxes(1, 3).reshape(n, n, 4).copy()
        )
    raise ShapeMismatchError("expected (n, n) or (n, n, 4) array")


# Ratio coordinates, one tuple of (numerator pair, denominator pair) of
# 1-based diagonal indices per ratio.
_RATIO_DEFS = {
    "qubit-qubit": (((1, 4), (2, 3)),),
    "qubit-qutrit": (((1, 5), (2, 4)), ((2, 6), (3, 5))),
    "qutrit-qutrit": (
        ((1, 5), (2, 4)),
        ((2, 6), (3, 5)),
        ((4, 8), (5, 7)),
        ((5, 9), (6, 8)),
    ),
    "3qubit-bipartite": (
        ((1, 6), (2, 5)),
        ((2, 7), (3, 6)),
        ((3, 8), (4, 7)),
    ),
    "3qubit-tripartite": (
        ((1, 4), (2, 3)),
        ((4, 5), (3, 6)),
        ((5, 8), (6, 7)),
    ),
}


def ratio_coords(diag, split):
    """The diagonal ratios nu_1..nu_k for a given diagonal vector."""
    sp = _split(split)
    diag = np.asarray(diag, dtype=np.float64)
    if diag.shape != (sp.n,):
        raise ShapeMismatchError(
            "diag has shape %s, expected (%d,)" % (diag.shape, sp.n)
        )
    if np.any(diag <= 0.0):
        raise ZeroDiagonalError("ratio coordinates need all diagonal entries > 0")
    out = np.empty(sp.n_ratios)
    for k, ((a, b), (c, d)) in enumerate(_RATIO_DEFS[sp.name]):
        out[k] = (diag[a - 1] * diag[b - 1]) / (diag[c - 1] * diag[d - 1])
    return out


# Right inverses of ratio_coords, before normalization: entry -1 means 1.
def _canonical_raw(split, nu):
    if split == "qubit-qubit":
        return np.array([nu[0], 1.0, 1.0, 1.0])
    if split == "qubit-qutrit":
        return np.array([nu[0], 1.0, 1.0, 1.0, 1.0, nu[1]])
    if split == "qutrit-qutrit":
        return np.array(
            [nu[0], 1.0, 1.0, 1.0, 1.0, nu[1], 1.0, nu[2], nu[1] * nu[2] * nu[3]]
        )
    if split == "3qubit-bipartite":
        return np.array(
            [nu[0], 1.0, 1.0, 1.0, 1.0, 1.0, nu[1], nu[1] * nu[2]]
        )
    return np.array([nu[0], 1.0, 1.0, 1.0, nu[1], 1.0, nu[1], nu[2]])


def canonical_diag(split, nu):
    """A normalized diagonal realizing the requested ratio coordinates.

    Accepts a scalar for one-ratio splits, else a sequence of length
    n_ratios.  The result sums to one and satisfies
    ratio_coords(canonical_diag(split, nu), split) == nu up to rounding.
    """
    sp = _split(split)
    nu = np.atleast_1d(np.asarray(nu, dtype=np.float64))
    if nu.shape != (sp.n_ratios,):
        raise ShapeMismatchError(
            "nu has shape %s, expected (%d,) for split %s"
            % (nu.shape, sp.n_ratios, sp.name)
        )
    if not np.all(np.isfinite(nu)) or np.any(nu <= 0.0):
        raise NonPositiveRatioError(
            "ratios must be finite and positive, got %s" % (nu,)
        )
    d = _canonical_raw(sp.name, nu)
    return d / d.sum()


def ppt_predicate(spec, z, nu):
    """True iff the partial transpose is PSD at ratio coordinates nu.

    The diagonal enters only through the ratios, so the test is run at
    canonical_diag(spec.split, nu).
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (spec.z_size,):
        raise ShapeMismatchError(
            "z has shape %s, expected (%d,)" % (z.shape, spec.z_size)
        )
    return bool(ppt_predicate_batch(spec, z[None, :], nu)[0])


def ppt_predicate_batch(spec, zz, nu):
    """Vectorized ppt_predicate at a fixed nu: zz is (batch, z_size)."""
    from . import _plans

    zz = np.ascontiguousarray(zz, dtype=np.float64)
    if zz.ndim != 2 or zz.shape[1] != spec.z_size:
        raise ShapeMismatchError(
            "z batch has shape %s, expected (*, %d)" % (zz.shape, spec.z_size)
        )
    d = canonical_diag(spec.split, nu)
    plan = _plans.ppt_plan(spec)
    dd = np.broadcast_to(d, (zz.shape[0], spec.n)).copy()
    return _plans.run_plan(plan, dd, zz).astype(bool)


def det_pt_4x4(z, nu):
    """Quartic determinant of the partially transposed two-qubit z matrix.

    z holds (z12, z13, z14, z23, z24, z34) and nu = d1 d4 / (d2 d3).
    The value equals nu * det(Z') where Z' is the z matrix after the
    transpose moves z14 and z23 into each other's slots with the
    appropriate sqrt(nu) rescalings.  Nonnegative iff the partial
    transpose of the (positive) state is PSD.  Broadcasts over leading
    axes of both arguments.
    """
    z = np.asarray(z, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    z12 = z[..., 0]
    z13 = z[..., 1]
    z14 = z[..., 2]
    z23 = z[..., 3]
    z24 = z[..., 4]
    z34 = z[..., 5]
    rt = np.sqrt(nu)
    return (
        nu * (z34 * z34 - 1.0) * z12 * z12
        + 2.0
        * rt
        * (nu * z13 * z14 + z23 * z24 - rt * (z14 * z23 + z13 * z24) * z34)
        * z12
        - z23 * z23
        - nu * z34 * z34
        + nu
        + nu
        * (
            (z24 * z24 - 1.0) * z13 * z13
            - 2.0 * z14 * z23 * z24 * z13
            - z24 * z24
            + z14 * z14 * (z23 * z23 - nu)
        )
        + 2.0 * rt * (z13 * z23 + nu * z14 * z24) * z34
    )


def det_pt_accept(z, nu, eps=1e-10):
    """Tolerance-matched sign test for det_pt_4x4 (True = PSD side).

    The entries of the transposed z matrix are bounded by
    max(sqrt(nu), 1/sqrt(nu)) once |z| <= 1, so the quartic is compared
    against -eps times that scale to the fourth power, mirroring the
    minor-chain policy.
    """
    q = det_pt_4x4(z, nu)
    nu = np.asarray(nu, dtype=np.float64)
    s = 1.0 + np.sqrt(np.maximum(nu, 1.0 / nu))
    return q >= -eps * s * s * s * s
