"""Slot plans: how a scenario's z vector fills a Hermitian matrix.

The matrix handed to the kernels is the unit-diagonal congruence of the
target: entry (r, c) of M divided by sqrt(d_r d_c).  That rescaling
does not change positive semidefiniteness but keeps every pivot of the
minor chain O(1), so one absolute tolerance works across the whole
simplex.  A plan is a flat list of lower-triangle slots; slot s writes

    value = (re_sgn[s] * z[re_off[s]] + 1j * im_sgn[s] * z[im_off[s]])
            * sqrt(d[src_i[s]] * d[src_j[s]] / (d[div_i[s]] * d[div_j[s]]))

into row rows[s], col cols[s] (rows > cols; offset -1 means that part
is zero), where div_i/div_j are the diagonal indices under the slot.
For untransposed entries the factor is exactly 1; for PT-moved entries
it is the familiar sqrt of a diagonal ratio.  Quaternionic scenarios
are laid out directly in the 2n-dimensional symplectic embedding, so
the kernels only ever see complex Hermitian data.

Two plans exist per scenario: the positivity plan (entries in their
home slots) and the PPT plan (entries in their partially transposed
slots, scale factors still taken from the home diagonal entries, which
is exactly the sqrt-ratio rescaling of the moved z variables).  Both
are cached on the spec.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .scenarios import FIELD_COMPONENTS
from .ppt import pt_pair_map

__all__ = ["FillPlan", "positivity_plan", "ppt_plan", "run_plan"]


@dataclass(frozen=True)
class FillPlan:
    n_emb: int
    emb: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    src_i: np.ndarray
    src_j: np.ndarray
    div_i: np.ndarray
    div_j: np.ndarray
    re_off: np.ndarray
    re_sgn: np.ndarray
    im_off: np.ndarray
    im_sgn: np.ndarray


class _Builder:
    def __init__(self, n_emb, emb):
        self.n_emb = n_emb
        self.emb = emb
        self.slots = []

    def add(self, r, c, si, sj, re_off, re_sgn, im_off, im_sgn):
        # store lower-triangle coordinates
        assert r > c, (r, c)
        self.slots.append((r, c, si, sj, re_off, re_sgn, im_off, im_sgn))

    def build(self):
        s = self.slots
        emb = np.asarray(self.emb, dtype=np.int64)
        rows = np.array([x[0] for x in s], dtype=np.int64)
        cols = np.array([x[1] for x in s], dtype=np.int64)
        return FillPlan(
            n_emb=self.n_emb,
            emb=emb,
            rows=rows,
            cols=cols,
            src_i=np.array([x[2] for x in s], dtype=np.int64),
            src_j=np.array([x[3] for x in s], dtype=np.int64),
            div_i=emb[rows] if s else np.zeros(0, dtype=np.int64),
            div_j=emb[cols] if s else np.zeros(0, dtype=np.int64),
            re_off=np.array([x[4] for x in s], dtype=np.int64),
            re_sgn=np.array([float(x[5]) for x in s], dtype=np.float64),
            im_off=np.array([x[6] for x in s], dtype=np.int64),
            im_sgn=np.array([float(x[7]) for x in s], dtype=np.float64),
        )


def _pair_targets(spec, transposed):
    """(i0, j0, conj) per pair, 0-based, after optional PT relocation."""
    out = []
    if transposed:
        pmap = pt_pair_map(spec.split)
        for i, j, f in spec.pairs:
            ti, tj, conj = pmap[(i, j)]
            out.append((ti - 1, tj - 1, conj, f))
    else:
        for i, j, f in spec.pairs:
            out.append((i - 1, j - 1, False, f))
    return out


def _build(spec, transposed):
    n = spec.n
    offs = spec.pair_offsets()
    targets = _pair_targets(spec, transposed)
    if not spec.has_quaternion:
        b = _Builder(n, list(range(n)))
        for (i, j, f), (ti, tj, conj, _) in zip(spec.pairs, targets):
            o = offs[(i, j)]
            si, sj = i - 1, j - 1
            # upper entry value v = x (+ i y); lower slot holds conj(v).
            # PT conjugation flips y once more.
            if f == "real":
                b.add(tj, ti, si, sj, o, 1.0, -1, 1.0)
            else:
                ysgn = 1.0 if conj else -1.0
                b.add(tj, ti, si, sj, o, 1.0, o + 1, ysgn)
        return b.build()

    # quaternion layout: embedded order 2n, diagonal duplicated
    emb = []
    for k in range(n):
        emb.extend([k, k])
    b = _Builder(2 * n, emb)
    for (i, j, f), (ti, tj, conj, _) in zip(spec.pairs, targets):
        o = offs[(i, j)]
        si, sj = i - 1, j - 1
        nc = FIELD_COMPONENTS[f]
        # The lower block holds chi(w) where w is the quaternion conjugate
        # of the (possibly PT-conjugated) upper value, i.e. w has
        # components (a, e*b, e*c, e*d) with e = +1 when the PT already
        # conjugated the entry and -1 otherwise:
        #   (2tj,   2ti)   a + e*b i     (2tj,   2ti+1)   e*c + e*d i
        #   (2tj+1, 2ti)  -e*c + e*d i   (2tj+1, 2ti+1)   a - e*b i
        e = 1.0 if conj else -1.0
        oa = o
        ob = o + 1 if nc >= 2 else -1
        oc = o + 2 if nc == 4 else -1
        od = o + 3 if nc == 4 else -1
        r0, c0 = 2 * tj, 2 * ti
        b.add(r0, c0, si, sj, oa, 1.0, ob, e)
        if nc == 4:
            b.add(r0, c0 + 1, si, sj, oc, e, od, e)
            b.add(r0 + 1, c0, si, sj, oc, -e, od, e)
        b.add(r0 + 1, c0 + 1, si, sj, oa, 1.0, ob, -e)
    return b.build()


@lru_cache(maxsize=256)
def _cached(spec, transposed):
    return _build(spec, transposed)


def positivity_plan(spec):
    return _cached(spec, False)


def ppt_plan(spec):
    return _cached(spec, True)


def run_plan(plan, dd, zz, eps=1e-10):
    """Run the selected backend kernel over a batch; returns uint8 verdicts."""
    from . import _kernels

    return _kernels.get_backend().psd_verdicts(
        np.ascontiguousarray(dd, dtype=np.float64),
        np.ascontiguousarray(zz, dtype=np.float64),
        plan.emb,
        plan.rows,
        plan.cols,
        plan.src_i,
        plan.src_j,
        plan.div_i,
        plan.div_j,
        plan.re_off,
        plan.re_sgn,
        plan.im_off,
        plan.im_sgn,
        float(eps),
    )
