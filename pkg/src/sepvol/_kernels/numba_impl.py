"""Numba-compiled PSD verdict kernel (hot path).

Scalar per-draw loops, compiled with the default strict FP model
(fastmath stays off so nothing gets fused or reassociated).  Must stay
operation-for-operation in sync with numpy_impl.psd_verdicts; the test
suite asserts bitwise verdict equality between the two backends.
"""

import numpy as np
import numba

NAME = "numba"


@numba.njit(cache=True)
def _verdicts(
    dd, zz, emb, rows, cols, src_i, src_j, div_i, div_j,
    re_off, re_sgn, im_off, im_sgn, eps,
):
    B = dd.shape[0]
    ne = emb.size
    ns = rows.size
    out = np.empty(B, dtype=np.uint8)
    lre = np.empty((ne, ne))
    lim = np.empty((ne, ne))
    for bdx in range(B):
        for i in range(ne):
            for j in range(ne):
                lre[i, j] = 0.0
                lim[i, j] = 0.0
        for i in range(ne):
            lre[i, i] = 1.0
        m = 1.0
        dec = np.uint8(1)
        for s in range(ns):
            sc = np.sqrt(
                (dd[bdx, src_i[s]] * dd[bdx, src_j[s]])
                / (dd[bdx, div_i[s]] * dd[bdx, div_j[s]])
            )
            vr = 0.0
            vi = 0.0
            if re_off[s] >= 0:
                vr = (re_sgn[s] * zz[bdx, re_off[s]]) * sc
            if im_off[s] >= 0:
                vi = (im_sgn[s] * zz[bdx, im_off[s]]) * sc
            if vr * vr + vi * vi > 1.0 + eps:
                # unit diagonal: this slot's own 2x2 minor is negative
                dec = np.uint8(0)
                break
            lre[rows[s], cols[s]] = vr
            lim[rows[s], cols[s]] = vi
            if abs(vr) > m:
                m = abs(vr)
            if abs(vi) > m:
                m = abs(vi)
        if dec == 0:
            out[bdx] = dec
            continue
        scale = 1.0 + m
        minor = 1.0
        tol = eps
        for k in range(ne):
            tol = tol * scale
            piv = lre[k, k]
            minor = minor * piv
            if minor < -tol:
                dec = np.uint8(0)
                break
            if abs(minor) <= tol:
                break
            if k == ne - 1:
                break
            for i in range(k + 1, ne):
                fr = lre[i, k] / piv
                fi = lim[i, k] / piv
                for j in range(k + 1, i + 1):
                    ar = lre[j, k]
                    ai = lim[j, k]
                    lre[i, j] = lre[i, j] - (fr * ar + fi * ai)
                    lim[i, j] = lim[i, j] - (fi * ar - fr * ai)
        out[bdx] = dec
    return out


def psd_verdicts(
    dd, zz, emb, rows, cols, src_i, src_j, div_i, div_j,
    re_off, re_sgn, im_off, im_sgn, eps,
):
    """Same contract as numpy_impl.psd_verdicts, compiled."""
    return _verdicts(
        dd, zz, emb, rows, cols, src_i, src_j, div_i, div_j,
        re_off, re_sgn, im_off, im_sgn, eps,
    )
