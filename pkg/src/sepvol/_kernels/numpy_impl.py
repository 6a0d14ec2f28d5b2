"""Pure-numpy PSD verdict kernel (fallback backend).

Vectorizes the per-draw Sylvester chain across the batch.  Every
floating-point operation is written to match the scalar loop in the
numba backend exactly: elementwise multiply/divide/add in the same
association order, no reductions over draws, no fused multiply-adds,
so the two backends return bitwise identical verdicts.
"""

import numpy as np

NAME = "numpy"


def psd_verdicts(
    dd, zz, emb, rows, cols, src_i, src_j, div_i, div_j,
    re_off, re_sgn, im_off, im_sgn, eps,
):
    """uint8 verdict per draw: 1 if the filled matrix is PSD, else 0.

    dd is (B, n) diagonal draws, zz is (B, F) z draws; the rest is the
    fill plan.  The matrix has unit diagonal by construction (see the
    plan module), which gives an exact early rejection: an off-diagonal
    modulus above one makes its own 2x2 principal minor negative, so
    any slot with |value|^2 > 1 + eps rejects outright.  Surviving
    matrices have entries bounded by ~1, and the chain of leading
    principal minors is formed by Hermitian elimination without
    pivoting.  At step k the minor is compared against
    tol_k = eps * scale^(k+1) with scale = 1 + max |entry|: below
    -tol_k rejects, within tol_k accepts (borderline freeze), above
    continues.
    """
    B = dd.shape[0]
    ne = emb.size
    lre = np.zeros((B, ne, ne))
    lim = np.zeros((B, ne, ne))
    k_idx = np.arange(ne)
    lre[:, k_idx, k_idx] = 1.0

    m = np.ones(B)
    verdict = np.ones(B, dtype=np.uint8)
    live = np.ones(B, dtype=bool)
    if rows.size:
        sc = np.sqrt(
            (dd[:, src_i] * dd[:, src_j]) / (dd[:, div_i] * dd[:, div_j])
        )
        vre = np.where(re_off >= 0, re_sgn * zz[:, re_off], 0.0) * sc
        vim = np.where(im_off >= 0, im_sgn * zz[:, im_off], 0.0) * sc
        big = np.max(vre * vre + vim * vim, axis=1) > 1.0 + eps
        verdict[big] = 0
        live &= ~big
        lre[:, rows, cols] = vre
        lim[:, rows, cols] = vim
        m = np.maximum(m, np.max(np.abs(vre), axis=1))
        m = np.maximum(m, np.max(np.abs(vim), axis=1))
    scale = 1.0 + m
    minor = np.ones(B)
    tol = np.full(B, eps)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(ne):
            tol = tol * scale
            piv = lre[:, k, k]
            minor = np.where(live, minor * piv, minor)
            rej = live & (minor < -tol)
            verdict[rej] = 0
            frozen = live & ~rej & (np.abs(minor) <= tol)
            live = live & ~rej & ~frozen
            if k == ne - 1 or not live.any():
                break
            # keep dead lanes numerically inert
            safe = np.where(live & (piv != 0.0), piv, 1.0)
            for i in range(k + 1, ne):
                fr = lre[:, i, k] / safe
                fi = lim[:, i, k] / safe
                for j in range(k + 1, i + 1):
                    ar = lre[:, j, k]
                    ai = lim[:, j, k]
                    lre[:, i, j] = lre[:, i, j] - (fr * ar + fi * ai)
                    lim[:, i, j] = lim[:, i, j] - (fi * ar - fr * ai)
    return verdict
