"""Jit-compiled twins of the numpy kernels.

Same signatures and semantics as ``_numpy``; plain loops over the batch
with unrolled 3x3 arithmetic, compiled with numba.  Import fails cleanly
when numba is unavailable; ``sl3inv.kernels`` then falls back.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

SIN_PI_3 = np.sin(np.pi / 3.0)

_EXP_ORDER = 13


@njit(cache=True)
def _rot_entries(a, b, c, k, i):
    sa, ca = np.sin(a), np.cos(a)
    sb, cb = np.sin(b), np.cos(b)
    sg, cg = np.sin(c), np.cos(c)
    k[i, 0, 0] = cb * cg
    k[i, 0, 1] = -sb
    k[i, 0, 2] = cb * sg
    k[i, 1, 0] = sa * sg + ca * cg * sb
    k[i, 1, 1] = ca * cb
    k[i, 1, 2] = ca * sb * sg - cg * sa
    k[i, 2, 0] = cg * sa * sb - ca * sg
    k[i, 2, 1] = cb * sa
    k[i, 2, 2] = ca * cg + sa * sb * sg


@njit(cache=True, parallel=True)
def _rotation_from_euler(alpha, beta, gamma):
    n = alpha.shape[0]
    k = np.empty((n, 3, 3))
    for i in prange(n):
        _rot_entries(alpha[i], beta[i], gamma[i], k, i)
    return k


def rotation_from_euler(alpha, beta, gamma):
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    shape = alpha.shape
    k = _rotation_from_euler(
        np.ascontiguousarray(alpha.ravel()),
        np.ascontiguousarray(beta.ravel()),
        np.ascontiguousarray(gamma.ravel()),
    )
    return k.reshape(shape + (3, 3))


@njit(cache=True, parallel=True)
def _euler_from_rotation(k):
    n = k.shape[0]
    alpha = np.empty(n)
    beta = np.empty(n)
    gamma = np.empty(n)
    ok = np.empty(n, dtype=np.bool_)
    for i in prange(n):
        k11, k12, k13 = k[i, 0, 0], k[i, 0, 1], k[i, 0, 2]
        k22, k32 = k[i, 1, 1], k[i, 2, 1]
        ok[i] = (k11 > 0.0) and (k22 > 0.0) and (abs(k12) < SIN_PI_3)
        alpha[i] = np.arctan2(k32, k22)
        s = -k12
        if s > 1.0:
            s = 1.0
        elif s < -1.0:
            s = -1.0
        beta[i] = np.arcsin(s)
        gamma[i] = np.arctan2(k13, k11)
    return alpha, beta, gamma, ok


def euler_from_rotation(k):
    k = np.asarray(k, float)
    shape = k.shape[:-2]
    a, b, c, ok = _euler_from_rotation(np.ascontiguousarray(k.reshape(-1, 3, 3)))
    return a.reshape(shape), b.reshape(shape), c.reshape(shape), ok.reshape(shape)


@njit(cache=True)
def _iwasawa_one(g, k, out, i):
    r11 = np.sqrt(g[i, 0, 0] ** 2 + g[i, 1, 0] ** 2 + g[i, 2, 0] ** 2)
    q10, q11, q12 = g[i, 0, 0] / r11, g[i, 1, 0] / r11, g[i, 2, 0] / r11
    r12 = q10 * g[i, 0, 1] + q11 * g[i, 1, 1] + q12 * g[i, 2, 1]
    v0 = g[i, 0, 1] - r12 * q10
    v1 = g[i, 1, 1] - r12 * q11
    v2 = g[i, 2, 1] - r12 * q12
    r22 = np.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    q20, q21, q22 = v0 / r22, v1 / r22, v2 / r22
    r13 = q10 * g[i, 0, 2] + q11 * g[i, 1, 2] + q12 * g[i, 2, 2]
    r23 = q20 * g[i, 0, 2] + q21 * g[i, 1, 2] + q22 * g[i, 2, 2]
    w0 = g[i, 0, 2] - r13 * q10 - r23 * q20
    w1 = g[i, 1, 2] - r13 * q11 - r23 * q21
    w2 = g[i, 2, 2] - r13 * q12 - r23 * q22
    r33 = np.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    k[i, 0, 0], k[i, 1, 0], k[i, 2, 0] = q10, q11, q12
    k[i, 0, 1], k[i, 1, 1], k[i, 2, 1] = q20, q21, q22
    k[i, 0, 2], k[i, 1, 2], k[i, 2, 2] = w0 / r33, w1 / r33, w2 / r33
    out[i, 0] = r12 / r22
    out[i, 1] = r13 / r33
    out[i, 2] = r23 / r33
    out[i, 3] = r11
    out[i, 4] = r22


@njit(cache=True, parallel=True)
def _iwasawa(g):
    n = g.shape[0]
    k = np.empty((n, 3, 3))
    out = np.empty((n, 5))
    for i in prange(n):
        _iwasawa_one(g, k, out, i)
    return k, out


def iwasawa(g):
    g = np.asarray(g, float)
    shape = g.shape[:-2]
    k, out = _iwasawa(np.ascontiguousarray(g.reshape(-1, 3, 3)))
    k = k.reshape(shape + (3, 3))
    cols = [out[:, j].reshape(shape) for j in range(5)]
    return (k, *cols)


@njit(cache=True)
def _matmul3(a, b, c, i):
    for r in range(3):
        for s in range(3):
            acc = 0.0
            for t in range(3):
                acc += a[i, r, t] * b[i, t, s]
            c[i, r, s] = acc


@njit(cache=True, parallel=True)
def _mat_exp(m, s_arr):
    n = m.shape[0]
    out = np.empty((n, 3, 3))
    for i in prange(n):
        s = s_arr[i]
        scale = 2.0 ** (-s)
        a = np.empty((3, 3))
        for r in range(3):
            for c in range(3):
                a[r, c] = m[i, r, c] * scale
        acc = np.empty((3, 3))
        nxt = np.empty((3, 3))
        for r in range(3):
            for c in range(3):
                acc[r, c] = 1.0 if r == c else 0.0
        # Horner evaluation of the truncated series
        for j in range(_EXP_ORDER, 0, -1):
            inv = 1.0 / j
            for r in range(3):
                for c in range(3):
                    v = a[r, 0] * acc[0, c] + a[r, 1] * acc[1, c] + a[r, 2] * acc[2, c]
                    nxt[r, c] = (1.0 if r == c else 0.0) + v * inv
            acc, nxt = nxt, acc
        for _ in range(s):
            for r in range(3):
                for c in range(3):
                    nxt[r, c] = (
                        acc[r, 0] * acc[0, c]
                        + acc[r, 1] * acc[1, c]
                        + acc[r, 2] * acc[2, c]
                    )
            acc, nxt = nxt, acc
        out[i] = acc
    return out


def mat_exp(m):
    m = np.asarray(m, float)
    single = m.ndim == 2
    if single:
        m = m[None]
    shape = m.shape[:-2]
    flat = np.ascontiguousarray(m.reshape(-1, 3, 3))
    norm = np.max(np.sum(np.abs(flat), axis=-1), axis=-1)
    s = np.zeros(flat.shape[0], dtype=np.int64)
    big = norm > 0.25
    s[big] = np.ceil(np.log2(norm[big] / 0.25)).astype(np.int64)
    out = _mat_exp(flat, s).reshape(shape + (3, 3))
    return out[0] if single else out


@njit(cache=True, parallel=True)
def _chart_embed(k0, alpha, beta, gamma, z12, z13, z23, lam1, lam2):
    n = alpha.shape[0]
    k = np.empty((n, 3, 3))
    g = np.empty((n, 3, 3))
    for i in prange(n):
        _rot_entries(alpha[i], beta[i], gamma[i], k, i)
        l1, l2 = lam1[i], lam2[i]
        l3 = 1.0 / (l1 * l2)
        # columns of K * N * A
        for r in range(3):
            c0 = k[i, r, 0] * l1
            c1 = (k[i, r, 0] * z12[i] + k[i, r, 1]) * l2
            c2 = (k[i, r, 0] * z13[i] + k[i, r, 1] * z23[i] + k[i, r, 2]) * l3
            g[i, r, 0], g[i, r, 1], g[i, r, 2] = c0, c1, c2
        # left-translate by k0
        for r in range(3):
            a0 = k0[r, 0] * g[i, 0, 0] + k0[r, 1] * g[i, 1, 0] + k0[r, 2] * g[i, 2, 0]
            a1 = k0[r, 0] * g[i, 0, 1] + k0[r, 1] * g[i, 1, 1] + k0[r, 2] * g[i, 2, 1]
            a2 = k0[r, 0] * g[i, 0, 2] + k0[r, 1] * g[i, 1, 2] + k0[r, 2] * g[i, 2, 2]
            k[i, r, 0], k[i, r, 1], k[i, r, 2] = a0, a1, a2
        g[i] = k[i]
    return g


def chart_embed(k0, alpha, beta, gamma, z12, z13, z23, lam1, lam2):
    arrs = np.broadcast_arrays(
        *(np.asarray(x, float) for x in (alpha, beta, gamma, z12, z13, z23, lam1, lam2))
    )
    shape = arrs[0].shape
    flat = [np.ascontiguousarray(a.ravel()) for a in arrs]
    g = _chart_embed(np.ascontiguousarray(np.asarray(k0, float)), *flat)
    return g.reshape(shape + (3, 3))


@njit(cache=True, parallel=True)
def _chart_coords(k0_inv, g):
    n = g.shape[0]
    m = np.empty((n, 3, 3))
    for i in prange(n):
        for r in range(3):
            for s in range(3):
                acc = 0.0
                for t in range(3):
                    acc += k0_inv[r, t] * g[i, t, s]
                m[i, r, s] = acc
    k = np.empty((n, 3, 3))
    out = np.empty((n, 5))
    for i in prange(n):
        _iwasawa_one(m, k, out, i)
    alpha, beta, gamma, ok = _euler_from_rotation(k)
    return alpha, beta, gamma, out, ok


def chart_coords(k0_inv, g):
    g = np.asarray(g, float)
    shape = g.shape[:-2]
    alpha, beta, gamma, out, ok = _chart_coords(
        np.ascontiguousarray(np.asarray(k0_inv, float)),
        np.ascontiguousarray(g.reshape(-1, 3, 3)),
    )
    return (
        alpha.reshape(shape),
        beta.reshape(shape),
        gamma.reshape(shape),
        out[:, 0].reshape(shape),
        out[:, 1].reshape(shape),
        out[:, 2].reshape(shape),
        out[:, 3].reshape(shape),
        out[:, 4].reshape(shape),
        ok.reshape(shape),
    )


# ---------------------------------------------------------------------------
# Cutoff profile
# ---------------------------------------------------------------------------


@njit(cache=True)
def _xi_scalar(r):
    if r <= 1.0:
        return 1.0
    if r >= 2.0:
        return 0.0
    u = np.exp(-1.0 / (2.0 - r))
    v = np.exp(-1.0 / (r - 1.0))
    return u / (u + v)


@njit(cache=True)
def _xi_d1_scalar(r):
    if r <= 1.0 or r >= 2.0:
        return 0.0
    a, b = 2.0 - r, r - 1.0
    u = np.exp(-1.0 / a)
    v = np.exp(-1.0 / b)
    du = -u / (a * a)
    dv = v / (b * b)
    w = u + v
    return (du * v - u * dv) / (w * w)


@njit(cache=True)
def _xi_d2_scalar(r):
    if r <= 1.0 or r >= 2.0:
        return 0.0
    a, b = 2.0 - r, r - 1.0
    u = np.exp(-1.0 / a)
    v = np.exp(-1.0 / b)
    du = -u / (a * a)
    dv = v / (b * b)
    ddu = -(du / (a * a) + 2.0 * u / (a * a * a))
    ddv = dv / (b * b) - 2.0 * v / (b * b * b)
    w = u + v
    dw = du + dv
    nn = du * v - u * dv
    dn = ddu * v - u * ddv
    return (dn * w - 2.0 * nn * dw) / (w * w * w)


@njit(cache=True, parallel=True)
def _xi_map(r, which):
    n = r.shape[0]
    out = np.empty(n)
    for i in prange(n):
        if which == 0:
            out[i] = _xi_scalar(r[i])
        elif which == 1:
            out[i] = _xi_d1_scalar(r[i])
        else:
            out[i] = _xi_d2_scalar(r[i])
    return out


def xi(r):
    r = np.asarray(r, float)
    return _xi_map(np.ascontiguousarray(r.ravel()), 0).reshape(r.shape)


def xi_d1(r):
    r = np.asarray(r, float)
    return _xi_map(np.ascontiguousarray(r.ravel()), 1).reshape(r.shape)


def xi_d2(r):
    r = np.asarray(r, float)
    return _xi_map(np.ascontiguousarray(r.ravel()), 2).reshape(r.shape)
