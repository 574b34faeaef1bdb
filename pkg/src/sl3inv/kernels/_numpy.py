"""Vectorized numpy implementations of the hot numeric kernels.

Batched conventions: matrices are (N, 3, 3) float64 arrays, per-point
scalars are (N,) arrays.  These are the fallback implementations for the
jit-compiled twins in ``_numba``; both backends must agree to roundoff
(covered by tests).
"""

from __future__ import annotations

import numpy as np

SIN_PI_3 = np.sin(np.pi / 3.0)

# ---------------------------------------------------------------------------
# Rotations and the three-angle parametrization
# ---------------------------------------------------------------------------


def rotation_from_euler(alpha, beta, gamma):
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    sa, ca = np.sin(alpha), np.cos(alpha)
    sb, cb = np.sin(beta), np.cos(beta)
    sg, cg = np.sin(gamma), np.cos(gamma)
    k = np.empty(alpha.shape + (3, 3))
    k[..., 0, 0] = cb * cg
    k[..., 0, 1] = -sb
    k[..., 0, 2] = cb * sg
    k[..., 1, 0] = sa * sg + ca * cg * sb
    k[..., 1, 1] = ca * cb
    k[..., 1, 2] = ca * sb * sg - cg * sa
    k[..., 2, 0] = cg * sa * sb - ca * sg
    k[..., 2, 1] = cb * sa
    k[..., 2, 2] = ca * cg + sa * sb * sg
    return k


def euler_from_rotation(k):
    """Angles plus an in-chart mask (k11 > 0, k22 > 0, |k12| < sin(pi/3))."""
    k = np.asarray(k, float)
    k11, k12, k13 = k[..., 0, 0], k[..., 0, 1], k[..., 0, 2]
    k22, k32 = k[..., 1, 1], k[..., 2, 1]
    ok = (k11 > 0.0) & (k22 > 0.0) & (np.abs(k12) < SIN_PI_3)
    alpha = np.arctan2(k32, k22)
    beta = np.arcsin(np.clip(-k12, -1.0, 1.0))
    gamma = np.arctan2(k13, k11)
    return alpha, beta, gamma, ok


# ---------------------------------------------------------------------------
# Triangular decomposition
# ---------------------------------------------------------------------------


def iwasawa(g):
    """Split g = K N A by Gram-Schmidt on columns, positive diagonal.

    Returns (K, z12, z13, z23, lam1, lam2).
    """
    g = np.asarray(g, float)
    c1, c2, c3 = g[..., :, 0], g[..., :, 1], g[..., :, 2]
    r11 = np.sqrt(np.sum(c1 * c1, axis=-1))
    q1 = c1 / r11[..., None]
    r12 = np.sum(q1 * c2, axis=-1)
    v = c2 - r12[..., None] * q1
    r22 = np.sqrt(np.sum(v * v, axis=-1))
    q2 = v / r22[..., None]
    r13 = np.sum(q1 * c3, axis=-1)
    r23 = np.sum(q2 * c3, axis=-1)
    w = c3 - r13[..., None] * q1 - r23[..., None] * q2
    r33 = np.sqrt(np.sum(w * w, axis=-1))
    q3 = w / r33[..., None]
    k = np.stack([q1, q2, q3], axis=-1)
    z12 = r12 / r22
    z13 = r13 / r33
    z23 = r23 / r33
    return k, z12, z13, z23, r11, r22


# ---------------------------------------------------------------------------
# Matrix exponential
# ---------------------------------------------------------------------------

_EXP_ORDER = 13


def mat_exp(m):
    """Scaling-and-squaring with a fixed degree-13 Taylor evaluation."""
    m = np.asarray(m, float)
    single = m.ndim == 2
    if single:
        m = m[None]
    norm = np.max(np.sum(np.abs(m), axis=-1), axis=-1)
    maxnorm = float(np.max(norm)) if norm.size else 0.0
    s = 0
    if maxnorm > 0.25:
        s = int(np.ceil(np.log2(maxnorm / 0.25)))
    a = m / float(2 ** s)
    eye = np.broadcast_to(np.eye(3), a.shape).copy()
    acc = eye.copy()
    for j in range(_EXP_ORDER, 0, -1):
        acc = eye + (a @ acc) / j
    for _ in range(s):
        acc = acc @ acc
    return acc[0] if single else acc


# ---------------------------------------------------------------------------
# Chart transforms
# ---------------------------------------------------------------------------


def chart_embed(k0, alpha, beta, gamma, z12, z13, z23, lam1, lam2):
    """k0 * K(angles) * N(z) * A(lam) as a batched matrix product."""
    k = rotation_from_euler(alpha, beta, gamma)
    z12, z13, z23, lam1, lam2 = np.broadcast_arrays(
        *(np.asarray(x, float) for x in (z12, z13, z23, lam1, lam2))
    )
    lam3 = 1.0 / (lam1 * lam2)
    na = np.zeros(z12.shape + (3, 3))
    na[..., 0, 0] = lam1
    na[..., 0, 1] = z12 * lam2
    na[..., 0, 2] = z13 * lam3
    na[..., 1, 1] = lam2
    na[..., 1, 2] = z23 * lam3
    na[..., 2, 2] = lam3
    return np.asarray(k0, float) @ (k @ na)


def chart_coords(k0_inv, g):
    """Inverse of chart_embed; returns 8 coordinate arrays plus a mask."""
    m = np.asarray(k0_inv, float) @ np.asarray(g, float)
    k, z12, z13, z23, lam1, lam2 = iwasawa(m)
    alpha, beta, gamma, ok = euler_from_rotation(k)
    return alpha, beta, gamma, z12, z13, z23, lam1, lam2, ok


# ---------------------------------------------------------------------------
# Smooth cutoff profile: 1 on [0,1], 0 on [2,inf), exp-glue in between
# ---------------------------------------------------------------------------


def _uv(r):
    u = np.zeros_like(r)
    v = np.zeros_like(r)
    np.exp(np.divide(-1.0, 2.0 - r, out=np.full_like(r, -np.inf), where=r < 2.0), out=u)
    np.exp(np.divide(-1.0, r - 1.0, out=np.full_like(r, -np.inf), where=r > 1.0), out=v)
    return u, v


def xi(r):
    r = np.asarray(r, float)
    out = np.ones_like(r)
    out[r >= 2.0] = 0.0
    mid = (r > 1.0) & (r < 2.0)
    if np.any(mid):
        u, v = _uv(r[mid])
        out[mid] = u / (u + v)
    return out


def xi_d1(r):
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    mid = (r > 1.0) & (r < 2.0)
    if np.any(mid):
        rm = r[mid]
        u, v = _uv(rm)
        du = -u / (2.0 - rm) ** 2
        dv = v / (rm - 1.0) ** 2
        w = u + v
        out[mid] = (du * v - u * dv) / (w * w)
    return out


def xi_d2(r):
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    mid = (r > 1.0) & (r < 2.0)
    if np.any(mid):
        rm = r[mid]
        u, v = _uv(rm)
        a, b = 2.0 - rm, rm - 1.0
        du = -u / a**2
        dv = v / b**2
        ddu = -(du / a**2 + 2.0 * u / a**3)
        ddv = dv / b**2 - 2.0 * v / b**3
        w = u + v
        dw = du + dv
        n = du * v - u * dv
        dn = ddu * v - u * ddv
        out[mid] = (dn * w - 2.0 * n * dw) / (w * w * w)
    return out
