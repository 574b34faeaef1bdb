"""Double-precision model of SL3(R), its rotations, and the chart atlas.

The chart on the coset space combines three rotation angles with the
upper-triangular parameters: a group element factors uniquely as
k * n(z) * a(lam) with k special orthogonal, n unit upper triangular and
a positive diagonal of determinant one.  The angle box is
|alpha| < pi/2, |beta| < pi/3, |gamma| < pi/2; on it the rotation factor
is parametrized bijectively and the invariant measure has density
cos(beta) against d(alpha) d(beta) d(gamma) dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

ALPHA_MAX = math.pi / 2
BETA_MAX = math.pi / 3
GAMMA_MAX = math.pi / 2

#: membership guard band: finite differences must not step over the edge
GUARD = 1e-9

_DET_TOL = 1e-10
_ORTH_TOL = 1e-10


class OutOfChart(ValueError):
    """A rotation or group element left the coordinate box."""


class GroupMatrix:
    """A 3x3 real matrix with determinant one (within 1e-10)."""

    __slots__ = ("m",)

    def __init__(self, m):
        m = np.asarray(m, float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        if abs(np.linalg.det(m) - 1.0) > _DET_TOL:
            raise ValueError(f"determinant {np.linalg.det(m)} is not 1")
        object.__setattr__(self, "m", m)

    def __setattr__(self, *a):
        raise AttributeError("GroupMatrix is immutable")

    def __matmul__(self, other):
        other_m = other.m if isinstance(other, (GroupMatrix, RotationMatrix)) else other
        return GroupMatrix(self.m @ other_m)

    def inv(self) -> "GroupMatrix":
        return GroupMatrix(np.linalg.inv(self.m))

    def __repr__(self):
        return f"GroupMatrix({self.m.tolist()})"


class RotationMatrix:
    """Special orthogonal 3x3 matrix (orthogonality within 1e-10)."""

    __slots__ = ("m",)

    def __init__(self, m):
        m = np.asarray(m, float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        if np.max(np.abs(m.T @ m - np.eye(3))) > _ORTH_TOL:
            raise ValueError("matrix is not orthogonal")
        if abs(np.linalg.det(m) - 1.0) > _DET_TOL:
            raise ValueError("matrix is not special orthogonal")
        object.__setattr__(self, "m", m)

    def __setattr__(self, *a):
        raise AttributeError("RotationMatrix is immutable")

    def inv(self) -> "RotationMatrix":
        return RotationMatrix(self.m.T)

    def __repr__(self):
        return f"RotationMatrix({self.m.tolist()})"


IDENTITY_ROTATION = RotationMatrix(np.eye(3))


def _check_angles(alpha, beta, gamma, margin=0.0):
    if not (
        abs(alpha) < ALPHA_MAX - margin
        and abs(beta) < BETA_MAX - margin
        and abs(gamma) < GAMMA_MAX - margin
    ):
        raise OutOfChart(
            f"angles ({alpha}, {beta}, {gamma}) outside the open chart box"
        )


@dataclass(frozen=True)
class ChartPoint:
    """Coset-space coordinates (alpha, beta, gamma, z12, z13, z23)."""

    alpha: float
    beta: float
    gamma: float
    z12: float
    z13: float
    z23: float

    def __post_init__(self):
        _check_angles(self.alpha, self.beta, self.gamma)

    def with_lambdas(self, lam1=1.0, lam2=1.0) -> "ExtendedChartPoint":
        return ExtendedChartPoint(
            self.alpha, self.beta, self.gamma,
            self.z12, self.z13, self.z23, lam1, lam2,
        )

    def as_array(self):
        return np.array(
            [self.alpha, self.beta, self.gamma, self.z12, self.z13, self.z23]
        )

    def to_json(self):
        return list(self.as_array())

    @classmethod
    def from_json(cls, data) -> "ChartPoint":
        return cls(*map(float, data))


@dataclass(frozen=True)
class ExtendedChartPoint(ChartPoint):
    """Group coordinates: a chart point plus the diagonal parameters."""

    lam1: float = 1.0
    lam2: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.lam1 > 0 and self.lam2 > 0):
            raise ValueError("diagonal parameters must be positive")

    def drop_lambdas(self) -> ChartPoint:
        return ChartPoint(
            self.alpha, self.beta, self.gamma, self.z12, self.z13, self.z23
        )

    def as_array(self):
        return np.array([
            self.alpha, self.beta, self.gamma,
            self.z12, self.z13, self.z23, self.lam1, self.lam2,
        ])

    @classmethod
    def from_json(cls, data) -> "ExtendedChartPoint":
        return cls(*map(float, data))


# ---------------------------------------------------------------------------
# Basic maps
# ---------------------------------------------------------------------------


def mat_exp(M) -> GroupMatrix:
    """Exponential of a traceless matrix (scaling and squaring)."""
    return GroupMatrix(kernels.mat_exp(np.asarray(M, float)))


def sl3_basis_matrix(letter: int):
    """Matrix of a Lie-algebra basis letter, indexed as in enveloping."""
    m = np.zeros((3, 3))
    if letter == 6:
        m[0, 0], m[2, 2] = 1.0, -1.0
    elif letter == 7:
        m[1, 1], m[2, 2] = 1.0, -1.0
    else:
        r, c = ((0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1))[letter]
        m[r, c] = 1.0
    return m


def rotation_from_euler(alpha: float, beta: float, gamma: float) -> RotationMatrix:
    k = kernels.rotation_from_euler(
        np.array([alpha]), np.array([beta]), np.array([gamma])
    )[0]
    return RotationMatrix(k)


def euler_from_rotation(k: RotationMatrix | np.ndarray):
    """Angles of a rotation inside the chart box; OutOfChart otherwise."""
    m = k.m if isinstance(k, RotationMatrix) else np.asarray(k, float)
    a, b, c, ok = kernels.euler_from_rotation(m[None])
    alpha, beta, gamma = float(a[0]), float(b[0]), float(c[0])
    if not bool(ok[0]):
        raise OutOfChart("rotation outside the chart neighbourhood")
    rec = kernels.rotation_from_euler(a, b, c)[0]
    if np.max(np.abs(rec - m)) > 1e-9:
        raise OutOfChart("angle extraction failed to reproduce the rotation")
    return alpha, beta, gamma


def iwasawa(g: GroupMatrix | np.ndarray):
    """Unique K N A factorization with positive diagonal part.

    Returns (RotationMatrix, (z12, z13, z23), (lam1, lam2)).
    """
    m = g.m if isinstance(g, GroupMatrix) else np.asarray(g, float)
    k, z12, z13, z23, l1, l2 = kernels.iwasawa(m[None])
    return (
        RotationMatrix(k[0]),
        (float(z12[0]), float(z13[0]), float(z23[0])),
        (float(l1[0]), float(l2[0])),
    )


def upper_unitriangular(z12: float, z13: float, z23: float):
    n = np.eye(3)
    n[0, 1], n[0, 2], n[1, 2] = z12, z13, z23
    return n


def positive_diagonal(lam1: float, lam2: float):
    return np.diag([lam1, lam2, 1.0 / (lam1 * lam2)])


def chart_embed(k0: RotationMatrix, p: ExtendedChartPoint) -> GroupMatrix:
    g = kernels.chart_embed(
        k0.m,
        np.array([p.alpha]), np.array([p.beta]), np.array([p.gamma]),
        np.array([p.z12]), np.array([p.z13]), np.array([p.z23]),
        np.array([p.lam1]), np.array([p.lam2]),
    )[0]
    return GroupMatrix(g)


def chart_coords(k0: RotationMatrix, g: GroupMatrix | np.ndarray) -> ExtendedChartPoint:
    m = g.m if isinstance(g, GroupMatrix) else np.asarray(g, float)
    a, b, c, z12, z13, z23, l1, l2, ok = kernels.chart_coords(k0.m.T, m[None])
    if not bool(ok[0]):
        raise OutOfChart("group element outside this chart")
    p = ExtendedChartPoint(
        float(a[0]), float(b[0]), float(c[0]),
        float(z12[0]), float(z13[0]), float(z23[0]),
        float(l1[0]), float(l2[0]),
    )
    rec = chart_embed(k0, p)
    if np.max(np.abs(rec.m - m)) > 1e-8 * max(1.0, float(np.max(np.abs(m)))):
        raise OutOfChart("chart coordinates failed to reproduce the element")
    return p


def measure_density(p: ChartPoint) -> float:
    """Invariant-measure density cos(beta) against the chart volume."""
    return math.cos(p.beta)


# ---------------------------------------------------------------------------
# Random sampling helpers for the verification drivers
# ---------------------------------------------------------------------------


def random_sl3(rng: np.random.Generator, scale: float = 0.6):
    """Random traceless matrix with entries on the order of `scale`."""
    m = rng.uniform(-scale, scale, (3, 3))
    m -= np.trace(m) / 3.0 * np.eye(3)
    return m


def random_group_matrix(rng: np.random.Generator, scale: float = 0.6) -> GroupMatrix:
    return mat_exp(random_sl3(rng, scale))


def random_chart_point(
    rng: np.random.Generator,
    margin: float = 0.15,
    z_scale: float = 1.0,
) -> ChartPoint:
    return ChartPoint(
        rng.uniform(-(ALPHA_MAX - margin), ALPHA_MAX - margin),
        rng.uniform(-(BETA_MAX - margin), BETA_MAX - margin),
        rng.uniform(-(GAMMA_MAX - margin), GAMMA_MAX - margin),
        rng.uniform(-z_scale, z_scale),
        rng.uniform(-z_scale, z_scale),
        rng.uniform(-z_scale, z_scale),
    )


def random_extended_point(
    rng: np.random.Generator,
    margin: float = 0.15,
    z_scale: float = 1.0,
    lam_low: float = 0.5,
    lam_high: float = 2.0,
) -> ExtendedChartPoint:
    p = random_chart_point(rng, margin, z_scale)
    return p.with_lambdas(rng.uniform(lam_low, lam_high), rng.uniform(lam_low, lam_high))
