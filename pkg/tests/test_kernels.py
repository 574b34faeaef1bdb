import numpy as np
import pytest

import sl3inv.kernels as kernels
from sl3inv.kernels import _numpy as knp

numba_mod = pytest.importorskip("sl3inv.kernels._numba", reason="numba unavailable")


@pytest.fixture(scope="module")
def batch():
    rng = np.random.default_rng(99)
    alpha = rng.uniform(-1.4, 1.4, 400)
    beta = rng.uniform(-1.0, 1.0, 400)
    gamma = rng.uniform(-1.4, 1.4, 400)
    z = rng.uniform(-1.5, 1.5, (3, 400))
    lam = rng.uniform(0.4, 2.2, (2, 400))
    mats = knp.chart_embed(np.eye(3), alpha, beta, gamma, *z, *lam)
    sl3 = rng.uniform(-0.9, 0.9, (400, 3, 3))
    sl3 -= np.trace(sl3, axis1=1, axis2=2)[:, None, None] * np.eye(3) / 3
    return alpha, beta, gamma, z, lam, mats, sl3


def test_backends_agree_rotation(batch):
    alpha, beta, gamma, *_ = batch
    a = knp.rotation_from_euler(alpha, beta, gamma)
    b = numba_mod.rotation_from_euler(alpha, beta, gamma)
    assert np.max(np.abs(a - b)) < 1e-14


def test_backends_agree_euler(batch):
    *_, mats, _ = batch
    k = knp.iwasawa(mats)[0]
    for x, y in zip(knp.euler_from_rotation(k), numba_mod.euler_from_rotation(k)):
        assert np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))) < 1e-13


def test_backends_agree_iwasawa_and_charts(batch):
    *_, mats, _ = batch
    for x, y in zip(knp.iwasawa(mats), numba_mod.iwasawa(mats)):
        assert np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))) < 1e-12
    for x, y in zip(
        knp.chart_coords(np.eye(3), mats), numba_mod.chart_coords(np.eye(3), mats)
    ):
        assert np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))) < 1e-12


def test_backends_agree_embed(batch):
    alpha, beta, gamma, z, lam, *_ = batch
    a = knp.chart_embed(np.eye(3), alpha, beta, gamma, *z, *lam)
    b = numba_mod.chart_embed(np.eye(3), alpha, beta, gamma, *z, *lam)
    assert np.max(np.abs(a - b)) < 1e-12


def test_backends_agree_mat_exp(batch):
    *_, sl3 = batch
    a = knp.mat_exp(sl3)
    b = numba_mod.mat_exp(sl3)
    assert np.max(np.abs(a - b)) < 1e-13
    one = sl3[0]
    assert np.max(np.abs(knp.mat_exp(one) - numba_mod.mat_exp(one))) < 1e-14


def test_backends_agree_profile():
    r = np.linspace(-0.5, 3.5, 4001)
    for f, g in ((knp.xi, numba_mod.xi), (knp.xi_d1, numba_mod.xi_d1),
                 (knp.xi_d2, numba_mod.xi_d2)):
        assert np.max(np.abs(f(r) - g(r))) < 1e-12


def test_profile_derivatives_match_differences():
    rng = np.random.default_rng(3)
    r = rng.uniform(1.02, 1.98, 500)
    h = 1e-5
    fd1 = (knp.xi(r + h) - knp.xi(r - h)) / (2 * h)
    fd2 = (knp.xi(r + h) - 2 * knp.xi(r) + knp.xi(r - h)) / h**2
    assert np.max(np.abs(fd1 - knp.xi_d1(r))) < 1e-7
    assert np.max(np.abs(fd2 - knp.xi_d2(r))) < 1e-4


def test_frozen_profile_suprema():
    from sl3inv.quadrature import XI_SUP_D1, XI_SUP_D2

    r = np.linspace(1.0, 2.0, 2_000_001)
    d1 = float(np.max(np.abs(knp.xi_d1(r))))
    d2 = float(np.max(np.abs(knp.xi_d2(r))))
    assert abs(d1 - XI_SUP_D1) < 1e-6
    assert d2 <= XI_SUP_D2 + 1e-6
    assert d2 > XI_SUP_D2 - 1e-3


def test_active_backend_exports():
    assert kernels.BACKEND in ("numba", "numpy")
    assert kernels.numpy_backend is knp
