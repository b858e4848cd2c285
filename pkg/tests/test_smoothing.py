import numpy as np
import pytest

from cusplab import geometry, smoothing


def test_wavepacket_unit_norm():
    grid = np.linspace(-10, 10, 1501)
    wp = smoothing.WavePacket.gaussian(grid, momentum=3.0)
    assert abs(smoothing.l2_norm(wp.samples, grid) - 1.0) < 1e-12


def test_unitarity_and_energy_conservation():
    grid = np.linspace(-10, 14, 1601)
    wp = smoothing.WavePacket.gaussian(grid, momentum=2.0)
    res = smoothing.evolve_mode(wp, T=0.5, dt=1e-3, store_every=100)
    assert res.norm_drift < 1e-10
    assert res.energy_drift < 1e-8


def test_free_gaussian_oracle():
    grid = np.linspace(-10, 22, 5334)
    wp = smoothing.WavePacket.gaussian(grid, momentum=2.0)
    res = smoothing.evolve_mode(wp, T=1.0, dt=1e-4, store_every=10000)
    exact = smoothing.free_gaussian_exact(grid, 1.0, momentum=2.0)
    assert smoothing.l2_norm(res.states[-1] - exact, grid) < 1e-6


def test_underresolved_momentum_rejected():
    grid = np.linspace(-5, 5, 101)
    wp = smoothing.WavePacket.gaussian(grid, momentum=20.0)
    with pytest.raises(smoothing.DomainSizeError):
        smoothing.evolve_mode(wp, T=0.1, dt=1e-3)


def test_boundary_reflection_detected():
    grid = np.linspace(-3, 3, 601)
    wp = smoothing.WavePacket.gaussian(grid, momentum=4.0)
    with pytest.raises(smoothing.DomainSizeError):
        smoothing.evolve_mode(wp, T=2.0, dt=1e-3)


def test_ratio_vanishes_as_T_to_zero():
    prof = geometry.constant_profile()
    small = smoothing.smoothing_ratio([4.0], T=0.01, alpha=0.5, profile=prof)
    base = smoothing.smoothing_ratio([4.0], T=0.25, alpha=0.5, profile=prof)
    assert small[0] < 0.1 * base[0]


def test_ratio_monotone_in_T():
    prof = geometry.constant_profile()
    r1 = smoothing.smoothing_ratio([4.0], T=0.1, alpha=0.5, profile=prof)
    r2 = smoothing.smoothing_ratio([4.0], T=0.25, alpha=0.5, profile=prof)
    assert r2[0] >= r1[0]


def test_lanczos_quadratic_form_against_dense():
    rng = np.random.default_rng(4)
    n = 120
    A = rng.standard_normal((n, n))
    A = 0.5 * (A + A.T)
    v = rng.standard_normal(n)
    f = lambda lam: np.sqrt(1.0 + np.abs(lam))
    approx = smoothing.lanczos_quadratic_form(lambda x: A @ x, v, f, m=n)
    w, Q = np.linalg.eigh(A)
    exact = float(np.dot(Q.T @ v, f(w) * (Q.T @ v)))
    assert abs(approx - exact) < 1e-8 * abs(exact)
