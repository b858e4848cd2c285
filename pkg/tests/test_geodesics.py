import numpy as np
import pytest

from cusplab import geometry, geodesics


PROF = geometry.constant_profile()


def test_energy_conservation():
    ic = geodesics.PhasePoint(r=0.3, rho=-0.4, sigma_ang=0.8)
    traj = geodesics.integrate(ic, PROF, T=10.0, dt=1e-3)
    assert traj.energy_drift < 1e-8
    assert not traj.accuracy_failure


def test_tanh_identity_free_profile():
    ic = geodesics.PhasePoint(r=0.0, rho=0.2, sigma_ang=0.5)
    traj = geodesics.integrate(ic, PROF, T=2.0, dt=1e-4)
    assert geodesics.tanh_residual(traj, PROF) < 1e-6


def test_tanh_identity_with_beta():
    prof = geometry.b_gaussian_profile(amp=-0.05)
    ic = geodesics.PhasePoint(r=-0.5, rho=0.3, sigma_ang=0.4)
    traj = geodesics.integrate(ic, prof, T=2.0, dt=1e-4)
    assert geodesics.tanh_residual(traj, prof) < 1e-6


def test_zero_angular_momentum_rejected_in_tanh():
    ic = geodesics.PhasePoint(r=0.0, rho=0.5, sigma_ang=0.0)
    traj = geodesics.integrate(ic, PROF, T=1.0, dt=1e-3)
    with pytest.raises(geodesics.FlowDomainError):
        geodesics.tanh_residual(traj, PROF)


def test_escape_single_cusp_interval():
    ics = geodesics.random_initial_conditions(PROF, 10, seed=5)
    reps = geodesics.escape_report(ics, PROF, T=30.0, dt=5e-3)
    assert all(r.escaped for r in reps)
    assert all(r.cusp_intervals <= 1 for r in reps)


def test_bulge_profile_traps():
    bul = geometry.bulge_profile()
    ics = geodesics.random_initial_conditions(bul, 12, seed=3)
    reps = geodesics.escape_report(ics, bul, T=30.0, dt=5e-3)
    assert any(r.trapped_flag for r in reps)


def test_convexity_residual_positive_outside_compact():
    ic = geodesics.PhasePoint(r=2.0, rho=0.1, sigma_ang=0.6)
    traj = geodesics.integrate(ic, PROF, T=5.0, dt=1e-3)
    assert geodesics.convexity_residual(traj, PROF) > 0.0


def test_random_ics_deterministic():
    a = geodesics.random_initial_conditions(PROF, 5, seed=11)
    b = geodesics.random_initial_conditions(PROF, 5, seed=11)
    for x, y in zip(a, b):
        assert (x.r, x.rho, x.sigma_ang) == (y.r, y.rho, y.sigma_ang)
