"""Reduced geodesic Hamiltonian flow on the warped product.

After separating the fiber motion, the flow in (r, rho) is generated by
p = rho^2 + e^{-2(r+beta)} sigma_ang - 1 with sigma_ang conserved:
    dr/dt = 2 rho,   drho/dt = 2 (1+beta') e^{-2(r+beta)} sigma_ang.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np


class FlowDomainError(ValueError):
    pass


@dataclass
class PhasePoint:
    r: float
    rho: float
    sigma_ang: float = 0.0

    def __post_init__(self):
        if self.sigma_ang < 0:
            raise ValueError("sigma_ang must be >= 0")


@dataclass
class Trajectory:
    times: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    sigma_ang: float
    dt: float
    energy_drift: float
    accuracy_failure: bool = False

    def state(self, i):
        return PhasePoint(float(self.r[i]), float(self.rho[i]), self.sigma_ang)


@dataclass
class EscapeReport:
    escaped: bool
    max_abs_r: float
    cusp_intervals: int
    trapped_flag: bool


def hamiltonian_value(state, profile):
    """p = rho^2 + e^{-2(r+beta)} sigma_ang - 1."""
    w = np.exp(-2.0 * (state.r + float(profile.beta(state.r))))
    return state.rho ** 2 + w * state.sigma_ang - 1.0


def _rhs(r, rho, sigma_ang, profile):
    w = np.exp(-2.0 * (r + profile.beta(r)))
    return 2.0 * rho, 2.0 * (1.0 + profile.dbeta(r)) * w * sigma_ang


def integrate(state, profile, T, dt):
    """Classical RK4 integration of the reduced flow over [0, T]."""
    if dt <= 0 or T <= 0:
        raise ValueError("T and dt must be positive")
    nsteps = int(np.ceil(T / dt))
    times = np.empty(nsteps + 1)
    rs = np.empty(nsteps + 1)
    rhos = np.empty(nsteps + 1)
    r, rho = float(state.r), float(state.rho)
    s = float(state.sigma_ang)
    times[0], rs[0], rhos[0] = 0.0, r, rho
    for k in range(nsteps):
        hstep = min(dt, T - k * dt)
        k1r, k1p = _rhs(r, rho, s, profile)
        k2r, k2p = _rhs(r + 0.5 * hstep * k1r, rho + 0.5 * hstep * k1p, s, profile)
        k3r, k3p = _rhs(r + 0.5 * hstep * k2r, rho + 0.5 * hstep * k2p, s, profile)
        k4r, k4p = _rhs(r + hstep * k3r, rho + hstep * k3p, s, profile)
        r += hstep * (k1r + 2 * k2r + 2 * k3r + k4r) / 6.0
        rho += hstep * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0
        times[k + 1], rs[k + 1], rhos[k + 1] = min((k + 1) * dt, T), r, rho
    beta_vals = profile.beta(rs)
    p = rhos ** 2 + np.exp(-2.0 * (rs + beta_vals)) * s - 1.0
    drift = float(np.max(np.abs(p - p[0])))
    return Trajectory(times=times, r=rs, rho=rhos, sigma_ang=s, dt=dt,
                      energy_drift=drift, accuracy_failure=drift > 1e-6)


def convexity_residual(traj, profile):
    """min over samples outside {|r| <= R_g} of r-ddot = 4(1+beta') e^{-2(r+beta)} sigma.

    Samples in the compact region are skipped (returned count in the note).
    """
    mask = np.abs(traj.r) > profile.R_g
    rs = traj.r[mask]
    if rs.size == 0:
        raise FlowDomainError("no samples outside |r| <= R_g")
    acc = 4.0 * (1.0 + profile.dbeta(rs)) \
        * np.exp(-2.0 * (rs + profile.beta(rs))) * traj.sigma_ang
    return float(np.min(acc)) if np.ndim(acc) else float(acc)


def tanh_residual(traj, profile):
    """Residual of the integrated-flow identity

    atanh(rho_hat(t)) - atanh(rho_hat(0)) = 2 sqrt(p+1) (t + int_0^t beta'(r)).
    """
    if traj.sigma_ang <= 0:
        raise FlowDomainError("sigma_ang = 0 makes rho_hat = +-1 (atanh singular)")
    p = hamiltonian_value(traj.state(0), profile)
    root = np.sqrt(p + 1.0)
    rho_hat = traj.rho / root
    if np.any(np.abs(rho_hat) >= 1.0):
        raise FlowDomainError("|rho_hat| reached 1")
    lhs = np.arctanh(rho_hat) - np.arctanh(rho_hat[0])
    bvals = profile.dbeta(traj.r)
    integral = np.concatenate([[0.0], np.cumsum(
        0.5 * (bvals[1:] + bvals[:-1]) * np.diff(traj.times))])
    rhs = 2.0 * root * (traj.times + integral)
    return float(np.max(np.abs(lhs - rhs)))


def escape_report(ics, profile, T=200.0, dt=1e-3, escape_radius=None):
    """Escape / cusp-interval / trapping diagnostics per initial condition."""
    if escape_radius is None:
        escape_radius = profile.R_g + 10.0
    out = []
    for ic in ics:
        traj = integrate(ic, profile, T, dt)
        maxabs = float(np.max(np.abs(traj.r)))
        escaped = maxabs > escape_radius
        out.append(EscapeReport(
            escaped=escaped,
            max_abs_r=maxabs,
            cusp_intervals=_count_cusp_intervals(traj.r, profile.R_g),
            trapped_flag=not escaped,
        ))
    return out


def _count_cusp_intervals(rs, R_g, hysteresis=0.1):
    """Count maximal r < -R_g excursions with a hysteresis band of width 0.1."""
    count = 0
    inside = False
    for r in rs:
        if not inside and r < -R_g - hysteresis / 2.0:
            inside = True
            count += 1
        elif inside and r > -R_g + hysteresis / 2.0:
            inside = False
    return count


def random_initial_conditions(profile, count, seed=0, p_window=(-0.5, 0.5)):
    """Uniform ICs: r in [-R_g-2, R_g+2], rho in [-1,1], sigma from p window."""
    rng = np.random.default_rng(seed)
    ics = []
    while len(ics) < count:
        r = rng.uniform(-profile.R_g - 2.0, profile.R_g + 2.0)
        rho = rng.uniform(-1.0, 1.0)
        plo = max(p_window[0], rho ** 2 - 1.0)
        if plo > p_window[1]:
            continue
        p = rng.uniform(plo, p_window[1])
        sigma = (p + 1.0 - rho ** 2) * np.exp(2.0 * (r + float(profile.beta(r))))
        if sigma < 0:
            continue
        ics.append(PhasePoint(r, rho, sigma))
    return ics
