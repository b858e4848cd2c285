"""Exact model resolvent on the cylinder, per angular mode.

Mode m = 0 has the free-line kernel -e^{i sigma |r-r'|}/(2 i sigma); modes
m >= 1 have kernel -I_nu(lam_m e^{-max}) K_nu(lam_m e^{-min}) with
nu = -i sigma and unit Wronskian.  Cutoff operator norms are computed by
Nystrom discretization and power iteration; the lower-bound exponent
2|Im sigma| - 1 is recovered as a log-log slope.
"""

from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .util import smoothstep, power_iteration_norm, IterationError, winding_number


class KernelPoleError(ZeroDivisionError):
    pass


class InsufficientDataError(ValueError):
    pass


@dataclass
class ModeKernel:
    m: int
    lambda_m: float
    sigma: complex

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mode index must be >= 0")
        if self.m == 0 and self.lambda_m != 0.0:
            raise ValueError("mode 0 has lambda_0 = 0")
        if self.m > 0 and self.lambda_m <= 0.0:
            raise ValueError("mode %d needs lambda_m > 0" % self.m)

    @property
    def nu(self):
        return -1j * complex(self.sigma)


@dataclass
class CutoffWindow:
    a: float = 1.0
    npoints: int = 400
    grid: np.ndarray = field(default=None)
    weights: np.ndarray = field(default=None)
    chi: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("window half-width must be positive")
        self.grid = np.linspace(-self.a, self.a, self.npoints)
        w = np.full(self.npoints, self.grid[1] - self.grid[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        self.weights = w
        self.chi = cutoff_values(self.grid, self.a)

    def refined(self, factor=2):
        return CutoffWindow(a=self.a, npoints=self.npoints * factor)


def cutoff_values(r, a):
    """Smooth cutoff: 1 on [-a/2, a/2], 0 outside (-a, a), polynomial step."""
    r = np.asarray(r, dtype=float)
    return smoothstep((a - np.abs(r)) / (a / 2.0))


def kernel_value(mode, r, rp):
    """Resolvent kernel at a single point pair."""
    if mode.m == 0:
        if mode.sigma == 0:
            raise KernelPoleError("mode 0 kernel has a pole at sigma = 0")
        return -np.exp(1j * mode.sigma * abs(r - rp)) / (2j * mode.sigma)
    zmax = mode.lambda_m * np.exp(-max(r, rp))
    zmin = mode.lambda_m * np.exp(-min(r, rp))
    iv, kv = specfun.bessel_ik_grid(mode.nu, np.array([zmax, zmin]),
                                    extended=True)
    return -iv[0] * kv[1]


def kernel_matrix(mode, window):
    """Kernel sampled on window.grid x window.grid (no cutoff, no weights)."""
    r = window.grid
    if mode.m == 0:
        if mode.sigma == 0:
            raise KernelPoleError("mode 0 kernel has a pole at sigma = 0")
        d = np.abs(r[:, None] - r[None, :])
        return -np.exp(1j * mode.sigma * d) / (2j * mode.sigma)
    z = mode.lambda_m * np.exp(-r)  # decreasing in r
    iv, kv = specfun.bessel_ik_grid(mode.nu, z, extended=True)
    idx = np.arange(r.size)
    hi = np.maximum(idx[:, None], idx[None, :])  # index of max(r, r')
    lo = np.minimum(idx[:, None], idx[None, :])
    return -iv[hi] * kv[lo]


def cutoff_norm(mode, window, tol=1e-8, maxiter=500):
    """Largest singular value of chi R_m chi by Nystrom + power iteration."""
    km = kernel_matrix(mode, window)
    M = (window.chi[:, None] * km) * (window.chi * window.weights)[None, :]

    def mv(v):
        return M @ v

    def rmv(v):
        return M.conj().T @ v

    return power_iteration_norm(mv, rmv, window.npoints, tol=tol,
                                maxiter=maxiter)


def lower_bound_slope(im_sigma, re_range=(10.0, 60.0), window=None,
                      points=10, m=1, lambda_m=1.0):
    """Fitted slope of log cutoff-norm vs log|sigma| along Im sigma = const.

    The model exponent is 2|Im sigma| - 1.
    """
    if im_sigma > 0:
        raise ValueError("lower-bound regime needs Im sigma <= 0")
    if points < 8:
        raise ValueError("at least 8 sample points required")
    if window is None:
        window = CutoffWindow(a=1.0, npoints=400)
    res = np.exp(np.linspace(np.log(re_range[0]), np.log(re_range[1]), points))
    logs, lognorms = [], []
    for re in res:
        sigma = complex(re, im_sigma)
        try:
            n = cutoff_norm(ModeKernel(m=m, lambda_m=lambda_m, sigma=sigma),
                            window)
        except (specfun.DomainError, IterationError):
            continue
        logs.append(np.log(abs(sigma)))
        lognorms.append(np.log(n))
    if len(logs) < 4:
        raise InsufficientDataError("only %d valid samples" % len(logs))
    slope = np.polyfit(logs, lognorms, 1)[0]
    return float(slope)


def pole_residue(window=None, eps_circle=1e-3, ncirc=16):
    """Residue of the mode-0 kernel at sigma = 0 via a small circle average.

    Returns (rank, residue_norm, residue_value) where residue_value is the
    (constant) kernel entry, expected i/2.
    """
    if window is None:
        window = CutoffWindow(a=1.0, npoints=80)
    thetas = 2.0 * np.pi * np.arange(ncirc) / ncirc
    acc = np.zeros((window.npoints, window.npoints), dtype=complex)
    for th in thetas:
        sigma = eps_circle * np.exp(1j * th)
        km = kernel_matrix(ModeKernel(m=0, lambda_m=0.0, sigma=sigma), window)
        acc += sigma * km
    res = acc / ncirc
    svals = np.linalg.svd(res, compute_uv=False)
    rank = int(np.sum(svals > 1e-6 * svals[0]))
    mid = window.npoints // 2
    return rank, float(svals[0]), complex(res[mid, mid])


def wronskian_winding(box, lambda_m=1.0, n_per_side=60):
    """Winding of the radial Wronskian around a sigma box; 0 certifies no poles.

    box = (re_min, re_max, im_min, im_max).
    """
    re0, re1, im0, im1 = box
    top = [complex(x, im1) for x in np.linspace(re0, re1, n_per_side)]
    right = [complex(re1, y) for y in np.linspace(im1, im0, n_per_side)]
    bot = [complex(x, im0) for x in np.linspace(re1, re0, n_per_side)]
    left = [complex(re0, y) for y in np.linspace(im0, im1, n_per_side)]
    vals = [specfun.wronskian_radial(-1j * s, lambda_m, 0.0)
            for s in top + right[1:] + bot[1:] + left[1:]]
    return winding_number(np.array(vals))
