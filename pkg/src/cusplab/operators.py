"""Discretized 1D model operators with absorbing potentials and complex scaling.

The funnel model is
    P = h^2 D^2/(1+i g')^2 - h g'' hD/(1+i g')^3
        + alpha^2 (1-W_F) e^{-2(z+beta(z))} + h^2 V(z) - 1 - i W_F,
with z = r + i g(r); the cusp model keeps the full exponential potential and
uses the mirrored contour on the left with absorber W_C on the right.
Everything is tridiagonal on a uniform grid with Dirichlet ends.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .util import smoothstep, smoothstep_d, smoothstep_d2, smoothstep_int
from . import geometry


class ParameterError(ValueError):
    pass


class ResolutionError(ValueError):
    pass


class NearEigenvalueError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# potential and parameter maps


def potential_v(profile, r):
    """Conjugated-potential V = (n/2) beta'' + (n^2/2) beta' + (n^2/4) beta'^2."""
    n = profile.n
    b1 = profile.dbeta(r)
    b2 = profile.d2beta(r)
    return 0.5 * n * b2 + 0.5 * n * n * b1 + 0.25 * n * n * b1 * b1


def potential_v_complex(profile, z):
    """Same potential evaluated on the deformed contour (entire beta only)."""
    if not profile.supports_complex():
        raise ParameterError("profile %r has no sector-holomorphic beta; "
                             "contour deformation rejected" % profile.kind)
    n = profile.n
    b1 = profile.dbeta_complex(z)
    b2 = profile.d2beta_complex(z)
    return 0.5 * n * b2 + 0.5 * n * n * b1 + 0.25 * n * n * b1 * b1


def semiclassical_map(lam, h, m, ell=2.0 * np.pi):
    """(sigma, alpha) = (sqrt(1+lambda)/h, h * 2 pi m / ell); principal branch.

    Returns (sigma, alpha, at_branch_point)."""
    if h <= 0:
        raise ParameterError("h must be positive")
    sigma = np.sqrt(complex(1.0 + lam)) / h
    alpha = h * 2.0 * np.pi * m / ell
    return sigma, alpha, lam == -1.0


def rescale_vars(r, h, alpha, alpha0):
    """Cusp rescaling (r, h) -> (r, h)/log(2 alpha0/alpha)."""
    if not (0.0 < alpha < 2.0 * alpha0):
        raise ParameterError("rescaling needs 0 < alpha < 2*alpha0")
    L = np.log(2.0 * alpha0 / alpha)
    return r / L, h / L


def max_re_beta(profile, R_upper=None, npts=2000):
    """max |Re beta| over the real line and the sector boundary rays."""
    hi = (R_upper if R_upper is not None else profile.R_g + 8.0) + 5.0
    rs = np.linspace(-hi, hi, npts)
    m = float(np.max(np.abs(profile.beta(rs))))
    if profile.supports_complex():
        t = np.tan(profile.theta0)
        for sgn in (1.0, -1.0):
            zs = rs[rs > 0] * (1.0 + sgn * 1j * t)
            vals = profile.beta_complex(zs)
            m = max(m, float(np.max(np.abs(np.real(vals)))))
    return m


def alpha0_funnel(profile, R):
    """Elliptic threshold: alpha0^2 e^{-2(R+1)} e^{-2 max|Re beta|} = 8."""
    M = max_re_beta(profile, R_upper=R)
    return np.sqrt(8.0) * np.exp(R + 1.0 + M)


def alpha0_cusp(profile, npts=2000):
    """Smallest alpha with alpha^2 e^{-2(r+beta)} >= 3 for all r <= 0."""
    rs = np.linspace(-30.0, 0.0, npts)
    w = np.exp(-2.0 * (rs + profile.beta(rs)))
    return float(np.sqrt(3.0 / np.min(w)))


# ---------------------------------------------------------------------------
# absorbers and contours


@dataclass
class AbsorbingProfile:
    side: str
    W: Callable
    dW: Callable
    R_g: float


def absorbing_profile(side, R_g, margin=0.1):
    """Smooth polynomial-step absorber for the given side.

    cusp:   W = 0 near r <= -R_g, W = 1 near r >= 0.
    funnel: W = 1 near r <= 0, W = 0 near r >= R_g (nonincreasing).
    """
    if R_g <= 0:
        raise ParameterError("R_g must be positive")
    width = R_g - 2.0 * margin
    if side == "cusp":
        lo = -R_g + margin

        def W(r):
            return smoothstep((np.asarray(r, float) - lo) / width)

        def dW(r):
            return smoothstep_d((np.asarray(r, float) - lo) / width) / width
    elif side == "funnel":
        lo = margin

        def W(r):
            return 1.0 - smoothstep((np.asarray(r, float) - lo) / width)

        def dW(r):
            return -smoothstep_d((np.asarray(r, float) - lo) / width) / width
    else:
        raise ParameterError("side must be 'cusp' or 'funnel'")
    return AbsorbingProfile(side=side, W=W, dW=dW, R_g=R_g)


@dataclass
class ScalingContour:
    gamma: Callable
    dgamma: Callable
    d2gamma: Callable
    delta: float
    theta0: float
    R: float
    side: str = "funnel"
    R_alpha: Optional[float] = None
    kind: str = "small_alpha"


def contour_small_alpha(delta, R_minus, theta0, side="funnel"):
    """gamma = delta * gamma_-, gamma_- ramping to slope tan(theta0) past R_-+1.

    The cusp side mirrors: gamma_c(r) = -gamma_f(-r), deformed for r <= -R_-.
    """
    if not (0.0 < delta <= 0.1):
        raise ParameterError("delta must be in (0, 0.1]")
    t = np.tan(theta0)

    def g_f(r):
        return delta * t * smoothstep_int(np.asarray(r, float) - R_minus)

    def dg_f(r):
        return delta * t * smoothstep(np.asarray(r, float) - R_minus)

    def d2g_f(r):
        return delta * t * smoothstep_d(np.asarray(r, float) - R_minus)

    if side == "funnel":
        return ScalingContour(g_f, dg_f, d2g_f, delta, theta0, R_minus,
                              side=side, kind="small_alpha")
    if side == "cusp":
        return ScalingContour(lambda r: -g_f(-np.asarray(r, float)),
                              lambda r: dg_f(-np.asarray(r, float)),
                              lambda r: -d2g_f(-np.asarray(r, float)),
                              delta, theta0, -R_minus, side=side,
                              kind="small_alpha")
    raise ParameterError("side must be 'cusp' or 'funnel'")


def contour_large_alpha(alpha, theta0, R, max_re_beta_val=0.0):
    """Elliptic-regime funnel contour with plateau on [R+1, R_alpha].

    Requires alpha >= alpha0 with alpha0^2 e^{-2(R+1)} e^{-2 max|Re beta|} = 8;
    the turning radius solves alpha^2 e^{-2 R_alpha} e^{2 max|Re beta|}
    = min(1/4, tan(theta0)/2).
    """
    alpha0 = np.sqrt(8.0) * np.exp(R + 1.0 + max_re_beta_val)
    if alpha < alpha0:
        raise ParameterError(
            "alpha = %.4g below alpha0 = %.4g: use contour_small_alpha"
            % (alpha, alpha0))
    mmin = min(0.25, np.tan(theta0) / 2.0)
    R_alpha = np.log(alpha) + max_re_beta_val - 0.5 * np.log(mmin)
    # pi/12 rise keeps gamma' <= 1/2; a second rise to pi/6 over the last
    # unit of the plateau damps the region where the potential has shrunk
    # to its minimum admissible size
    plateau = np.pi / 12.0
    s_inf = min(0.5, np.tan(theta0))
    w = 0.5  # turning width past R_alpha; gamma' = s_inf * step <= 1/2

    def g(r):
        r = np.asarray(r, float)
        return plateau * (smoothstep(r - R) + smoothstep(r - (R_alpha - 1.0))) \
            + s_inf * w * smoothstep_int((r - R_alpha) / w)

    def dg(r):
        r = np.asarray(r, float)
        return plateau * (smoothstep_d(r - R)
                          + smoothstep_d(r - (R_alpha - 1.0))) \
            + s_inf * smoothstep((r - R_alpha) / w)

    def d2g(r):
        r = np.asarray(r, float)
        return plateau * (smoothstep_d2(r - R)
                          + smoothstep_d2(r - (R_alpha - 1.0))) \
            + s_inf * smoothstep_d((r - R_alpha) / w) / w

    return ScalingContour(g, dg, d2g, 1.0, theta0, R, side="funnel",
                          R_alpha=R_alpha, kind="large_alpha")


# ---------------------------------------------------------------------------
# discrete operator


@dataclass
class DiscreteOperator:
    grid: np.ndarray
    delta: float
    h: float
    alpha: float
    diag: np.ndarray
    sub: np.ndarray
    sup: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.grid.size

    def matrix(self, lam=0.0):
        return sp.diags([self.sub, self.diag - lam, self.sup], [-1, 0, 1],
                        format="csc")

    def apply(self, v, lam=0.0):
        out = (self.diag - lam) * v
        out[1:] += self.sub * v[:-1]
        out[:-1] += self.sup * v[1:]
        return out


def assemble(alpha, h, contour, absorber, profile, rmin, rmax, delta=None,
             side=None):
    """Tridiagonal discretization of the scaled, absorbed model operator.

    contour may be None (no deformation).  side defaults to the absorber's;
    it selects the potential convention (funnel multiplies the exponential
    term by 1 - W_F, the cusp keeps it in full).
    """
    if delta is None:
        delta = h / 16.0
    if delta > h / 10.0:
        raise ResolutionError("grid spacing %.3g too coarse for h = %.3g "
                              "(need delta <= h/10)" % (delta, h))
    if side is None:
        side = absorber.side if absorber is not None else "funnel"
    npts = int(np.floor((rmax - rmin) / delta)) - 1
    grid = rmin + delta * (1 + np.arange(npts))

    if contour is not None:
        g = np.asarray(contour.gamma(grid), float)
        dg = np.asarray(contour.dgamma(grid), float)
        d2g = np.asarray(contour.d2gamma(grid), float)
    else:
        g = np.zeros(npts)
        dg = np.zeros(npts)
        d2g = np.zeros(npts)
    z = grid + 1j * g
    deformed = np.any(g != 0.0) or np.any(dg != 0.0)

    if deformed:
        bz = profile.beta_complex(z) if profile.supports_complex() else None
        if bz is None:
            raise ParameterError("profile %r rejected for contour deformation"
                                 % profile.kind)
        vz = potential_v_complex(profile, z)
    else:
        bz = profile.beta(grid).astype(complex)
        vz = potential_v(profile, grid).astype(complex)

    if absorber is not None:
        W = np.asarray(absorber.W(grid), float)
    else:
        W = np.zeros(npts)

    expo = np.exp(-2.0 * (z + bz))
    if side == "funnel":
        pot = alpha ** 2 * (1.0 - W) * expo
    else:
        pot = alpha ** 2 * expo
    pot = pot + h * h * vz - 1.0 - 1j * W

    c = 1.0 / (1.0 + 1j * dg) ** 2
    k = h * h / delta ** 2
    diag = 2.0 * k * c + pot
    first = 1j * h * h * d2g / ((1.0 + 1j * dg) ** 3 * 2.0 * delta)
    sub = -k * c[1:] - first[1:]
    sup = -k * c[:-1] + first[:-1]
    return DiscreteOperator(grid=grid, delta=delta, h=h, alpha=alpha,
                            diag=diag, sub=sub, sup=sup,
                            meta={"side": side,
                                  "contour": getattr(contour, "kind", None),
                                  "absorber": getattr(absorber, "side", None),
                                  "rmin": rmin, "rmax": rmax})


def resolvent_norm(op, lam, tol=1e-8, maxiter=500, seed=11):
    """||(P - lambda)^{-1}|| = 1/sigma_min(P - lambda) via LU-backed Lanczos."""
    A = op.matrix(lam)
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise NearEigenvalueError("LU breakdown at lambda = %s" % lam) from exc
    linop = spla.LinearOperator(
        (op.n, op.n), dtype=complex,
        matvec=lambda v: lu.solve(v),
        rmatvec=lambda v: lu.solve(v, trans="H"))
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(op.n)
    try:
        s = spla.svds(linop, k=1, tol=tol, maxiter=maxiter, v0=v0,
                      return_singular_vectors=False)
    except spla.ArpackNoConvergence as exc:
        from .util import IterationError
        raise IterationError("singular-value iteration failed at lambda = %s"
                             % lam) from exc
    est = float(s[0])
    if not np.isfinite(est):
        raise NearEigenvalueError("resolvent blowup at lambda = %s" % lam)
    return est


# ---------------------------------------------------------------------------
# strip sweeps


@dataclass
class SweepResult:
    alpha: float
    h: float
    E: float
    Gamma_depth: float
    lambda_grid: list
    norms: list
    real_lambdas: list
    real_norms: list
    fitted_C0: float
    fit_residual: float

    @property
    def h_times_norms(self):
        return [self.h * n for n in self.real_norms]


def build_funnel_operator(alpha, h, profile, delta_contour=0.1, rmin=None,
                          rmax=None):
    """Funnel model with the contour matching the alpha regime."""
    R = profile.R_g + 1.0
    if rmin is None:
        rmin = -profile.R_g - 8.0
    if rmax is None:
        rmax = profile.R_g + 8.0
    a0 = alpha0_funnel(profile, R)
    if alpha >= a0:
        contour = contour_large_alpha(alpha, profile.theta0, R,
                                      max_re_beta(profile, R_upper=R))
    else:
        contour = contour_small_alpha(delta_contour, R, profile.theta0,
                                      side="funnel")
    absorber = absorbing_profile("funnel", profile.R_g)
    return assemble(alpha, h, contour, absorber, profile, rmin, rmax)


def build_cusp_operator(alpha, h, profile, delta_contour=0.1, rmin=None,
                        rmax=None):
    """Cusp model: mirrored contour on the left, absorber toward the funnel."""
    R = profile.R_g + 1.0
    if rmin is None:
        rmin = -profile.R_g - 8.0
    if rmax is None:
        rmax = profile.R_g + 8.0
    contour = contour_small_alpha(delta_contour, R, profile.theta0,
                                  side="cusp")
    absorber = absorbing_profile("cusp", profile.R_g)
    return assemble(alpha, h, contour, absorber, profile, rmin, rmax)


def strip_sweep(alphas, hs, E, Gamma_depth, points, profile=None,
                depths=6, re_fixed=None, workers=None):
    """Resolvent-norm sweep over the strip [-E,E] - i[0, Gamma h].

    For each (alpha, h): real-axis norms at `points` energies, plus a fixed
    Re lambda column at `depths` strip depths from which C0 is fitted by
    least squares on log norm vs |Im lambda|/h.
    """
    if not (0.0 < E < 1.0):
        raise ParameterError("E must lie in (0, 1)")
    if profile is None:
        # wide sector: the contour's asymptotic rotation must push the
        # continuous spectrum well below the probed strip depth Gamma*h
        profile = geometry.constant_profile(theta0=0.75)
    if re_fixed is None:
        re_fixed = 0.5 * E
    results = []
    for alpha in alphas:
        for h in hs:
            op = build_funnel_operator(alpha, h, profile)
            real_lams = list(np.linspace(-E, E, points))
            real_norms = [resolvent_norm(op, lam) for lam in real_lams]
            svals = [Gamma_depth * h * k / depths for k in range(depths + 1)]
            lam_grid = [complex(re_fixed, -s) for s in svals]
            norms = [resolvent_norm(op, lam) for lam in lam_grid]
            x = np.array(svals) / h
            y = np.log(norms)
            coef, res_, *_ = np.polyfit(x, y, 1, full=True)[:2]
            c0 = float(coef[0])
            residual = float(res_[0]) if len(res_) else 0.0
            results.append(SweepResult(
                alpha=alpha, h=h, E=E, Gamma_depth=Gamma_depth,
                lambda_grid=lam_grid, norms=norms,
                real_lambdas=real_lams, real_norms=real_norms,
                fitted_C0=c0, fit_residual=residual))
    return results
