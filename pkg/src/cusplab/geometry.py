"""Warp profiles and curvature of the metric g = dr^2 + e^{2(r+beta)} dS.

A profile stores beta with closed-form first and second derivatives.  The
radial sectional curvature is -f''/f and the tangential one is
(Ktilde - f'^2)/f^2 with f = e^{r+beta}.  An independent finite-difference
oracle recomputes sectional curvature from the metric alone.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline


class ProfileError(ValueError):
    pass


class DimensionError(ProfileError):
    pass


class UnsupportedProfileError(ProfileError):
    pass


@dataclass(frozen=True)
class FiberCircle:
    """Circle fiber of circumference ell; sqrt-eigenvalues 2 pi m / ell."""
    ell: float = 2.0 * np.pi

    def sqrt_eigenvalue(self, m):
        return 2.0 * np.pi * m / self.ell

    @property
    def dim(self):
        return 1


@dataclass(frozen=True)
class FiberTorus:
    """Flat rectangular torus with side lengths `ells`."""
    ells: tuple = (2.0 * np.pi, 2.0 * np.pi)

    @property
    def dim(self):
        return len(self.ells)


@dataclass(frozen=True)
class FiberAbstract:
    """Fiber described only by a list of sqrt-eigenvalues of its Laplacian."""
    sqrt_eigenvalues: tuple
    dim_: int = 2

    @property
    def dim(self):
        return self.dim_


@dataclass
class WarpProfile:
    """Metric data for g = dr^2 + f(r)^2 dS with f = e^{r + beta(r)}.

    beta, dbeta, d2beta are closed-form callables (vectorized over numpy
    arrays).  b-profiles additionally carry b = beta' and b' with compact
    support; tabulated profiles use spline derivatives and are flagged.
    """
    n: int = 1
    R_g: float = 1.0
    theta0: float = np.pi / 8.0
    beta: Callable = None
    dbeta: Callable = None
    d2beta: Callable = None
    fiber: object = field(default_factory=FiberCircle)
    kind: str = "constant"
    params: dict = field(default_factory=dict)
    is_b_profile: bool = False
    b_support: Optional[tuple] = None
    beta_complex: Optional[Callable] = None
    dbeta_complex: Optional[Callable] = None
    d2beta_complex: Optional[Callable] = None

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("fiber dimension must be >= 1")
        if self.R_g <= 0:
            raise ProfileError("R_g must be positive")
        if not (0.0 < self.theta0 < np.pi / 4.0):
            raise ProfileError("theta0 must lie in (0, pi/4)")
        if self.beta is None:
            self.beta = lambda r: np.zeros_like(np.asarray(r, dtype=float))
            self.dbeta = lambda r: np.zeros_like(np.asarray(r, dtype=float))
            self.d2beta = lambda r: np.zeros_like(np.asarray(r, dtype=float))

    # -- profile checks -------------------------------------------------

    def beta_bound_margin(self, grid):
        """min over grid of 1/4 - (|beta'| + |beta''|); >= 0 means admissible."""
        g = np.asarray(grid, dtype=float)
        return float(np.min(0.25 - (np.abs(self.dbeta(g)) + np.abs(self.d2beta(g)))))

    def supports_complex(self):
        return self.beta_complex is not None

    # -- serialization --------------------------------------------------

    def to_config(self):
        cfg = {
            "n": str(self.n),
            "R_g": repr(self.R_g),
            "theta0": repr(self.theta0),
            "profile.kind": self.kind,
        }
        for k, v in self.params.items():
            cfg["profile.params.%s" % k] = repr(v)
        return cfg

    @staticmethod
    def from_config(cfg):
        kind = cfg.get("profile.kind", "constant")
        params = {}
        for k, v in cfg.items():
            if k.startswith("profile.params."):
                params[k[len("profile.params."):]] = float(v)
        common = dict(
            n=int(cfg.get("n", 1)),
            R_g=float(cfg.get("R_g", 1.0)),
            theta0=float(cfg.get("theta0", np.pi / 8.0)),
        )
        if kind == "constant":
            return constant_profile(**common)
        if kind == "funnel":
            return funnel_profile(beta0=params.get("beta0", 0.0), **common)
        if kind == "b_gaussian":
            return b_gaussian_profile(amp=params.get("amp", -0.1),
                                      width=params.get("width", 1.0), **common)
        raise UnsupportedProfileError("unknown profile kind %r" % kind)


# ---------------------------------------------------------------------------
# built-in profiles


def constant_profile(n=1, R_g=1.0, theta0=np.pi / 8.0, fiber=None):
    """beta == 0, so f = e^r on the whole line (exact hyperbolic ends)."""
    z = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    zc = lambda w: np.zeros_like(np.asarray(w, dtype=complex))
    return WarpProfile(n=n, R_g=R_g, theta0=theta0,
                       beta=z, dbeta=z, d2beta=z,
                       fiber=fiber or FiberCircle(),
                       kind="constant", is_b_profile=True, b_support=(0.0, 0.0),
                       beta_complex=zc, dbeta_complex=zc, d2beta_complex=zc)


def funnel_profile(beta0=0.0, n=1, R_g=1.0, theta0=np.pi / 8.0, fiber=None):
    """beta(r) = beta0 + log(1 + e^{-2r}); f = e^{beta0} 2 cosh r.

    This is the exact hyperbolic funnel profile; note it does not satisfy
    the |beta'| + |beta''| <= 1/4 bound near r = 0 (it is meant as a
    funnel-end profile, and doubles as the trapped "bulge" when used on the
    whole line since f'(0) = 0).
    """
    def beta(r):
        r = np.asarray(r, dtype=float)
        return beta0 + np.log1p(np.exp(-2.0 * r))

    def dbeta(r):
        r = np.asarray(r, dtype=float)
        return -2.0 / (1.0 + np.exp(2.0 * r))

    def d2beta(r):
        r = np.asarray(r, dtype=float)
        e = np.exp(2.0 * r)
        return 4.0 * e / (1.0 + e) ** 2

    def beta_c(w):
        w = np.asarray(w, dtype=complex)
        return beta0 + np.log(1.0 + np.exp(-2.0 * w))

    def dbeta_c(w):
        w = np.asarray(w, dtype=complex)
        return -2.0 / (1.0 + np.exp(2.0 * w))

    def d2beta_c(w):
        w = np.asarray(w, dtype=complex)
        e = np.exp(2.0 * w)
        return 4.0 * e / (1.0 + e) ** 2

    return WarpProfile(n=n, R_g=R_g, theta0=theta0,
                       beta=beta, dbeta=dbeta, d2beta=d2beta,
                       fiber=fiber or FiberCircle(),
                       kind="funnel", params={"beta0": beta0},
                       beta_complex=beta_c, dbeta_complex=dbeta_c,
                       d2beta_complex=d2beta_c)


def b_profile(b, db, support, n=1, R_g=1.0, theta0=np.pi / 8.0, fiber=None,
              b_complex=None, db_complex=None, kind="b_custom", params=None):
    """Profile with beta' = b compactly supported; beta = int_{-inf}^r b."""
    lo, hi = support
    total = quad(b, lo, hi, limit=200)[0]

    def beta(r):
        scal = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        for i, ri in enumerate(r):
            if ri <= lo:
                out[i] = 0.0
            elif ri >= hi:
                out[i] = total
            else:
                out[i] = quad(b, lo, ri, limit=200)[0]
        return out[0] if scal else out

    return WarpProfile(n=n, R_g=R_g, theta0=theta0,
                       beta=beta, dbeta=b, d2beta=db,
                       fiber=fiber or FiberCircle(),
                       kind=kind, params=params or {},
                       is_b_profile=True, b_support=support)


def b_gaussian_profile(amp=-0.1, width=1.0, n=1, R_g=1.0, theta0=np.pi / 8.0,
                       fiber=None):
    """b(r) = amp * exp(-(r/width)^2), treated as compactly supported.

    The tails below 1e-300 are exactly zero in floating point well before
    |r| = 30*width, which is what "compact support" means on a grid.
    """
    def b(r):
        r = np.asarray(r, dtype=float)
        return amp * np.exp(-(r / width) ** 2)

    def db(r):
        r = np.asarray(r, dtype=float)
        return amp * np.exp(-(r / width) ** 2) * (-2.0 * r / width ** 2)

    prof = b_profile(b, db, support=(-27.0 * width, 27.0 * width),
                     n=n, R_g=R_g, theta0=theta0, fiber=fiber,
                     kind="b_gaussian", params={"amp": amp, "width": width})

    # closed-form antiderivative (erf), so beta is cheap and beta_complex exists
    from scipy.special import erf

    half = amp * width * np.sqrt(np.pi) / 2.0

    def beta(r):
        r = np.asarray(r, dtype=float)
        return half * (1.0 + erf(r / width))

    prof.beta = beta

    def beta_c(w):
        from scipy.special import erf as _erf  # scipy erf handles complex
        w = np.asarray(w, dtype=complex)
        return half * (1.0 + _cerf(w / width))

    def dbeta_c(w):
        w = np.asarray(w, dtype=complex)
        return amp * np.exp(-(w / width) ** 2)

    def d2beta_c(w):
        w = np.asarray(w, dtype=complex)
        return amp * np.exp(-(w / width) ** 2) * (-2.0 * w / width ** 2)

    prof.beta_complex = beta_c
    prof.dbeta_complex = dbeta_c
    prof.d2beta_complex = d2beta_c
    return prof


def _cerf(z):
    """erf for complex arguments via the Faddeeva function."""
    from scipy.special import erf as _erf
    z = np.asarray(z, dtype=complex)
    try:
        return _erf(z)
    except TypeError:
        from scipy.special import wofz
        return 1.0 - np.exp(-z * z) * wofz(1j * z)


def tabulated_profile(r_samples, beta_samples, n=1, R_g=1.0, theta0=np.pi / 8.0,
                      fiber=None):
    """Profile from tabulated beta values; derivatives from a cubic spline.

    Rejected for contour deformation (no sector holomorphy), usable for
    real-r curvature work only.
    """
    sp = CubicSpline(np.asarray(r_samples, float), np.asarray(beta_samples, float))
    d1 = sp.derivative(1)
    d2 = sp.derivative(2)
    prof = WarpProfile(n=n, R_g=R_g, theta0=theta0,
                       beta=lambda r: sp(np.asarray(r, float)),
                       dbeta=lambda r: d1(np.asarray(r, float)),
                       d2beta=lambda r: d2(np.asarray(r, float)),
                       fiber=fiber or FiberCircle(),
                       kind="tabulated")
    prof.params = {"knot_lo": float(r_samples[0]), "knot_hi": float(r_samples[-1])}
    return prof


def bulge_profile(depth=-1.5, width=0.7, n=1, R_g=1.0):
    """b-profile dipping below -1 so that f'(r*) = 0 somewhere.

    Violates the |beta'| + |beta''| <= 1/4 bound on purpose; used to build a
    trapped circular geodesic.  f has a local max at the first zero of 1+b.
    """
    return b_gaussian_profile(amp=depth, width=width, n=n, R_g=R_g)


# ---------------------------------------------------------------------------
# operations


def evaluate_warp(profile, r):
    """Return (f, f', f'') at r for f = e^{r+beta}."""
    b1 = profile.dbeta(r)
    b2 = profile.d2beta(r)
    f = np.exp(np.asarray(r, dtype=float) + profile.beta(r))
    fp = (1.0 + b1) * f
    fpp = (b2 + (1.0 + b1) ** 2) * f
    return f, fp, fpp


def radial_curvature(profile, r):
    """Sectional curvature of a plane containing d/dr: K = -f''/f."""
    b1 = profile.dbeta(r)
    b2 = profile.d2beta(r)
    return -(b2 + (1.0 + b1) ** 2)


def tangential_curvature(profile, r, Ktilde):
    """Curvature of a fiber 2-plane: (Ktilde - f'^2)/f^2.  Needs n >= 2."""
    if profile.n < 2:
        raise DimensionError("tangential plane needs fiber dimension >= 2")
    f, fp, _ = evaluate_warp(profile, r)
    return (Ktilde - fp ** 2) / f ** 2


def nonpositivity_margin(profile, grid):
    """min over grid of b' + (1+b)^2; >= 0 certifies nonpositive radial K."""
    if not profile.is_b_profile:
        raise UnsupportedProfileError("nonpositivity margin needs a b-profile")
    g = np.asarray(grid, dtype=float)
    b = profile.dbeta(g)
    db = profile.d2beta(g)
    return float(np.min(db + (1.0 + b) ** 2))


# ---------------------------------------------------------------------------
# finite-difference curvature oracle

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0          # 4th order f'
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0       # 4th order f''


def _metric_radial(profile, fiber_scale=1.0):
    """Warped 2D block diag(1, f(r)^2 * c) in coordinates (r, x)."""
    def g(x):
        f = np.exp(x[0] + float(profile.beta(x[0])))
        return np.diag([1.0, (f * fiber_scale) ** 2])
    return g


def _metric_tangential(profile, Ktilde):
    """3D block diag(1, f^2, f^2 * sk(x1)^2) whose fiber has curvature Ktilde."""
    if Ktilde > 0:
        rt = np.sqrt(Ktilde)
        sk = lambda t: np.sin(rt * t) / rt
    elif Ktilde < 0:
        rt = np.sqrt(-Ktilde)
        sk = lambda t: np.sinh(rt * t) / rt
    else:
        sk = lambda t: t

    def g(x):
        f = np.exp(x[0] + float(profile.beta(x[0])))
        return np.diag([1.0, f ** 2, (f * sk(x[1])) ** 2])
    return g


def _sectional_fd(metric, x0, i, j, step):
    """Sectional curvature of the coordinate plane (e_i, e_j) at x0.

    Uses 4th-order central differences of the metric for the first
    derivatives (Christoffel symbols) and second derivatives (curvature
    tensor), then
      R_{abcd} = 1/2 (g_{ad,bc} + g_{bc,ad} - g_{ac,bd} - g_{bd,ac})
                 + g^{ef} (Gamma_{e,ad} Gamma_{f,bc} - Gamma_{e,ac} Gamma_{f,bd})
    with lowered Christoffels Gamma_{c,ab} = 1/2 (g_{ca,b} + g_{cb,a} - g_{ab,c}).
    """
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * step

    g0 = metric(x0)
    # dg[c][a,b] = d_c g_ab ; ddg[c][e][a,b] = d_c d_e g_ab
    dg = np.zeros((d, d, d))
    ddg = np.zeros((d, d, d, d))
    for c in range(d):
        stencil = []
        for o in offs:
            xx = x0.copy()
            xx[c] += o
            stencil.append(metric(xx))
        stencil = np.array(stencil)
        dg[c] = np.tensordot(_D1, stencil, axes=(0, 0)) / step
        ddg[c, c] = np.tensordot(_D2, stencil, axes=(0, 0)) / step ** 2
    for c in range(d):
        for e in range(c + 1, d):
            vals = np.zeros((5, 5, d, d))
            for ic, oc in enumerate(offs):
                for ie, oe in enumerate(offs):
                    xx = x0.copy()
                    xx[c] += oc
                    xx[e] += oe
                    vals[ic, ie] = metric(xx)
            m = np.tensordot(_D1, np.tensordot(_D1, vals, axes=(0, 1)), axes=(0, 0))
            ddg[c, e] = m / step ** 2
            ddg[e, c] = ddg[c, e]

    ginv = np.linalg.inv(g0)
    gam = np.zeros((d, d, d))  # Gamma_{c,ab}
    for c in range(d):
        for a in range(d):
            for b in range(d):
                gam[c, a, b] = 0.5 * (dg[b][c, a] + dg[a][c, b] - dg[c][a, b])

    a, b = i, j
    # R_{abab}
    term2 = 0.5 * (ddg[b, a][a, b] + ddg[a, b][b, a]
                   - ddg[a, a][b, b] - ddg[b, b][a, a])
    quad_term = 0.0
    for e in range(d):
        for f_ in range(d):
            quad_term += ginv[e, f_] * (gam[e, a, b] * gam[f_, b, a]
                                        - gam[e, a, a] * gam[f_, b, b])
    R_abab = term2 + quad_term
    denom = g0[a, a] * g0[b, b] - g0[a, b] ** 2
    # sign fixed so that the round sphere has K = +1
    return R_abab / denom


def riemann_oracle(profile, r, plane="radial", step=1e-3, Ktilde=0.0):
    """Finite-difference sectional curvature, independent of the formulas.

    plane = "radial": the (dr, fiber) plane; "tangential": a fiber 2-plane
    of a fiber with constant curvature Ktilde (needs n >= 2).
    """
    if step > 1e-2:
        warnings.warn("riemann_oracle: step %.3g is too large for 4th-order "
                      "accuracy at 1e-6" % step, RuntimeWarning)
    if plane == "radial":
        g = _metric_radial(profile)
        x0 = np.array([float(r), 0.3])
        return _sectional_fd(g, x0, 0, 1, step)
    if plane == "tangential":
        if profile.n < 2:
            raise DimensionError("tangential plane needs fiber dimension >= 2")
        g = _metric_tangential(profile, Ktilde)
        if Ktilde > 0:
            x1 = 0.5 * np.pi / np.sqrt(Ktilde) * 0.6
        else:
            x1 = 0.8
        x0 = np.array([float(r), x1, 0.2])
        return _sectional_fd(g, x0, 1, 2, step)
    raise ValueError("plane must be 'radial' or 'tangential'")


def curvature_report(profile, r, plane="radial", step=1e-3, Ktilde=0.0):
    """Bundle analytic and oracle curvature values with their gap."""
    Kr = float(radial_curvature(profile, r))
    Kt = float(tangential_curvature(profile, r, Ktilde)) if profile.n >= 2 else np.nan
    oracle = riemann_oracle(profile, r, plane=plane, step=step, Ktilde=Ktilde)
    analytic = Kr if plane == "radial" else Kt
    return {
        "r": float(r),
        "K_radial": Kr,
        "K_tangential": Kt,
        "oracle_K": float(oracle),
        "abs_error": abs(analytic - oracle),
    }
