"""Glued parametrix from cusp, compact and funnel model resolvents.

With a partition of unity chi_C + chi_K + chi_F = 1 and widened cutoffs
chi~_j (== 1 on supp chi_j), the candidate inverse
    G = chi~_C R_C chi_C + chi~_K R_K chi_K + chi~_F R_F chi_F
satisfies (P - lambda) G = Id - A with A = A_C + A_K + A_F, where each
A_j = [chi~_j, P] R_j chi_j is a commutator term supported where chi~_j
varies.  Support disjointness kills most products of the A_j, so the
Neumann-corrected parametrix G (Id + A + A^2 + A^3) has remainder A^4.
All norms are measured by power iteration on lazily composed closures.
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import scipy.sparse.linalg as spla

from . import operators as ops
from .util import smoothstep, smoothstep_int, power_iteration_norm


class GridError(ValueError):
    pass


@dataclass
class CutoffTriple:
    R_g: float
    grid: np.ndarray
    chi_C: np.ndarray
    chi_K: np.ndarray
    chi_F: np.ndarray
    chi_C_wide: np.ndarray
    chi_K_wide: np.ndarray
    chi_F_wide: np.ndarray


def _chi_F_fn(r, R_g):
    return smoothstep(np.asarray(r, float) - (R_g + 1.0))


def build_cutoffs(R_g, grid):
    """Partition of unity with mirrored funnel/cusp cutoffs on the grid.

    chi_F rises on (R_g+1, R_g+2); chi_C(r) = chi_F(-r); chi_K is the rest.
    The widened copies are resampled closed forms shifted outward by 1.
    """
    grid = np.asarray(grid, float)
    if grid[0] > -(R_g + 3.0) or grid[-1] < R_g + 3.0:
        raise GridError("grid must span beyond +-(R_g+3)")
    cF = _chi_F_fn(grid, R_g)
    cC = _chi_F_fn(-grid, R_g)
    cK = 1.0 - cC - cF
    wF = _chi_F_fn(grid + 1.0, R_g)
    wC = _chi_F_fn(-(grid - 1.0), R_g)
    wK = 1.0 - _chi_F_fn(np.abs(grid) - 1.0, R_g)
    return CutoffTriple(R_g=R_g, grid=grid, chi_C=cC, chi_K=cK, chi_F=cF,
                        chi_C_wide=wC, chi_K_wide=wK, chi_F_wide=wF)


# ---------------------------------------------------------------------------
# model operators on the shared grid


def _two_sided_contour(profile, onset):
    """Deformation beyond +-onset with slope delta*tan(theta0), both sides."""
    t = 0.1 * np.tan(profile.theta0)

    def g(r):
        r = np.asarray(r, float)
        return t * (smoothstep_int(r - onset) - smoothstep_int(-r - onset))

    def dg(r):
        r = np.asarray(r, float)
        return t * (smoothstep(r - onset) + smoothstep(-r - onset))

    def d2g(r):
        r = np.asarray(r, float)
        from .util import smoothstep_d
        return t * (smoothstep_d(r - onset) - smoothstep_d(-r - onset))

    return ops.ScalingContour(g, dg, d2g, 0.1, profile.theta0, onset,
                              side="both", kind="two_sided")


def _one_sided_contour(profile, onset, side):
    base = _two_sided_contour(profile, onset)
    if side == "funnel":
        keep = lambda r: np.asarray(r, float) > 0
    else:
        keep = lambda r: np.asarray(r, float) < 0

    def clip(f):
        return lambda r: np.where(keep(r), f(r), 0.0)

    return ops.ScalingContour(clip(base.gamma), clip(base.dgamma),
                              clip(base.d2gamma), 0.1, profile.theta0,
                              onset, side=side, kind="one_sided")


def _absorber(W_fn, side, R_g):
    return ops.AbsorbingProfile(side=side, W=W_fn, dW=lambda r: None,
                                R_g=R_g)


@dataclass
class GluedModels:
    """The global operator and the three models, all on one grid."""
    P: ops.DiscreteOperator
    P_C: ops.DiscreteOperator
    P_K: ops.DiscreteOperator
    P_F: ops.DiscreteOperator
    cutoffs: CutoffTriple
    h: float
    alpha: float


def build_models(alpha, h, profile, delta=None):
    """Assemble P and the three models; scaling onsets at +-(R_g+4).

    All four share the full (cusp-convention) potential so that each model
    agrees with P on the region where its widened cutoff lives.
    """
    R_g = profile.R_g
    onset = R_g + 4.0
    rmin, rmax = -R_g - 8.0, R_g + 8.0

    def W_C(r):
        return smoothstep((np.asarray(r, float) + R_g) / R_g)

    def W_F(r):
        return smoothstep(-(np.asarray(r, float) - R_g) / R_g)

    def W_K(r):
        return smoothstep(np.abs(np.asarray(r, float)) - onset)

    P = ops.assemble(alpha, h, _two_sided_contour(profile, onset), None,
                     profile, rmin, rmax, delta=delta, side="cusp")
    P_C = ops.assemble(alpha, h, _one_sided_contour(profile, onset, "cusp"),
                       _absorber(W_C, "cusp", R_g), profile, rmin, rmax,
                       delta=delta, side="cusp")
    P_F = ops.assemble(alpha, h, _one_sided_contour(profile, onset, "funnel"),
                       _absorber(W_F, "funnel", R_g), profile, rmin, rmax,
                       delta=delta, side="cusp")
    P_K = ops.assemble(alpha, h, _two_sided_contour(profile, onset),
                       _absorber(W_K, "both", R_g), profile, rmin, rmax,
                       delta=delta, side="cusp")
    cut = build_cutoffs(R_g, P.grid)
    return GluedModels(P=P, P_C=P_C, P_K=P_K, P_F=P_F, cutoffs=cut,
                       h=h, alpha=alpha)


# ---------------------------------------------------------------------------
# commutator closures and remainders


@dataclass
class _ATerm:
    """A_j v = [chi~_j, P] R_j chi_j v as forward/adjoint closures."""
    chi: np.ndarray
    lu: object
    comm: object       # sparse [chi~, P]
    comm_H: object

    def mv(self, v):
        return self.comm @ self.lu.solve(self.chi * v)

    def rmv(self, v):
        return self.chi * self.lu.solve(self.comm_H @ v, trans="H")


def _commutator(op, wide):
    """Sparse [chi~, P] = chi~ P - P chi~ (diagonal parts cancel exactly)."""
    import scipy.sparse as sp
    D = sp.diags(wide)
    M = op.matrix()
    C = (D @ M - M @ D).tocsr()
    C.eliminate_zeros()
    return C


@dataclass
class ParametrixReport:
    h: float
    lam: complex
    first_order_remainder: float
    corrected_remainder: float
    a_products: Dict[str, float] = field(default_factory=dict)


def _aterms(models, lam):
    cut = models.cutoffs
    out = {}
    for name, P_j, chi, wide in (
            ("C", models.P_C, cut.chi_C, cut.chi_C_wide),
            ("K", models.P_K, cut.chi_K, cut.chi_K_wide),
            ("F", models.P_F, cut.chi_F, cut.chi_F_wide)):
        lu = spla.splu(P_j.matrix(lam))
        comm = _commutator(models.P, wide)
        out[name] = _ATerm(chi=chi, lu=lu, comm=comm,
                           comm_H=comm.conj().T.tocsr())
    return out


def _norm_of_sum_product(terms, chains, n, tol=1e-8):
    """|| sum over chains of products || by power iteration on closures.

    Each chain is a string like "CK" meaning A_C A_K applied left to right.
    """

    def mv(v):
        acc = np.zeros_like(v)
        for chain in chains:
            w = v
            for c in reversed(chain):
                w = terms[c].mv(w)
            acc = acc + w
        return acc

    def rmv(v):
        acc = np.zeros_like(v)
        for chain in chains:
            w = v
            for c in chain:
                w = terms[c].rmv(w)
            acc = acc + w
        return acc

    return power_iteration_norm(mv, rmv, n, tol=tol)


def apply_parametrix(models, lam, tol=1e-8):
    """Remainder norms of the glued parametrix at spectral parameter lam.

    Reports ||A|| (first order), ||A^4|| (Neumann-corrected through third
    order), and the disjoint-support products that must vanish.
    """
    terms = _aterms(models, lam)
    n = models.P.n
    first = _norm_of_sum_product(terms, ["C", "K", "F"], n, tol=tol)
    chains4 = [a + b + c + d
               for a in "CKF" for b in "CKF" for c in "CKF" for d in "CKF"]
    corrected = _norm_of_sum_product(terms, chains4, n, tol=tol)
    products = {}
    for pair in ("CC", "FF", "CF", "FC", "KK"):
        products[pair] = _norm_of_sum_product(terms, [pair], n, tol=1e-6)
    return ParametrixReport(h=models.h, lam=complex(lam),
                            first_order_remainder=first,
                            corrected_remainder=corrected,
                            a_products=products)


def remainder_decay(hs, profile, alpha=0.3, E_prime=0.3, Gamma=0.2):
    """Corrected-remainder table over h with lambda = E' - i*Gamma*h."""
    if len(hs) < 3 or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("need >= 3 decreasing h values")
    rows = []
    for h in hs:
        lam = complex(E_prime, -Gamma * h)
        models = build_models(alpha, h, profile)
        rep = apply_parametrix(models, lam)
        rows.append(rep)
    ratios = [rows[i].corrected_remainder
              / max(rows[i + 1].corrected_remainder, 1e-300)
              for i in range(len(rows) - 1)]
    return rows, ratios
