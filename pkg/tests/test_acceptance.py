"""End-to-end acceptance checks, one test per criterion.

Each test prints a single summary line on success; tolerances are part of
the assertions.  The full file runs in well under fifteen minutes.
"""

import numpy as np
from scipy.optimize import brentq

from cusplab import (cylinder, geodesics, geometry, gluing, operators,
                     resonances, smoothing, specfun)


def test_criterion_01_curvature_oracle():
    rs = np.linspace(-2.0, 2.0, 401)
    profiles = [
        geometry.constant_profile(),
        geometry.funnel_profile(),
        geometry.b_gaussian_profile(amp=-0.1, width=1.0),
        geometry.b_gaussian_profile(amp=-0.05, width=2.0),
        geometry.tabulated_profile(rs, 0.05 * np.sin(rs)),
    ]
    worst = 0.0
    for prof in profiles:
        lo, hi = (-1.5, 1.5) if prof.kind == "tabulated" else (-2.5, 2.5)
        for r in np.linspace(lo, hi, 50):
            rep = geometry.curvature_report(prof, float(r))
            worst = max(worst, rep["abs_error"] / abs(rep["K_radial"]))
    assert worst < 1e-6
    print("CRITERION 1: PASS - curvature oracle worst rel err %.3g" % worst)


def test_criterion_02_nontrapping_dynamics():
    prof = geometry.constant_profile()
    ics = geodesics.random_initial_conditions(prof, 100, seed=7)
    reps = geodesics.escape_report(ics, prof, T=30.0, dt=5e-3)
    assert all(r.escaped for r in reps)
    assert all(r.cusp_intervals <= 1 for r in reps)
    ic = next(ic for ic in ics if ic.sigma_ang > 1e-3)
    traj = geodesics.integrate(ic, prof, T=2.0, dt=1e-4)
    resid = geodesics.tanh_residual(traj, prof)
    assert resid < 1e-6
    bul = geometry.bulge_profile()
    reps_b = geodesics.escape_report(
        geodesics.random_initial_conditions(bul, 12, seed=3),
        bul, T=30.0, dt=5e-3)
    trapped = sum(r.trapped_flag for r in reps_b)
    assert trapped >= 1
    print("CRITERION 2: PASS - 100/100 escape (<=1 cusp interval), "
          "tanh residual %.3g, bulge traps %d" % (resid, trapped))


def test_criterion_03_bessel_identities():
    rng = np.random.default_rng(1)
    worst_w = 0.0
    for _ in range(200):
        nu = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        lam = rng.uniform(0.5, 4.0)
        r = rng.uniform(-1.0, 2.0)
        worst_w = max(worst_w,
                      abs(specfun.wronskian_radial(nu, lam, r) - 1.0))
    assert worst_w < 1e-10
    worst_rec = 0.0
    for _ in range(40):
        nu = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        z = rng.uniform(0.5, 6.0)
        i0 = specfun.bessel_i(nu, z).value
        gap = abs(specfun.bessel_i(nu - 1, z).value
                  - specfun.bessel_i(nu + 1, z).value - (2 * nu / z) * i0)
        worst_rec = max(worst_rec, gap / max(1.0, abs(i0)))
    assert worst_rec < 1e-10
    worst_h = 0.0
    for z in (0.3, 1.0, 2.7, 6.0):
        worst_h = max(worst_h, abs(
            specfun.bessel_k(0.5, z).value
            - np.sqrt(np.pi / (2 * z)) * np.exp(-z)))
        worst_h = max(worst_h, abs(
            specfun.bessel_i(0.5, z).value
            - np.sqrt(2 / (np.pi * z)) * np.sinh(z)))
    assert worst_h < 1e-10
    print("CRITERION 3: PASS - Wronskian %.3g, recurrence %.3g, "
          "half-integer %.3g" % (worst_w, worst_rec, worst_h))


def test_criterion_04_lower_bound_slopes():
    targets = {0.0: -1.0, -0.25: -0.5, -0.5: 0.0, -1.0: 1.0}
    fitted = {}
    for im, target in targets.items():
        slope = cylinder.lower_bound_slope(im)
        assert abs(slope - target) < 0.15, (im, slope)
        fitted[im] = slope
    print("CRITERION 4: PASS - slopes " + ", ".join(
        "Im=%g: %.3f (target %g)" % (im, fitted[im], t)
        for im, t in targets.items()))


def test_criterion_05_pole_structure():
    rank, _, val = cylinder.pole_residue()
    assert rank == 1
    assert abs(val - 0.5j) < 1e-6
    w = cylinder.wronskian_winding((-5.0, 5.0, -2.0, -0.1), lambda_m=1.0)
    assert w == 0
    print("CRITERION 5: PASS - residue rank 1, value err %.3g, "
          "winding %d" % (abs(val - 0.5j), w))


def test_criterion_06_resonance_counting():
    V1, s1 = resonances.mollified_well(-1.0, 0.0, 1.0)
    radii = [10.0, 20.0, 30.0, 40.0]
    counts1, slope1 = resonances.count_in_disks(V1, s1, radii)
    target = 2.0 / np.pi
    assert abs(slope1 - target) < 0.15 * target
    V2, s2 = resonances.mollified_well(-1.0, 0.0, 2.0)
    counts2, slope2 = resonances.count_in_disks(V2, s2, radii)
    assert abs(slope2 / slope1 - 2.0) < 0.15 * 2.0
    # agreement with the independent complex-scaling matrix oracle
    V3, s3 = resonances.mollified_well(-10.0, -1.0, 1.0)
    params = resonances.ShootingParams(V=V3, support=s3)
    box = (0.1, 4.0, -1.5, -0.01)
    found = resonances.find_in_box(params, box, seed_grid=(5, 5))
    oracle = resonances.complex_scaling_oracle(V3, s3, box, npts=12000,
                                               seeds_per_axis=6)
    assert found.zeros and oracle
    agree = max(min(abs(z - w) for w in oracle) for z in found.zeros)
    assert agree < 1e-6
    print("CRITERION 6: PASS - slope %.4f (target %.4f), doubling ratio "
          "%.3f, oracle agreement %.2g" % (slope1, target,
                                           slope2 / slope1, agree))


def test_criterion_07_bound_states():
    for depth in (-0.3, -1.0, -4.0):
        V, supp = resonances.mollified_well(depth, 0.0, 1.0)
        assert len(resonances.bound_states(V, supp)) >= 1
    V0, a = 4.0, 2.0

    def V(r):
        r = np.asarray(r, float)
        return np.where(np.abs(r) < a / 2, -V0, 0.0)

    computed = resonances.bound_states(V, (-a / 2, a / 2))
    kmax = np.sqrt(V0)
    ks = np.linspace(1e-6, kmax - 1e-9, 20001)

    def scan(f):
        out = []
        vals = np.array([f(k) for k in ks])
        for i in range(len(ks) - 1):
            if (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])
                    and vals[i] * vals[i + 1] < 0
                    and abs(vals[i]) < 50 and abs(vals[i + 1]) < 50):
                out.append(brentq(f, ks[i], ks[i + 1], xtol=1e-15))
        return out

    oracle = sorted(-(V0 - k * k) for k in
                    scan(lambda k: k * np.tan(k * a / 2)
                         - np.sqrt(V0 - k * k))
                    + scan(lambda k: -k / np.tan(k * a / 2)
                           - np.sqrt(V0 - k * k)))
    assert len(computed) == len(oracle)
    worst = max(abs(x - y) for x, y in zip(computed, oracle))
    assert worst < 1e-8
    print("CRITERION 7: PASS - %d square-well levels match transcendental "
          "oracle to %.2g" % (len(oracle), worst))


def test_criterion_08_strip_sweeps():
    prof = geometry.constant_profile(theta0=0.75)
    hs = [0.1, 0.05, 0.025]
    a0 = operators.alpha0_funnel(prof, prof.R_g + 1.0)
    alphas = [0.0, 0.3, 1.0, a0 + 1.0]
    sweeps = operators.strip_sweep(alphas, hs, 0.3, 1.0, 3, profile=prof)
    by_alpha = {}
    for sw in sweeps:
        by_alpha.setdefault(sw.alpha, {})[sw.h] = sw
    # real axis: h * norm must not grow by a factor 2 as h decreases
    for alpha, runs in by_alpha.items():
        base = max(runs[0.1].h_times_norms)
        for h in hs[1:]:
            assert max(runs[h].h_times_norms) < 2.0 * base, (alpha, h)
    # strip-depth exponent stable within +-30 percent at Gamma = 0.5 and 1
    def refit(sw, upto):
        s = np.array([abs(l.imag) for l in sw.lambda_grid[:upto]])
        y = np.log(sw.norms[:upto])
        return float(np.polyfit(s / sw.h, y, 1)[0])

    for alpha in (0.0, 0.3, 1.0):
        for label, upto in (("Gamma=0.5", 4), ("Gamma=1", 7)):
            vals = [refit(by_alpha[alpha][h], upto) for h in hs]
            mean = np.mean(vals)
            assert all(abs(v - mean) <= 0.3 * abs(mean) for v in vals), \
                (alpha, label, vals)
    # elliptic regime: O(1) norms, flat exponent at the finest resolution
    ell = by_alpha[a0 + 1.0]
    assert max(max(ell[h].real_norms) for h in hs) < 10.0
    c0 = ell[0.025].fitted_C0
    assert abs(c0) < 0.1
    print("CRITERION 8: PASS - h*norm non-growing for %d alphas, exponent "
          "stable +-30%% at both depths, elliptic C0 %.3f" % (len(alphas),
                                                              c0))


def test_criterion_09_gluing():
    prof = geometry.constant_profile(theta0=0.75)
    reports, ratios = gluing.remainder_decay([0.1, 0.05, 0.025], prof)
    for rep in reports:
        assert max(rep.a_products.values()) < 1e-10
        assert rep.corrected_remainder < rep.first_order_remainder
    log2r = [np.log2(r) for r in ratios]
    assert all(v >= 3.0 for v in log2r), log2r
    print("CRITERION 9: PASS - products < 1e-10, corrected < first-order, "
          "log2 decay ratios " + ", ".join("%.2f" % v for v in log2r))


def test_criterion_10_local_smoothing():
    prof = geometry.constant_profile()
    xis = [4.0, 8.0, 16.0, 32.0, 64.0]
    cut = smoothing.smoothing_ratio(xis, alpha=0.5, profile=prof,
                                    cutoff=True)
    spread = max(cut) / min(cut)
    assert spread <= 3.0
    uncut = smoothing.smoothing_ratio(xis, alpha=0.5, profile=prof,
                                      cutoff=False)
    slope = float(np.polyfit(np.log(xis), np.log(uncut), 1)[0])
    assert abs(slope - 1.0) <= 0.2
    print("CRITERION 10: PASS - cutoff ratio spread %.3f (<= 3), uncut "
          "log-slope %.3f (1 +- 0.2)" % (spread, slope))
