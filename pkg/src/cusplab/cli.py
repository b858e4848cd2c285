"""Command-line front end: config parsing, subcommands, CSV/SVG emission.

Every subcommand validates its configuration before any computation runs,
writes one CSV artifact (fixed columns per subcommand, "%.12g" floats so
reruns are byte-identical), and optionally an SVG line plot.  Exit codes:
0 success, 2 validation failure, 3 numerical failure (with a diagnostic
row appended to the CSV), 64 unknown subcommand.
"""

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry, geodesics, specfun, cylinder, operators, resonances
from . import gluing, smoothing
from .util import IterationError

SUBCOMMANDS = ("curvature", "geodesics", "bessel-check", "cylinder-sweep",
               "mode-sweep", "resonances", "count", "glue-check",
               "smoothing", "repro-all")

NUMERICAL_ERRORS = (IterationError, resonances.InstabilityError,
                    resonances.BoxBoundaryError, smoothing.DomainSizeError,
                    operators.NearEigenvalueError, np.linalg.LinAlgError)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    profile: str = "constant"
    n: int = 1
    R_g: float = 1.0
    theta0: float = 0.75
    E: float = 0.3
    Gamma: float = 0.5
    h_list: list = field(default_factory=lambda: [0.1, 0.05])
    alpha_list: list = field(default_factory=lambda: [0.0, 0.3])
    points: int = 5
    seed: int = 0
    workers: int = 1
    out: str = "out.csv"
    svg: str = ""

    def validate(self):
        if not (0.0 < self.E < 1.0):
            raise ConfigError("E must lie in (0, 1), got %g" % self.E)
        if self.Gamma <= 0:
            raise ConfigError("Gamma must be positive")
        if any(h <= 0 for h in self.h_list):
            raise ConfigError("h values must be positive")
        if self.points < 2:
            raise ConfigError("points must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.make_profile()

    def make_profile(self):
        makers = {
            "constant": lambda: geometry.constant_profile(
                n=self.n, R_g=self.R_g, theta0=self.theta0),
            "funnel": lambda: geometry.funnel_profile(
                n=self.n, R_g=self.R_g, theta0=self.theta0),
            "gauss-bump": lambda: geometry.b_gaussian_profile(
                n=self.n, R_g=self.R_g, theta0=self.theta0),
            "bulge": lambda: geometry.bulge_profile(n=self.n, R_g=self.R_g),
        }
        if self.profile not in makers:
            raise ConfigError("unknown profile %r (choose from %s)"
                              % (self.profile, ", ".join(sorted(makers))))
        return makers[self.profile]()


def load_config_file(path):
    """Flat key=value lines; blank lines and # comments ignored."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError("%s:%d: expected key=value" % (path, lineno))
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _float_list(text):
    return [float(tok) for tok in str(text).replace(",", " ").split()]


def apply_config(cfg: RunConfig, values):
    casts = {"n": int, "points": int, "seed": int, "workers": int,
             "R_g": float, "theta0": float, "E": float, "Gamma": float,
             "h_list": _float_list, "alpha_list": _float_list}
    for key, val in values.items():
        if not hasattr(cfg, key):
            raise ConfigError("unknown config key %r" % key)
        try:
            setattr(cfg, key, casts.get(key, str)(val))
        except ValueError as exc:
            raise ConfigError("bad value for %s: %s" % (key, exc))
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def fmt(x):
    if isinstance(x, complex):
        return "%.12g%+.12gj" % (x.real, x.imag)
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def write_svg(path, xs, series, labels, width=640, height=420):
    """Minimal hand-rolled line plot; one polyline per series."""
    xs = np.asarray(xs, float)
    pad = 48
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    all_y = np.concatenate([np.asarray(s, float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(all_y.min()), float(all_y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
             % (width, height),
             '<rect width="100%" height="100%" fill="white"/>']
    for i, (ys, label) in enumerate(zip(series, labels)):
        pts = " ".join("%.2f,%.2f" % (sx(x), sy(y)) for x, y in zip(xs, ys))
        color = colors[i % len(colors)]
        parts.append('<polyline points="%s" fill="none" stroke="%s" '
                     'stroke-width="1.5"/>' % (pts, color))
        parts.append('<text x="%d" y="%d" fill="%s" font-size="12">%s</text>'
                     % (width - pad - 120, pad + 16 * i + 12, color, label))
    parts.append('<text x="%d" y="%d" font-size="11">%.6g .. %.6g</text>'
                 % (pad, height - 12, x0, x1))
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def parallel_map(fn, items, workers):
    """Ordered map with a bounded thread pool (order = input index)."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_curvature(cfg, args):
    prof = cfg.make_profile()
    rs = np.linspace(args.rmin, args.rmax, cfg.points)
    rows = []
    for r in rs:
        rep = geometry.curvature_report(prof, float(r))
        rows.append([float(r), rep["K_radial"], rep["oracle_K"],
                     rep["abs_error"]])
    write_csv(cfg.out, ["r", "K_analytic", "K_oracle", "abs_err"], rows)
    if cfg.svg:
        write_svg(cfg.svg, rs, [[row[1] for row in rows]], ["K(r)"])
    return 0


def cmd_geodesics(cfg, args):
    prof = cfg.make_profile()
    ics = geodesics.random_initial_conditions(prof, args.count, seed=cfg.seed)
    rows = []
    for i, ic in enumerate(ics):
        rep = geodesics.escape_report([ic], prof, T=args.T, dt=args.dt)[0]
        rows.append([i, ic.r, ic.rho, ic.sigma_ang, int(rep.escaped),
                     rep.max_abs_r, rep.cusp_intervals, int(rep.trapped_flag)])
    write_csv(cfg.out, ["index", "r0", "rho0", "sigma_ang", "escaped",
                        "max_abs_r", "cusp_intervals", "trapped"], rows)
    if args.trajectory is not None:
        ic = ics[args.trajectory]
        traj = geodesics.integrate(ic, prof, args.T, args.dt)
        p = (traj.rho ** 2
             + np.exp(-2.0 * (traj.r + prof.beta(traj.r))) * traj.sigma_ang
             - 1.0)
        write_csv(os.path.splitext(cfg.out)[0] + "_traj.csv",
                  ["t", "r", "rho", "sigma_ang", "p"],
                  [[t, r, rho, traj.sigma_ang, pv]
                   for t, r, rho, pv in zip(traj.times, traj.r, traj.rho, p)])
    return 0


def cmd_bessel_check(cfg, args):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for _ in range(args.samples):
        nu = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        lam = rng.uniform(0.5, 4.0)
        r = rng.uniform(-1.0, 2.0)
        resid = abs(specfun.wronskian_radial(nu, lam, r) - 1.0)
        rows.append([nu.real, nu.imag, lam, r, resid])
    write_csv(cfg.out, ["nu_re", "nu_im", "lambda", "r",
                        "wronskian_residual"], rows)
    worst = max(row[-1] for row in rows)
    if worst > 1e-10:
        write_csv(cfg.out, ["nu_re", "nu_im", "lambda", "r",
                            "wronskian_residual"],
                  rows + [["DIAGNOSTIC", "worst_residual", worst, "", ""]])
        return 3
    return 0


def cmd_cylinder_sweep(cfg, args):
    res = np.linspace(args.re_min, args.re_max, cfg.points)
    window = cylinder.CutoffWindow(a=1.0, npoints=200)

    def one(re):
        sigma = complex(re, args.im_sigma)
        mode = cylinder.ModeKernel(m=args.mode, lambda_m=float(max(args.mode,
                                                                   1)),
                                   sigma=sigma)
        n = cylinder.cutoff_norm(mode, window)
        return [re, args.im_sigma, n, float(np.log(n))]

    rows = parallel_map(one, list(res), cfg.workers)
    write_csv(cfg.out, ["re_sigma", "im_sigma", "norm", "log_norm"], rows)
    if cfg.svg:
        write_svg(cfg.svg, res, [[r[3] for r in rows]], ["log norm"])
    return 0


def cmd_mode_sweep(cfg, args):
    pairs = [(a, h) for a in cfg.alpha_list for h in cfg.h_list]

    def one(pair):
        a, h = pair
        return operators.strip_sweep([a], [h], cfg.E, cfg.Gamma, cfg.points,
                                     profile=cfg.make_profile())[0]

    sweeps = parallel_map(one, pairs, cfg.workers)
    rows = []
    for sw in sweeps:
        for lam, n in zip(sw.real_lambdas, sw.real_norms):
            rows.append([sw.alpha, sw.h, float(lam), 0.0, n, sw.h * n])
        for lam, n in zip(sw.lambda_grid, sw.norms):
            rows.append([sw.alpha, sw.h, lam.real, lam.imag, n, sw.h * n])
    write_csv(cfg.out, ["alpha", "h", "re_lambda", "im_lambda", "norm",
                        "h_times_norm"], rows)
    return 0


def _named_potential(args):
    if args.potential == "mollified-well":
        return resonances.mollified_well(args.depth, 0.0, args.length)
    if args.potential == "square-well":
        def V(r):
            r = np.asarray(r, float)
            return np.where((r >= 0.0) & (r <= args.length), args.depth, 0.0)
        return V, (0.0, args.length)
    raise ConfigError("unknown potential %r" % args.potential)


def cmd_resonances(cfg, args):
    V, support = _named_potential(args)
    params = resonances.ShootingParams(V=V, support=support)
    box = tuple(float(x) for x in args.box.split(","))
    if len(box) != 4:
        raise ConfigError("--box needs re_min,re_max,im_min,im_max")
    found = resonances.find_in_box(params, box,
                                   seed_grid=(args.seeds, args.seeds))
    rows = [[z.real, z.imag, mult] for z, mult in
            zip(found.zeros, found.multiplicities)]
    write_csv(cfg.out, ["re_sigma", "im_sigma", "multiplicity"], rows)
    return 0


def cmd_count(cfg, args):
    V, support = _named_potential(args)
    radii = _float_list(args.radii)
    counts, slope = resonances.count_in_disks(V, support, radii)
    rows = [[r, c] for r, c in zip(radii, counts)]
    rows.append(["slope", slope])
    write_csv(cfg.out, ["radius", "count"], rows)
    if cfg.svg:
        write_svg(cfg.svg, radii, [counts], ["count"])
    return 0


def cmd_glue_check(cfg, args):
    prof = cfg.make_profile()
    hs = sorted(cfg.h_list, reverse=True)
    if len(hs) < 3:
        hs = hs + [hs[-1] / 2.0 ** k for k in range(1, 4 - len(hs))]
    reports, ratios = gluing.remainder_decay(hs, prof, E_prime=cfg.E,
                                             Gamma=cfg.Gamma)
    rows = []
    for i, rep in enumerate(reports):
        ratio = ratios[i - 1] if i > 0 else float("nan")
        rows.append([rep.h, rep.lam.real, rep.lam.imag,
                     rep.first_order_remainder, rep.corrected_remainder,
                     ratio])
    write_csv(cfg.out, ["h", "re_lambda", "im_lambda", "first_order",
                        "corrected", "ratio"], rows)
    return 0


def cmd_smoothing(cfg, args):
    xis = _float_list(args.xi_list)
    prof = cfg.make_profile()
    with_cut = smoothing.smoothing_ratio(xis, T=args.T, alpha=args.alpha,
                                         profile=prof, cutoff=True)
    no_cut = smoothing.smoothing_ratio(xis, T=args.T, alpha=args.alpha,
                                       profile=prof, cutoff=False)
    rows = [[xi, rc, rn] for xi, rc, rn in zip(xis, with_cut, no_cut)]
    write_csv(cfg.out, ["xi", "ratio", "ratio_no_cutoff"], rows)
    if cfg.svg:
        write_svg(cfg.svg, np.log(xis),
                  [np.log(with_cut), np.log(no_cut)],
                  ["log ratio (cut)", "log ratio (uncut)"])
    return 0


def cmd_repro_all(cfg, args):
    """Run every acceptance check and write a pass/fail summary CSV."""
    checks = []

    def add(num, desc, value, passed):
        checks.append([num, desc, value, "PASS" if passed else "FAIL"])

    prof = geometry.constant_profile()
    # 1: curvature oracle on several profiles
    worst = 0.0
    for p in (prof, geometry.funnel_profile(),
              geometry.b_gaussian_profile()):
        for r in np.linspace(-3, 3, 10):
            rep = geometry.curvature_report(p, float(r))
            worst = max(worst, rep["abs_error"] / max(abs(rep["K_radial"]),
                                                      1e-12))
    add(1, "curvature oracle rel err", worst, worst < 1e-6)
    # 2: nontrapping escape
    ics = geodesics.random_initial_conditions(prof, 20, seed=cfg.seed)
    reps = geodesics.escape_report(ics, prof, T=60.0, dt=1e-3)
    ok = all(r.escaped and r.cusp_intervals <= 1 for r in reps)
    add(2, "all random ICs escape", float(sum(r.escaped for r in reps)), ok)
    # 3: Bessel Wronskian
    rng = np.random.default_rng(cfg.seed)
    worst = max(abs(specfun.wronskian_radial(
        complex(rng.uniform(-8, 8), rng.uniform(-8, 8)),
        rng.uniform(0.5, 4.0), rng.uniform(-1, 2)) - 1.0)
        for _ in range(40))
    add(3, "Bessel Wronskian residual", worst, worst < 1e-10)
    # 4: lower-bound slope at one depth
    sl = cylinder.lower_bound_slope(-0.25)
    add(4, "cutoff-norm slope (target -0.5)", sl, abs(sl + 0.5) < 0.15)
    # 5: pole structure
    rank, _, val = cylinder.pole_residue()
    add(5, "mode-0 residue rank/value", abs(val - 0.5j),
        rank == 1 and abs(val - 0.5j) < 1e-6)
    # 6: counting slope
    V, support = resonances.mollified_well(-1.0, 0.0, 1.0)
    counts, slope = resonances.count_in_disks(V, support,
                                              [10.0, 20.0, 30.0, 40.0])
    add(6, "counting slope (target 2/pi)", slope,
        abs(slope - 2.0 / np.pi) < 0.15 * 2.0 / np.pi)
    # 7: square-well bound state
    energies = resonances.bound_states(*resonances.mollified_well(
        -4.0, 0.0, 1.0))
    add(7, "bound states found", float(len(energies)), len(energies) >= 1)
    # 8: real-axis h*norm drift
    sweeps = operators.strip_sweep([0.3], [0.1, 0.05], cfg.E, cfg.Gamma, 3)
    hn = [max(s.h_times_norms) for s in sweeps]
    drift = max(hn) / min(hn)
    add(8, "h*norm drift factor", drift, drift < 2.0)
    # 9: gluing remainder
    models = gluing.build_models(0.3, 0.1, prof)
    rep = gluing.apply_parametrix(models, complex(0.3, -0.002))
    ok = (rep.corrected_remainder < rep.first_order_remainder
          and max(rep.a_products.values()) < 1e-10)
    add(9, "corrected < first-order remainder", rep.corrected_remainder, ok)
    # 10: smoothing boundedness
    ratios = smoothing.smoothing_ratio([4.0, 16.0], alpha=0.5, profile=prof)
    add(10, "cutoff ratio max/min", max(ratios) / min(ratios),
        max(ratios) / min(ratios) <= 3.0)
    write_csv(cfg.out, ["criterion", "description", "value", "status"],
              checks)
    return 0 if all(c[3] == "PASS" for c in checks) else 3


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False,
                                     argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--out", help="output CSV path")
    common.add_argument("--svg", help="optional SVG plot path")
    common.add_argument("--profile", help="profile name")
    common.add_argument("--E", type=float)
    common.add_argument("--Gamma", type=float)
    common.add_argument("--h-list", dest="h_list")
    common.add_argument("--alpha-list", dest="alpha_list")
    common.add_argument("--points", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    parser = argparse.ArgumentParser(
        prog="cusplab", parents=[common],
        description="Resolvent and resonance toolkit for cusp-funnel "
        "warped products")
    sub = parser.add_subparsers(dest="subcommand")

    def add_parser(name):
        return sub.add_parser(name, parents=[common])

    p = add_parser("curvature")
    p.add_argument("--rmin", type=float, default=-3.0)
    p.add_argument("--rmax", type=float, default=3.0)

    p = add_parser("geodesics")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--T", type=float, default=60.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--trajectory", type=int, default=None)

    p = add_parser("bessel-check")
    p.add_argument("--samples", type=int, default=50)

    p = add_parser("cylinder-sweep")
    p.add_argument("--im-sigma", dest="im_sigma", type=float, default=-0.25)
    p.add_argument("--re-min", dest="re_min", type=float, default=10.0)
    p.add_argument("--re-max", dest="re_max", type=float, default=60.0)
    p.add_argument("--mode", type=int, default=1)

    add_parser("mode-sweep")

    p = add_parser("resonances")
    p.add_argument("--potential", default="mollified-well")
    p.add_argument("--depth", type=float, default=-10.0)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--box", default="0.1,4,-1.5,-0.01")
    p.add_argument("--seeds", type=int, default=6)

    p = add_parser("count")
    p.add_argument("--potential", default="mollified-well")
    p.add_argument("--depth", type=float, default=-1.0)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--radii", default="10,20,30,40")

    add_parser("glue-check")

    p = add_parser("smoothing")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--xi-list", dest="xi_list", default="4,8,16,32,64")
    p.add_argument("--T", type=float, default=0.25)

    add_parser("repro-all")
    return parser


HANDLERS = {
    "curvature": cmd_curvature,
    "geodesics": cmd_geodesics,
    "bessel-check": cmd_bessel_check,
    "cylinder-sweep": cmd_cylinder_sweep,
    "mode-sweep": cmd_mode_sweep,
    "resonances": cmd_resonances,
    "count": cmd_count,
    "glue-check": cmd_glue_check,
    "smoothing": cmd_smoothing,
    "repro-all": cmd_repro_all,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    positional = [a for a in argv if not a.startswith("-")]
    if positional and positional[0] not in SUBCOMMANDS:
        sys.stderr.write("unknown subcommand %r\nusage: cusplab {%s}\n"
                         % (positional[0], ",".join(SUBCOMMANDS)))
        return 64
    if not positional:
        sys.stderr.write("usage: cusplab {%s}\n" % ",".join(SUBCOMMANDS))
        return 64
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    cfg = RunConfig()
    try:
        if getattr(args, "config", None):
            apply_config(cfg, load_config_file(args.config))
        overrides = {k: getattr(args, k) for k in
                     ("profile", "E", "Gamma", "points", "seed", "workers",
                      "out", "svg")
                     if getattr(args, k, None) is not None}
        for k, v in overrides.items():
            setattr(cfg, k, v)
        if getattr(args, "h_list", None):
            cfg.h_list = _float_list(args.h_list)
        if getattr(args, "alpha_list", None):
            cfg.alpha_list = _float_list(args.alpha_list)
        if "CUSPLAB_WORKERS" in os.environ:
            cfg.workers = int(os.environ["CUSPLAB_WORKERS"])
        cfg.validate()
    except (ConfigError, geometry.ProfileError, OSError, ValueError) as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return 2
    try:
        return HANDLERS[args.subcommand](cfg, args)
    except (ConfigError, geometry.ProfileError, operators.ParameterError,
            operators.ResolutionError) as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return 2
    except NUMERICAL_ERRORS as exc:
        write_csv(cfg.out, ["diagnostic"], [["%s: %s"
                                             % (type(exc).__name__, exc)]])
        sys.stderr.write("numerical failure: %s\n" % exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
