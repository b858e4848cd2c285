import numpy as np
import pytest
import scipy.sparse.linalg as spla

from cusplab import geometry, operators as ops


PROF = geometry.constant_profile(theta0=0.75)


def test_semiclassical_map_branch():
    sigma, alpha, at_branch = ops.semiclassical_map(0.21, 0.1, 2)
    assert abs(sigma - 11.0) < 1e-12
    assert abs(alpha - 0.2) < 1e-12
    assert not at_branch
    assert ops.semiclassical_map(-1.0, 0.1, 0)[2]


def test_rescale_vars_bounds():
    r, h = ops.rescale_vars(1.0, 0.1, 1.0, 2.0)
    L = np.log(4.0)
    assert abs(r - 1.0 / L) < 1e-14 and abs(h - 0.1 / L) < 1e-14
    with pytest.raises(ops.ParameterError):
        ops.rescale_vars(1.0, 0.1, 5.0, 2.0)


def test_potential_vanishes_for_constant_profile():
    assert np.allclose(ops.potential_v(PROF, np.linspace(-3, 3, 7)), 0.0)


def test_small_alpha_contour_shape():
    c = ops.contour_small_alpha(0.05, 2.0, PROF.theta0)
    rs = np.linspace(-1.0, 6.0, 200)
    g = c.gamma(rs)
    assert np.allclose(g[rs <= 2.0], 0.0)
    # asymptotic slope delta * tan(theta0)
    s = (c.gamma(10.0) - c.gamma(9.0)) / 1.0
    assert abs(s - 0.05 * np.tan(PROF.theta0)) < 1e-12
    # cusp contour mirrors the funnel one
    cc = ops.contour_small_alpha(0.05, 2.0, PROF.theta0, side="cusp")
    assert abs(cc.gamma(-5.0) + c.gamma(5.0)) < 1e-14


def test_small_alpha_delta_validated():
    with pytest.raises(ops.ParameterError):
        ops.contour_small_alpha(0.2, 2.0, PROF.theta0)


def test_large_alpha_contour_band():
    R = 2.0
    alpha = ops.alpha0_funnel(PROF, R) * 2.0
    c = ops.contour_large_alpha(alpha, PROF.theta0, R)
    assert c.R_alpha > R + 1.0
    # plateau angle within [pi/18, pi/6] on [R+1, R_alpha - 1]
    rs = np.linspace(R + 1.0, c.R_alpha - 1.0, 50)
    assert np.all(c.gamma(rs) >= np.pi / 18.0 - 1e-9)
    assert np.all(c.gamma(rs) <= np.pi / 6.0 + 1e-9)
    # slope bounded by 1/2 everywhere
    rr = np.linspace(R - 1.0, c.R_alpha + 5.0, 400)
    assert np.max(c.dgamma(rr)) <= 0.5 + 1e-9
    with pytest.raises(ops.ParameterError):
        ops.contour_large_alpha(alpha / 10.0, PROF.theta0, R)


def test_assemble_grid_resolution_guard():
    c = ops.contour_small_alpha(0.1, 2.0, PROF.theta0)
    with pytest.raises(ops.ResolutionError):
        ops.assemble(0.3, 0.1, c, None, PROF, -3.0, 3.0, delta=0.05)


def test_resolvent_norm_matches_dense_svd():
    op = ops.build_funnel_operator(0.3, 0.2, PROF)
    lam = complex(0.15, -0.02)
    n = ops.resolvent_norm(op, lam)
    dense = op.matrix(lam).toarray()
    ref = 1.0 / np.linalg.svd(dense, compute_uv=False)[-1]
    assert abs(n - ref) <= 1e-6 * ref


def test_real_axis_norm_scale_h_inverse():
    norms = {}
    for h in (0.1, 0.05):
        op = ops.build_funnel_operator(0.3, h, PROF)
        norms[h] = ops.resolvent_norm(op, 0.15)
    assert norms[0.05] * 0.05 < 2.0 * norms[0.1] * 0.1


def test_strip_sweep_validates_window():
    with pytest.raises(ops.ParameterError):
        ops.strip_sweep([0.3], [0.1], 1.5, 0.5, 3)
