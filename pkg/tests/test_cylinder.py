import numpy as np
import pytest

from cusplab import cylinder


def test_cutoff_window_properties():
    w = cylinder.CutoffWindow(a=1.0, npoints=200)
    assert w.chi[0] == 0.0 and w.chi[-1] == 0.0
    mid = np.abs(w.grid) <= 0.5
    assert np.allclose(w.chi[mid], 1.0)


def test_mode0_kernel_value_free_line():
    mode = cylinder.ModeKernel(m=0, lambda_m=0.0, sigma=2.0)
    val = cylinder.kernel_value(mode, 0.3, -0.2)
    expected = -np.exp(1j * 2.0 * 0.5) / (4j)
    assert abs(val - expected) < 1e-12


def test_mode0_pole_at_origin():
    mode = cylinder.ModeKernel(m=0, lambda_m=0.0, sigma=0.0)
    with pytest.raises(cylinder.KernelPoleError):
        cylinder.kernel_value(mode, 0.0, 0.1)


def test_kernel_symmetry():
    mode = cylinder.ModeKernel(m=1, lambda_m=1.0, sigma=3.0 - 0.2j)
    a = cylinder.kernel_value(mode, 0.4, -0.3)
    b = cylinder.kernel_value(mode, -0.3, 0.4)
    assert abs(a - b) < 1e-10 * max(1.0, abs(a))


def test_pole_residue_rank_one_value():
    rank, _, val = cylinder.pole_residue()
    assert rank == 1
    assert abs(val - 0.5j) < 1e-6


def test_wronskian_winding_zero():
    w = cylinder.wronskian_winding((-5.0, 5.0, -2.0, -0.1), lambda_m=1.0,
                                   n_per_side=40)
    assert w == 0


def test_lower_bound_slope_quarter_depth():
    slope = cylinder.lower_bound_slope(-0.25)
    assert abs(slope - (-0.5)) < 0.15


def test_slope_rejects_upper_half_plane():
    with pytest.raises(ValueError):
        cylinder.lower_bound_slope(0.3)
