import numpy as np
import pytest

from cusplab import geometry, gluing


PROF = geometry.constant_profile(theta0=0.75)


def test_partition_of_unity_exact():
    grid = np.linspace(-9.0, 9.0, 2001)
    cut = gluing.build_cutoffs(1.0, grid)
    assert np.allclose(cut.chi_C + cut.chi_K + cut.chi_F, 1.0, atol=1e-15)
    assert np.allclose(cut.chi_C_wide + 0.0, cut.chi_F_wide[::-1], atol=1e-12)


def test_wide_cutoffs_cover_narrow_supports():
    grid = np.linspace(-9.0, 9.0, 2001)
    cut = gluing.build_cutoffs(1.0, grid)
    for chi, wide in ((cut.chi_C, cut.chi_C_wide),
                      (cut.chi_K, cut.chi_K_wide),
                      (cut.chi_F, cut.chi_F_wide)):
        on_support = chi > 0
        assert np.allclose(wide[on_support], 1.0, atol=1e-12)


def test_grid_span_guard():
    with pytest.raises(gluing.GridError):
        gluing.build_cutoffs(1.0, np.linspace(-3.0, 3.0, 101))


def test_disjoint_products_vanish():
    models = gluing.build_models(0.3, 0.1, PROF)
    rep = gluing.apply_parametrix(models, complex(0.3, -0.02))
    for pair in ("CC", "FF", "CF", "FC", "KK"):
        assert rep.a_products[pair] < 1e-10


def test_corrected_remainder_beats_first_order():
    models = gluing.build_models(0.3, 0.1, PROF)
    rep = gluing.apply_parametrix(models, complex(0.3, -0.002))
    assert rep.corrected_remainder < rep.first_order_remainder


def test_remainder_decay_input_validation():
    with pytest.raises(ValueError):
        gluing.remainder_decay([0.1, 0.2, 0.05], PROF)
    with pytest.raises(ValueError):
        gluing.remainder_decay([0.1, 0.05], PROF)
