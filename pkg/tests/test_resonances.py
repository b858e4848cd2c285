import numpy as np
import pytest
from scipy.optimize import brentq

from cusplab import resonances as rz


FREE = rz.ShootingParams(V=lambda r: np.zeros_like(np.asarray(r, float)),
                         support=(-1.0, 1.0))


def test_free_line_wronskian_closed_form():
    for s in (1.0, 2.0 - 0.5j, 0.3j, -1.7 - 0.2j):
        w = rz.wronskian_mismatch(FREE, s)
        assert abs(w - 2j * s) < 1e-10 * max(1.0, abs(s))


def test_reality_symmetry():
    for s in (1.3 - 0.4j, 0.2 - 1.1j, 2.5 - 0.05j):
        w1 = rz.wronskian_mismatch(FREE, -np.conj(s))
        w2 = np.conj(rz.wronskian_mismatch(FREE, s))
        assert abs(w1 - w2) < 1e-12


def test_free_line_has_no_resonances():
    found = rz.find_in_box(FREE, (0.5, 3.0, -1.5, -0.1), seed_grid=(3, 3))
    assert found.zeros == []
    assert found.winding_total == 0


def square_well_oracle(V0, a):
    """Transcendental bound-state energies of the depth -V0, width a well."""
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

    even = scan(lambda k: k * np.tan(k * a / 2) - np.sqrt(V0 - k * k))
    odd = scan(lambda k: -k / np.tan(k * a / 2) - np.sqrt(V0 - k * k))
    return sorted(-(V0 - k * k) for k in even + odd)


def test_square_well_bound_states_match_oracle():
    V0, a = 4.0, 2.0

    def V(r):
        r = np.asarray(r, float)
        return np.where(np.abs(r) < a / 2, -V0, 0.0)

    computed = rz.bound_states(V, (-a / 2, a / 2))
    oracle = square_well_oracle(V0, a)
    assert len(computed) == len(oracle)
    for x, y in zip(computed, oracle):
        assert abs(x - y) < 1e-8


def test_negative_mass_well_has_bound_state():
    for depth in (-0.3, -1.0, -4.0):
        V, supp = rz.mollified_well(depth, 0.0, 1.0)
        rr = np.linspace(supp[0], supp[1], 501)
        assert np.trapezoid(V(rr), rr) < 0.0
        assert len(rz.bound_states(V, supp)) >= 1


def test_mollified_well_profile():
    V, supp = rz.mollified_well(-1.0, 0.0, 1.0, width=0.05)
    assert supp == (-0.05, 1.05)
    assert abs(V(0.5) + 1.0) < 1e-12
    assert V(-0.2) == 0.0 and V(1.2) == 0.0


def test_find_in_box_deep_well():
    V, supp = rz.mollified_well(-10.0, -1.0, 1.0)
    params = rz.ShootingParams(V=V, support=supp)
    found = rz.find_in_box(params, (0.1, 4.0, -1.5, -0.01), seed_grid=(5, 5))
    assert found.winding_total == 1
    assert len(found.zeros) == 1
    assert found.multiplicities == [1]
    z = found.zeros[0]
    # the zero is genuinely a zero of the Wronskian
    assert abs(rz.wronskian_mismatch(params, z)) < 1e-7


def test_counting_doubles_with_support():
    V1, s1 = rz.mollified_well(-1.0, 0.0, 1.0)
    c1, slope1 = rz.count_in_disks(V1, s1, [10.0, 20.0])
    V2, s2 = rz.mollified_well(-1.0, 0.0, 2.0)
    c2, slope2 = rz.count_in_disks(V2, s2, [10.0, 20.0])
    assert all(b >= a for a, b in zip(c1, c2))
    assert slope2 > 1.5 * slope1
