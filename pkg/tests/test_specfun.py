import mpmath as mp
import numpy as np
import pytest

from cusplab import specfun


def test_gamma_against_mpmath():
    rng = np.random.default_rng(2)
    for _ in range(50):
        z = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        if abs(z - round(z.real)) < 1e-3 and z.real <= 0:
            continue
        ours = specfun.gamma_c(z)
        ref = complex(mp.gamma(z))
        assert abs(ours - ref) <= 1e-10 * max(1.0, abs(ref))


def test_reflection_formula():
    rng = np.random.default_rng(3)
    for _ in range(30):
        z = complex(rng.uniform(0.1, 4), rng.uniform(-3, 3))
        lhs = specfun.gamma_c(z) * specfun.gamma_c(1.0 - z)
        rhs = np.pi / np.sin(np.pi * z)
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def test_bessel_iv_against_mpmath():
    rng = np.random.default_rng(5)
    for _ in range(40):
        nu = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        z = rng.uniform(0.2, 8.0)
        ours = specfun.bessel_i(nu, z).value
        ref = complex(mp.besseli(mp.mpc(nu), z))
        assert abs(ours - ref) <= 1e-9 * max(1.0, abs(ref))


def test_bessel_kv_against_mpmath():
    rng = np.random.default_rng(6)
    for _ in range(40):
        nu = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        z = rng.uniform(0.2, 8.0)
        ours = specfun.bessel_k(nu, z).value
        ref = complex(mp.besselk(mp.mpc(nu), z))
        assert abs(ours - ref) <= 1e-9 * max(1.0, abs(ref))


def test_half_integer_closed_forms():
    for z in (0.3, 1.0, 2.7, 6.0):
        k_half = specfun.bessel_k(0.5, z).value
        assert abs(k_half - np.sqrt(np.pi / (2 * z)) * np.exp(-z)) < 1e-10
        i_half = specfun.bessel_i(0.5, z).value
        assert abs(i_half - np.sqrt(2 / (np.pi * z)) * np.sinh(z)) < 1e-10


def test_recurrence_relations():
    rng = np.random.default_rng(8)
    for _ in range(30):
        nu = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        z = rng.uniform(0.5, 6.0)
        i_m = specfun.bessel_i(nu - 1, z).value
        i_p = specfun.bessel_i(nu + 1, z).value
        i_0 = specfun.bessel_i(nu, z).value
        assert abs(i_m - i_p - (2 * nu / z) * i_0) \
            <= 1e-10 * max(1.0, abs(i_0))
        k_m = specfun.bessel_k(nu - 1, z).value
        k_p = specfun.bessel_k(nu + 1, z).value
        k_0 = specfun.bessel_k(nu, z).value
        assert abs(k_m - k_p + (2 * nu / z) * k_0) \
            <= 1e-10 * max(1.0, abs(k_0))


def test_wronskian_identity_random():
    rng = np.random.default_rng(9)
    for _ in range(60):
        nu = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        lam = rng.uniform(0.5, 4.0)
        r = rng.uniform(-1.0, 2.0)
        assert abs(specfun.wronskian_radial(nu, lam, r) - 1.0) < 1e-10


def test_extended_order_grid():
    out = specfun.bessel_ik_grid(40.0, np.array([1.0, 5.0, 10.0]),
                                 extended=True)
    vals_i, vals_k = out
    for i, z in enumerate([1.0, 5.0, 10.0]):
        ref_i = complex(mp.besseli(40, z))
        ref_k = complex(mp.besselk(40, z))
        assert abs(vals_i[i] - ref_i) <= 1e-8 * max(abs(ref_i), 1e-280)
        assert abs(vals_k[i] - ref_k) <= 1e-8 * max(abs(ref_k), 1e-280)


def test_domain_errors():
    with pytest.raises(specfun.DomainError):
        specfun.wronskian_radial(1.0, -2.0, 0.0)
