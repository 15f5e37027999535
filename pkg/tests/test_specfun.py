import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavitydecay import specfun
from cavitydecay.errors import DomainError, SingularityError

mp.mp.dps = 40


def mp_j(n, z):
    z = mp.mpc(z)
    total, term, k = mp.mpc(0), 1 / mp.fac2(2 * n + 1), 0
    while k < 400:
        total += term
        term *= -(z * z / 2) / ((k + 1) * (2 * n + 2 * k + 3))
        k += 1
    return complex(z**n * total)


def mp_h1(n, z):
    z = mp.mpc(z)
    poly = sum(mp.factorial(n + k) / (mp.factorial(k) * mp.factorial(n - k)) * (1j / (2 * z)) ** k
               for k in range(n + 1))
    return complex((-1j) ** (n + 1) * mp.exp(1j * z) / z * poly)


def rel(a, b):
    return abs(a - b) / abs(b)


GRID = [0.003 + 0.001j, 0.5, 1.9 - 0.3j, 2.1 + 0.2j, 5.0, 7.3 - 4.0j, 20 + 15j, 1 - 25j, 63.0 + 0.4j]


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("z", GRID)
def test_against_extended_precision(n, z):
    assert rel(specfun.spherical_j(n, z), mp_j(n, z)) < 1e-12
    assert rel(specfun.spherical_h1(n, z), mp_h1(n, z)) < 1e-12


def test_elementary_closed_forms():
    z = np.array([0.7, 3.2 + 1j, 12 - 0.5j])
    assert np.allclose(specfun.spherical_j(0, z), np.sin(z) / z, rtol=1e-14)
    assert np.allclose(specfun.spherical_y(0, z), -np.cos(z) / z, rtol=1e-14)
    j1 = np.sin(z) / z**2 - np.cos(z) / z
    assert np.allclose(specfun.spherical_j(1, z), j1, rtol=1e-13)


def test_origin_limits():
    assert specfun.spherical_j(0, 0) == 1
    for n in (1, 2, 3):
        assert specfun.spherical_j(n, 0) == 0
    with pytest.raises(SingularityError):
        specfun.spherical_h1(1, 0)
    with pytest.raises(SingularityError):
        specfun.riccati_derivative(1, "first", 0)


def test_series_closed_form_continuity():
    # both branches agree across the switch radius
    for n in range(4):
        for phase in np.linspace(0, 2 * np.pi, 7):
            z_in = 1.999999 * np.exp(1j * phase)
            z_out = 2.000001 * np.exp(1j * phase)
            assert rel(specfun.spherical_j(n, z_in), specfun.spherical_j(n, z_out)) < 1e-5
            assert rel(specfun.spherical_h1(n, z_in), specfun.spherical_h1(n, z_out)) < 1e-5


@pytest.mark.parametrize("n", range(1, 3))
def test_recurrence(n):
    z = np.array([0.3 + 0.1j, 4.0, 9 - 3j, 30 + 2j])
    for f in (specfun.spherical_j, specfun.spherical_h1):
        lhs = f(n - 1, z) + f(n + 1, z)
        rhs = (2 * n + 1) / z * f(n, z)
        assert np.allclose(lhs, rhs, rtol=1e-11)


@pytest.mark.parametrize("kind", ["first", "hankel"])
@pytest.mark.parametrize("n", range(4))
def test_riccati_derivative_finite_difference(kind, n):
    f = specfun.spherical_j if kind == "first" else specfun.spherical_h1
    for z in (0.8 + 0.2j, 3.5, 11 - 2j):
        h = 1e-5
        fd = ((z + h) * f(n, z + h) - (z - h) * f(n, z - h)) / (2 * h) / z
        assert rel(specfun.riccati_derivative(n, kind, z), fd) < 1e-8


def test_riccati_n1_example():
    z = 2.3 + 0.4j
    expected = (np.sin(z) + np.cos(z) / z - np.sin(z) / z**2) / z
    assert rel(specfun.riccati_derivative(1, "first", z), expected) < 1e-13


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 3), st.floats(0.01, 60), st.floats(-40, 40))
def test_conjugation_symmetry(n, x, y):
    z = complex(x, y)
    assert rel(specfun.spherical_j(n, z.conjugate()), np.conj(specfun.spherical_j(n, z))) < 1e-12
    yv = specfun.spherical_y(n, z)
    assert abs(specfun.spherical_y(n, z.conjugate()) - np.conj(yv)) <= 1e-11 * max(abs(yv), 1e-300) \
        + 1e-12 * abs(specfun.spherical_h1(n, z))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.floats(0.05, 60), st.floats(-30, 30))
def test_wronskian(n, x, y):
    z = complex(x, y)
    j, yy = specfun.spherical_j(n, z), specfun.spherical_y(n, z)
    jp = specfun.spherical_j(n - 1, z) - (n + 1) / z * j
    yp = specfun.spherical_y(n - 1, z) - (n + 1) / z * yy
    scale = abs(j * yp) + abs(jp * yy)
    assert abs(j * yp - jp * yy - 1 / z**2) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.floats(0.05, 50), st.floats(-50, 50))
def test_scaled_consistency(n, x, y):
    z = complex(x, y)
    assert rel(specfun.spherical_j_scaled(n, z) * np.exp(abs(y)), specfun.spherical_j(n, z)) < 1e-13
    assert rel(specfun.spherical_h1_scaled(n, z) * np.exp(-y), specfun.spherical_h1(n, z)) < 1e-13


def test_scaled_survives_large_imaginary_argument():
    z = 200.0 + 400.0j
    assert np.isfinite(specfun.spherical_j_scaled(1, z))
    assert np.isfinite(specfun.spherical_h1_scaled(1, z))
    assert abs(specfun.spherical_j_scaled(1, z)) == pytest.approx(0.5 / abs(z), rel=1e-2)
    with pytest.raises(DomainError):
        specfun.spherical_j(1, 10 + 800j)


@pytest.mark.parametrize("bad", [-1, 4, 1.5, "1"])
def test_order_validation(bad):
    with pytest.raises(DomainError):
        specfun.spherical_j(bad, 1.0)


def test_kind_validation_and_value_record():
    with pytest.raises(DomainError):
        specfun.riccati_derivative(1, "second", 1.0)
    v = specfun.spherical_value(1, "hankel", 2.0)
    assert v.value == specfun.spherical_h1(1, 2.0)
    assert v.derivative_combo == specfun.riccati_derivative(1, "hankel", 2.0)
