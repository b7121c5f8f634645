"""J*(mu) truncations, Sturm bisection, measure density, m-function."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.linalg import solve_banded

from llspec.chebyshev import u_zeros
from llspec.errors import DomainError
from llspec.ghpolys import g_zeros
from llspec.jacobi import (
    SpectrumDescription,
    TridiagonalMatrix,
    ac_density,
    critical_index,
    eig_count_below,
    isolated_eigenvalue,
    isolated_mass,
    jstar_band,
    jstar_spectrum,
    jstar_truncation,
    leading_counts_below,
    m_function,
    pencil_spectrum,
    tridiag_eigs,
)


def test_truncation_layout():
    t = jstar_truncation(0.0, 3)
    assert t.diag.tolist() == [0.0, 0.0, 0.0] and t.offdiag.tolist() == [1.0, 1.0]
    t2 = jstar_truncation(2.0, 2)
    assert t2.diag.tolist() == [-1.0, 1.0] and t2.offdiag.tolist() == [1.0]
    with pytest.raises(DomainError):
        jstar_truncation(1.0, 0)


def test_free_truncation_eigenvalues():
    assert np.allclose(tridiag_eigs(jstar_truncation(0.0, 2)), [-1.0, 1.0])
    assert np.allclose(
        tridiag_eigs(jstar_truncation(0.0, 3)), [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-12
    )
    # the free truncation diagonalizes through second-kind Chebyshev zeros
    for n in (5, 20, 50):
        eigs = tridiag_eigs(jstar_truncation(0.0, n))
        assert np.allclose(eigs, [2.0 * z for z in u_zeros(n)], atol=1e-11)


def test_single_entry_matrix():
    assert tridiag_eigs(TridiagonalMatrix(diag=[5.0], offdiag=[])).tolist() == [5.0]


@given(
    diag=st.lists(st.floats(-5, 5), min_size=1, max_size=12),
    seed=st.integers(0, 2 ** 31),
)
@settings(max_examples=40, deadline=None)
def test_trace_identity(diag, seed):
    rng = np.random.default_rng(seed)
    off = rng.uniform(-3.0, 3.0, size=len(diag) - 1)
    t = TridiagonalMatrix(diag=np.array(diag), offdiag=off)
    eigs = tridiag_eigs(t, tol=1e-12)
    assert abs(eigs.sum() - t.diag.sum()) <= len(diag) * 1e-11


def test_tridiag_eigs_against_dense_oracle():
    rng = np.random.default_rng(3)
    for n in (2, 5, 17, 40):
        t = TridiagonalMatrix(diag=rng.uniform(-4, 4, n), offdiag=rng.uniform(-2, 2, n - 1))
        got = tridiag_eigs(t)
        ref = np.sort(np.linalg.eigvalsh(t.dense()))
        assert np.allclose(got, ref, atol=1e-10)


def test_eig_counts():
    t = jstar_truncation(0.0, 3)  # eigenvalues -sqrt2, 0, sqrt2
    assert eig_count_below(t, -2.0) == 0
    assert eig_count_below(t, -1.0) == 1
    assert eig_count_below(t, 0.5) == 2
    assert eig_count_below(t, 3.0) == 3
    counts = leading_counts_below(t, 0.5)
    # leading 1x1 has eigenvalue 0, leading 2x2 has -1 and 1
    assert counts.tolist() == [1, 1, 2]


def test_isolated_point():
    assert isolated_eigenvalue(2.0) == pytest.approx(-1.5)
    assert isolated_eigenvalue(-2.0) == pytest.approx(1.5)
    assert isolated_eigenvalue(0.5) is None
    assert isolated_eigenvalue(1.0) is None


def test_isolated_mass_matches_defining_expression():
    def displayed(mu):
        # (mu - 1/mu + sqrt((mu + 1/mu)^2 - 4)) / (2 mu) with the root
        # analytic off [-2, 2] (same sign as its argument at infinity)
        z = mu + 1.0 / mu
        root = math.copysign(math.sqrt(z * z - 4.0), z)
        return (mu - 1.0 / mu + root) / (2.0 * mu)

    for mu in (1.5, 2.0, 3.0, -2.0, -1.01, 7.0):
        assert isolated_mass(mu) == pytest.approx(displayed(mu), rel=1e-12)
    assert isolated_mass(2.0) == pytest.approx(0.75)
    assert isolated_mass(3.0) == pytest.approx(8.0 / 9.0)
    assert isolated_mass(1.0) == 0.0
    assert isolated_mass(0.5) == 0.0


def test_density_point_values():
    assert ac_density(0.0, 0.0) == pytest.approx(1.0 / math.pi)
    assert ac_density(5.0, 0.0) == 0.0
    assert ac_density(-5.0, 2.0) == 0.0
    lo, hi = jstar_band(0.7)
    assert ac_density(lo, 0.7) == 0.0 and ac_density(hi, 0.7) == 0.0
    with pytest.raises(DomainError):
        ac_density(-1.5, 1.0)  # pole exactly at the band endpoint


def _band_integral(mu, tol):
    # integrate through the angle substitution x = mu/2 + 2 cos(theta); the
    # integrand is smooth there while the density has sqrt endpoints
    lo, hi = jstar_band(mu)

    def integrand(theta):
        x = mu / 2.0 + 2.0 * math.cos(theta)
        return ac_density(x, mu) * 2.0 * math.sin(theta)

    val, err = quad(integrand, 0.0, math.pi, epsabs=tol, epsrel=tol, limit=200)
    return val


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.5, 2.0, 3.0])
def test_density_plus_atom_is_probability(mu):
    total = _band_integral(mu, 1e-10) + isolated_mass(mu)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_density_band_integral_examples():
    assert _band_integral(0.0, 1e-10) == pytest.approx(1.0, abs=1e-8)
    assert _band_integral(2.0, 1e-10) == pytest.approx(0.25, abs=1e-6)


def test_m_function_value_at_three():
    val = m_function(3.0, 0.0)
    assert val.real == pytest.approx((-3.0 + math.sqrt(5.0)) / 2.0, abs=1e-12)
    assert abs(val.imag) < 1e-12


def test_m_function_is_herglotz():
    for mu in (0.0, 0.7, 2.0, -1.3):
        lo, hi = jstar_band(mu)
        for x in np.linspace(lo - 1.0, hi + 1.0, 23):
            assert m_function(complex(x, 1e-3), mu).imag > 0.0


def test_m_function_band_and_pole_behaviour():
    with pytest.raises(DomainError):
        m_function(0.0, 0.0)
    x_star = isolated_eigenvalue(2.0)
    assert abs(m_function(complex(x_star, 1e-6), 2.0)) > 1e3
    # no blow-up anywhere else off the band
    assert abs(m_function(complex(x_star - 0.5, 1e-6), 2.0)) < 50.0


def test_m_function_matches_resolvent_oracle():
    # first diagonal entry of the resolvent of a large truncation
    for mu, z in [(0.0, 3.0), (2.0, complex(4.0, 0.5)), (-1.5, complex(-4.0, 0.2))]:
        n = 400
        t = jstar_truncation(mu, n)
        ab = np.zeros((3, n), dtype=complex)
        ab[0, 1:] = t.offdiag
        ab[1, :] = t.diag - z
        ab[2, :-1] = t.offdiag
        e0 = np.zeros(n, dtype=complex)
        e0[0] = 1.0
        res = solve_banded((1, 1), ab, e0)
        # the (0,0) resolvent entry is the Stieltjes transform itself
        assert m_function(z, mu) == pytest.approx(res[0], rel=1e-9)


@pytest.mark.parametrize("mu", [2.0, 3.0, -1.8])
def test_pole_location_by_bisection(mu):
    # 1/m is strictly decreasing through zero at the mass point, so bisecting
    # its sign recovers the pole from resolvent values alone
    x_star = isolated_eigenvalue(mu)
    lo, hi = x_star - 0.25, x_star + 0.25
    band_lo, band_hi = jstar_band(mu)
    assert hi < band_lo or lo > band_hi  # bracket stays off the band

    def inv_m(x):
        return (1.0 / m_function(complex(x, 0.0), mu)).real

    assert inv_m(lo) > 0.0 > inv_m(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        try:
            positive = inv_m(mid) > 0.0
        except DomainError:  # landed exactly on the pole
            lo = hi = mid
            break
        if positive:
            lo = mid
        else:
            hi = mid
    assert abs(0.5 * (lo + hi) - x_star) < 1e-8


def test_critical_index_table():
    assert critical_index(Fraction(7, 6)) == 6
    assert critical_index(1.5) == 2
    assert critical_index(2.0) == 1
    assert critical_index(1.2) == 5
    assert critical_index(-1.2) == 5
    assert critical_index(7.0) == 1
    for k in range(1, 13):
        assert critical_index(Fraction(k + 1, k)) == k
    with pytest.raises(DomainError):
        critical_index(1.0)
    with pytest.raises(DomainError):
        critical_index(Fraction(1, 2))


def test_spectrum_descriptions():
    s0 = pencil_spectrum(0.0)
    assert s0.band == (-4.0, 4.0) and s0.isolated is None and s0.mass_at_isolated == 0.0
    s2 = pencil_spectrum(2.0)
    assert s2.band == (-6.0, 2.0) and s2.isolated == pytest.approx(3.0)
    sm2 = pencil_spectrum(-2.0)
    assert sm2.band == (-2.0, 6.0) and sm2.isolated == pytest.approx(-3.0)
    j2 = jstar_spectrum(2.0)
    assert j2.isolated == pytest.approx(-1.5) and j2.mass_at_isolated == pytest.approx(0.75)
    with pytest.raises(DomainError):
        SpectrumDescription(band=(0.0, 1.0), isolated=0.5, mass_at_isolated=0.1)


@pytest.mark.parametrize("mu", [1.5, 2.0, 3.0])
def test_lowest_eigenvalue_converges_monotonically(mu):
    target = -mu / 2.0 - 1.0 / mu
    prev = None
    for n in range(2, 81):
        low = tridiag_eigs(jstar_truncation(mu, n))[0]
        assert low > target - 1e-12
        if prev is not None:
            assert low <= prev + 1e-12
        prev = low
    assert abs(prev - target) < 1e-8


@pytest.mark.parametrize("mu", [0.5, 1.0])
def test_no_eigenvalue_escapes_band_below_threshold(mu):
    # one pivot pass per bound covers every truncation size at once
    t = jstar_truncation(mu, 200)
    lo, hi = jstar_band(mu)
    assert leading_counts_below(t, lo - 1e-8).max() == 0
    above = leading_counts_below(t, hi + 1e-8)
    assert (above == np.arange(1, 201)).all()


def test_translation_to_level_polynomial_zeros():
    for k, mu in [(4, 0.3), (9, 2.0), (25, -0.8)]:
        eigs = tridiag_eigs(jstar_truncation(mu, k))
        assert np.allclose(g_zeros(k, mu), np.sort(-2.0 * eigs), atol=1e-9)
