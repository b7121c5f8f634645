"""Level matrices, determinants in both routes, dense eigen oracle."""

import math

import numpy as np
import pytest
import sympy as sp

from llspec.errors import CapacityError, DomainError
from llspec.ghpolys import g_zeros
from llspec.lamplighter import (
    build_level,
    dense_eigs,
    level_cap,
    pencil_matrix,
    phi_det,
    phi_det_signlog,
    phi_factorized,
    phi_factorized_signlog,
)


def test_base_case_and_level_one():
    rep0 = build_level(0)
    assert rep0.a.tolist() == [[1]] and rep0.b.tolist() == [[1]] and rep0.c.tolist() == [[1]]
    rep1 = build_level(1)
    assert rep1.a.tolist() == [[0, 1], [1, 0]]
    assert rep1.b.tolist() == [[1, 0], [0, 1]]
    assert rep1.c.tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize("n", range(7))
def test_generator_matrices_are_permutations(n):
    rep = build_level(n)
    for m in (rep.a, rep.b, rep.c):
        assert (m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all()
        assert set(np.unique(m)) <= {0, 1}
    ident = np.eye(1 << n, dtype=np.uint8)
    assert (rep.c @ rep.c == ident).all()


@pytest.mark.parametrize("n", range(1, 7))
def test_block_recursion_holds(n):
    prev = build_level(n - 1)
    cur = build_level(n)
    h = 1 << (n - 1)
    assert (cur.a[:h, h:] == prev.a).all() and (cur.a[h:, :h] == prev.b).all()
    assert not cur.a[:h, :h].any() and not cur.a[h:, h:].any()
    assert (cur.b[:h, :h] == prev.a).all() and (cur.b[h:, h:] == prev.b).all()
    assert (cur.c[:h, h:] == np.eye(h)).all() and (cur.c[h:, :h] == np.eye(h)).all()


def test_pencil_small_cases():
    m1 = pencil_matrix(build_level(1), 0.7)
    assert np.allclose(m1.entries, [[2.0, 1.3], [1.3, 2.0]])
    m0 = pencil_matrix(build_level(0), 0.0)
    assert m0.entries.tolist() == [[4.0]]


def test_pencil_row_sums():
    m = pencil_matrix(build_level(5), 0.7)
    assert np.allclose(m.entries.sum(axis=1), 4.0 - 0.7)
    assert np.allclose(m.entries, m.entries.T)
    # the constant vector is an eigenvector with eigenvalue 4 - mu
    ones = np.ones(32)
    assert np.allclose(m.entries @ ones, (4.0 - 0.7) * ones)


def test_phi_det_values():
    assert phi_det(0, 0.0, 0.0) == pytest.approx(4.0)
    assert phi_det(1, 1.0, 2.0) == pytest.approx(1.0)
    assert phi_det(2, 0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_phi_factorized_values():
    assert phi_factorized(2, 0.0, 0.0) == 0.0
    assert phi_factorized(3, 1.0, 1.0) == 0.0
    det = phi_det(5, 0.3, 0.7)
    fac = phi_factorized(5, 0.3, 0.7)
    assert fac == pytest.approx(det, rel=1e-8)


def test_phi_routes_agree_on_random_draws():
    rng = np.random.default_rng(7)
    for n in range(1, 7):
        for _ in range(20):
            lam = rng.uniform(-6.0, 6.0)
            mu = rng.uniform(-3.0, 3.0)
            s_det, l_det = phi_det_signlog(n, lam, mu)
            s_fac, l_fac = phi_factorized_signlog(n, lam, mu)
            assert s_det == s_fac
            assert abs(l_det - l_fac) <= 1e-8 * max(1.0, abs(l_det), abs(l_fac))


def test_phi_divides_next_level():
    for mu in (0.0, 0.3, 1.5):
        for n in range(1, 5):
            small = dense_eigs(pencil_matrix(build_level(n), mu))
            large = dense_eigs(pencil_matrix(build_level(n + 1), mu))
            for lam in small:
                assert np.min(np.abs(large - lam)) < 1e-7


def _symbolic_phi(n, lam, mu):
    rep = build_level(n)
    a = sp.Matrix(rep.a.tolist())
    b = sp.Matrix(rep.b.tolist())
    c = sp.Matrix(rep.c.tolist())
    m = a + a.T + b + b.T - mu * c - lam * sp.eye(1 << n)
    return sp.expand(m.det())


def test_symbolic_determinants_match_displayed_factorizations():
    lam, mu = sp.symbols("lam mu")
    expected = {
        0: 4 - lam - mu,
        1: (mu - lam) * (4 - lam - mu),
        2: (mu - lam) * (4 - lam - mu) * (lam ** 2 - mu ** 2 - 4),
        3: (lam - mu) ** 2
        * (lam + mu - 4)
        * (lam ** 2 - mu ** 2 - 4)
        * (lam ** 3 + lam ** 2 * mu - lam * mu ** 2 - mu ** 3 - 8 * lam),
    }
    for n, poly in expected.items():
        assert sp.expand(_symbolic_phi(n, lam, mu) - sp.expand(poly)) == 0


def test_dense_eigs_small_closed_forms():
    assert dense_eigs(pencil_matrix(build_level(0), 0.0)).tolist() == [4.0]
    for mu in (2.0, 0.5, -1.0):
        eigs = dense_eigs(pencil_matrix(build_level(1), mu))
        assert np.allclose(eigs, sorted([mu, 4.0 - mu]))
    eigs2 = dense_eigs(pencil_matrix(build_level(2), 0.0))
    assert np.allclose(eigs2, [-2.0, 0.0, 2.0, 4.0], atol=1e-10)


def test_dense_eigs_rejects_asymmetric():
    bad = pencil_matrix(build_level(1), 0.0)
    with pytest.raises(DomainError):
        dense_eigs(type(bad)(level=1, mu=0.0, entries=np.array([[1.0, 2.0], [0.0, 1.0]])))


@pytest.mark.parametrize("mu", [0.0, 0.3, 1.0, 2.0])
def test_eigenvalue_multiset_matches_factorization(mu):
    # predicted: {4 - mu} once, zeros of G_k with multiplicity 2^(n-1-k)
    # (k < n) and 1 (k = n), merged across coincidences
    n = 5
    predicted = [(4.0 - mu, 1)]
    for k in range(1, n + 1):
        weight = 1 if k == n else 1 << (n - 1 - k)
        predicted.extend((z, weight) for z in g_zeros(k, mu))
    eigs = dense_eigs(pencil_matrix(build_level(n), mu))
    assert len(eigs) == 1 << n
    # group predictions within tolerance, then compare cluster counts
    predicted.sort()
    clusters = []
    for pos, wt in predicted:
        if clusters and pos - clusters[-1][0] <= 1e-7:
            clusters[-1] = (clusters[-1][0], clusters[-1][1] + wt)
        else:
            clusters.append((pos, wt))
    assert sum(w for _, w in clusters) == 1 << n
    for pos, wt in clusters:
        assert int(np.sum(np.abs(eigs - pos) <= 1e-7)) == wt


def test_capacity_honors_env(monkeypatch):
    monkeypatch.setenv("LLSPEC_NMAX", "3")
    assert level_cap() == 3
    with pytest.raises(CapacityError):
        build_level(4)
    with pytest.raises(CapacityError):
        phi_det(4, 0.0, 0.0)
    monkeypatch.setenv("LLSPEC_NMAX", "not-a-number")
    with pytest.raises(CapacityError):
        level_cap()


def test_factorized_large_level_does_not_overflow(monkeypatch):
    monkeypatch.setenv("LLSPEC_NMAX", "40")
    # exponents reach 2^(n-2); only the log form survives at n = 20
    sign, logabs = phi_factorized_signlog(20, 0.35, 0.72)
    assert sign in (-1.0, 1.0)
    assert math.isfinite(logabs) and logabs > 700.0
