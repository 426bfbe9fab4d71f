import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import legendre as npleg

from nlwave.basis import (QuadratureRule, composite_gauss_rule, gauss_rule, gram_matrix, legendre_eval,
                          legendre_eval_all, project, synthesize)
from nlwave.errors import RuleTooCoarse


@pytest.mark.parametrize("n,x,expected", [(0, 0.7, 1.0), (5, 1.0, 1.0), (2, 0.5, -0.125)])
def test_legendre_eval_examples(n, x, expected):
    assert legendre_eval(n, x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("N,x,expected", [(2, 0.0, [1, 0, -0.5]), (1, -1.0, [1, -1]), (4, 1.0, [1] * 5)])
def test_legendre_eval_all_examples(N, x, expected):
    np.testing.assert_allclose(legendre_eval_all(N, x), expected, atol=1e-15)


@given(st.integers(0, 40), st.floats(-1, 1))
def test_legendre_matches_numpy(n, x):
    c = np.zeros(n + 1)
    c[n] = 1.0
    assert legendre_eval(n, x) == pytest.approx(npleg.legval(x, c), abs=1e-12)


def test_legendre_extrapolates():
    # outside [-1, 1] the recurrence still evaluates the polynomial
    assert legendre_eval(2, 2.0) == pytest.approx(5.5)


def test_gauss_small_rules():
    r1 = gauss_rule(1)
    np.testing.assert_allclose(r1.nodes, [0.0], atol=1e-16)
    np.testing.assert_allclose(r1.weights, [2.0])
    r2 = gauss_rule(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_degree_15_exactness():
    r = gauss_rule(8)
    assert abs(r.integrate(lambda x: x ** 15)) < 1e-15
    assert r.integrate(lambda x: x ** 14) == pytest.approx(2 / 15, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 7, 20, 64, 200, 512])
def test_gauss_invariants(n):
    r = gauss_rule(n)
    assert np.all(np.diff(r.nodes) > 0)
    assert np.all((r.nodes > -1) & (r.nodes < 1))
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(2.0, rel=1e-13)
    np.testing.assert_array_equal(r.nodes, -r.nodes[::-1])
    np.testing.assert_array_equal(r.weights, r.weights[::-1])


@pytest.mark.parametrize("n", [5, 50, 200])
def test_gauss_matches_numpy_leggauss(n):
    x, w = npleg.leggauss(n)
    r = gauss_rule(n)
    np.testing.assert_allclose(r.nodes, x, atol=1e-14)
    # leggauss loses ~1e-11 relative accuracy in the tiny endpoint weights at large n
    np.testing.assert_allclose(r.weights, w, atol=1e-14)


def test_gauss_mapped_interval():
    r = gauss_rule(6, 0.0, 3.0)
    assert r.interval == (0.0, 3.0)
    assert r.integrate(lambda x: x ** 5) == pytest.approx(3.0 ** 6 / 6, rel=1e-13)


def test_composite_rule_is_additive():
    r = composite_gauss_rule(-1, 1, 4, 2)
    assert len(r) == 8 and r.panels == 4
    assert r.weights.sum() == pytest.approx(2.0, rel=1e-14)


def test_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.0, 0.5]), np.array([1.0, -1.0]), (-1, 1))
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.5, 0.0]), np.array([1.0, 1.0]), (-1, 1))


def test_project_examples():
    rule = gauss_rule(10)
    np.testing.assert_allclose(project(lambda x: legendre_eval(3, x), 5, rule), [0, 0, 0, 1, 0, 0], atol=1e-14)
    np.testing.assert_allclose(project(lambda x: np.ones_like(x), 3, rule), [1, 0, 0, 0], atol=1e-15)
    a = project(lambda x: x * x, 2, rule)
    np.testing.assert_allclose(a, [1 / 3, 0, 2 / 3], atol=1e-15)
    xs = np.random.default_rng(1).uniform(-1, 1, 5)
    np.testing.assert_allclose(synthesize(a, xs), xs * xs, atol=1e-14)


def test_project_rule_too_coarse():
    with pytest.raises(RuleTooCoarse):
        project(lambda x: x, 5, gauss_rule(5))


def test_synthesize_examples():
    np.testing.assert_allclose(synthesize([0, 1], [0.25]), [0.25])
    np.testing.assert_allclose(synthesize([2, 0, -1], [1.0]), [1.0])


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12))
def test_projection_identity_on_polynomials(coeffs):
    N = len(coeffs) - 1
    rule = gauss_rule(N + 3)
    f = np.polynomial.Polynomial(coeffs)
    a = project(f, N, rule)
    np.testing.assert_allclose(synthesize(a, rule.nodes), f(rule.nodes), atol=1e-12 * (1 + max(map(abs, coeffs))))


def test_projection_on_other_interval():
    rule = gauss_rule(12, 0.0, 4.0)
    f = lambda x: 1 + x - 0.25 * x ** 3
    a = project(f, 3, rule)
    xs = np.linspace(0, 4, 9)
    np.testing.assert_allclose(synthesize(a, xs, (0.0, 4.0)), f(xs), atol=1e-12)


@pytest.mark.parametrize("N", [0, 5, 32])
def test_gram_matrix_diagonal(N):
    G = gram_matrix(N, gauss_rule(N + 1))
    np.testing.assert_allclose(G, np.diag(2 / (2 * np.arange(N + 1) + 1)), atol=1e-13)
