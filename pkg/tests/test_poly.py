import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ik6rp.errors import BothConstantInW, BothZero
from ik6rp.poly import (Poly1, Poly2, _mp_context, common_real_roots, real_roots, resultant_degree_bound,
                        sturm_sequence, sylvester_matrix, sylvester_resultant_w, trim)

seeds = st.integers(0, 2**32 - 1)


# ---------------------------------------------------------------------------
# univariate arithmetic
# ---------------------------------------------------------------------------

def test_poly1_basics():
    p = Poly1([1, 2, 3])
    assert p.degree == 2
    assert p(2) == 17
    assert (p - p).is_zero()
    assert Poly1([]).degree == -1
    assert (p * Poly1([0, 1])).coeffs == (0, 1, 2, 3)
    assert p.derivative().coeffs == (2, 6)


@given(seeds)
def test_divmod_reconstructs(seed):
    rng = np.random.default_rng(seed)
    a = Poly1(rng.normal(size=rng.integers(1, 9)))
    b = Poly1(rng.normal(size=rng.integers(1, 5)))
    q, r = a.divmod(b)
    assert r.degree < b.degree
    diff = (q * b + r) - a
    assert diff.max_abs() <= 1e-12 * max(a.max_abs(), q.max_abs() * b.max_abs()) * len(a.coeffs)


def test_poly2_product_and_partial_evaluation():
    f = Poly2.u() + Poly2.w() * Poly2.w()
    g = f * f
    assert (g.deg_u, g.deg_w) == (2, 4)
    h = g.evaluate_partial(3.0)
    assert h.degree == 4
    assert h(2.0) == pytest.approx(g(3.0, 2.0))


def test_trim_drops_noise_and_vanished_leading_terms():
    p = trim(Poly1([1.0, 2.0, 1e-14]), 1e-9)
    assert p.degree == 1
    q = trim(Poly2([[1.0, 1e-15], [2.0, 0.0]]), 1e-9)
    assert (q.deg_u, q.deg_w) == (1, 0)


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def test_sylvester_matrix_layout():
    # descending coefficients, f-rows first
    m = np.array(sylvester_matrix([1.0, 2.0], [3.0, 0.0, 1.0]), dtype=float)
    assert m.shape == (3, 3)
    np.testing.assert_array_equal(m, [[2, 1, 0], [0, 2, 1], [1, 0, 3]])


def test_resultant_of_lines():
    u, w = Poly2.u(), Poly2.w()
    r = sylvester_resultant_w(w - u, w + u)
    np.testing.assert_allclose([float(c) for c in r.coeffs], [0.0, 2.0], atol=1e-25)


def test_resultant_parabola_and_line():
    u, w = Poly2.u(), Poly2.w()
    r = sylvester_resultant_w(w * w - u, w - 1)
    np.testing.assert_allclose([float(c) for c in r.coeffs], [1.0, -1.0], atol=1e-25)


def test_resultant_matches_sympy():
    U, W = sympy.symbols("u w")
    fs = 3 * U**2 * W**2 - 2 * U * W + W - 5 * U**3 + 1
    gs = W**3 - U * W + 2 * U**2 - 7
    expect = sympy.Poly(sympy.resultant(fs, gs, W), U).all_coeffs()[::-1]

    def to2(e):
        p = sympy.Poly(e, U, W)
        c = np.zeros((p.degree(U) + 1, p.degree(W) + 1))
        for (i, j), v in p.terms():
            c[i, j] = float(v)
        return Poly2(c)

    r = sylvester_resultant_w(to2(fs), to2(gs), rel_eps=1e-30)
    np.testing.assert_allclose([float(c) for c in r.coeffs], [float(c) for c in expect], rtol=1e-12, atol=1e-12)


def test_constant_in_w_inputs():
    with pytest.raises(BothConstantInW):
        sylvester_resultant_w(Poly2.u(), Poly2.u() + 1)
    # Res_w(c(u), g) = c^deg_w(g)
    r = sylvester_resultant_w(Poly2.u() + 1, Poly2.w() * Poly2.w() - 2)
    np.testing.assert_allclose([float(c) for c in r.coeffs], [1.0, 2.0, 1.0], atol=1e-25)


def _random_poly2(rng, du, dw):
    return Poly2(rng.normal(size=(du + 1, dw + 1)))


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_resultant_is_consistent_with_pointwise_determinant(seed):
    rng = np.random.default_rng(seed)
    f = _random_poly2(rng, rng.integers(1, 4), rng.integers(1, 4))
    g = _random_poly2(rng, rng.integers(1, 4), rng.integers(1, 4))
    r = sylvester_resultant_w(f, g)
    assert r.degree <= resultant_degree_bound(f, g)
    for u in rng.uniform(-1.5, 1.5, size=3):
        m = np.array(sylvester_matrix(list(f.coeffs_in_w_at(u)), list(g.coeffs_in_w_at(u))), dtype=float)
        direct = np.linalg.det(m)
        scale = np.prod(np.linalg.norm(m, axis=1))
        assert abs(float(r(u)) - direct) <= 1e-8 * scale


# ---------------------------------------------------------------------------
# real roots
# ---------------------------------------------------------------------------

def test_simple_roots():
    assert sorted(real_roots(Poly1([-4, 0, 1]))) == pytest.approx([-2, 2], abs=1e-15)
    assert real_roots(Poly1([1, 0, 1])) == []
    assert real_roots(Poly1([3.0])) == []


def test_multiplicities():
    p = Poly1.from_roots([1, 1, 2, -3, -3, -3])
    roots = real_roots(p)
    assert [float(r) for r in roots] == pytest.approx([-3, 1, 2], abs=1e-9)
    assert [r.multiplicity for r in roots] == [3, 2, 1]


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_constructed_roots_are_recovered(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 9))
    roots = np.sort(rng.uniform(-5, 5, size=k))
    while k > 1 and np.min(np.diff(roots)) < 0.05:
        roots = np.sort(rng.uniform(-5, 5, size=k))
    p = Poly1.from_roots(roots, lead=rng.uniform(0.5, 3) * rng.choice([-1, 1]))
    # complex conjugate pairs contribute no real roots
    for _ in range(int(rng.integers(0, 3))):
        re, im = rng.uniform(-3, 3), rng.uniform(0.2, 2)
        p = p * Poly1([re * re + im * im, -2 * re, 1.0])
    got = np.array([float(r) for r in real_roots(p)])
    assert got.shape == roots.shape
    assert np.max(np.abs(got - roots)) <= 1e-9 * max(1.0, np.max(np.abs(roots)))


def test_sturm_sequence_counts_roots():
    p = Poly1.from_roots([-1.5, 0.25, 4.0]) * Poly1([1.0, 0.0, 1.0])
    with _mp_context(40) as ctx:
        seq = sturm_sequence(p, ctx)

        def changes(x):
            vals = [q(ctx.mpf(x)) for q in seq]
            signs = [v > 0 for v in vals if v != 0]
            return sum(a != b for a, b in zip(signs, signs[1:]))

        assert changes(-10) - changes(10) == 3
        assert changes(0) - changes(10) == 2


def test_common_real_roots():
    p = Poly1.from_roots([1.0, 2.0, -4.0], var="w")
    q = Poly1.from_roots([2.0, 7.0], var="w")
    assert common_real_roots(p, q) == pytest.approx([2.0])
    assert common_real_roots(p, Poly1([0.5], "w")) == []
    assert sorted(common_real_roots(Poly1([], "w"), q)) == pytest.approx([2.0, 7.0])
    with pytest.raises(BothZero):
        common_real_roots(Poly1([], "w"), Poly1([], "w"))
