import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M4_EXAMPLE, copulas
from mevmix.copulas import M4, Comonotone, GumbelLogistic, Independence, from_dict
from mevmix.errors import DomainError, ShapeError, UnsupportedOperationError
from mevmix.subsets import SubsetMask


class TestExponentExamples:
    def test_independence(self):
        assert Independence(2).exponent([1, 1]) == 2.0

    def test_comonotone(self):
        assert Comonotone(2).exponent([0.3, 0.7]) == 0.7

    def test_m4_hand_value(self, m4_example):
        # max(0.6, 0.2) + max(0.4, 0.8)
        assert m4_example.exponent([1, 1]) == pytest.approx(1.4, abs=1e-15)

    def test_gumbel(self):
        assert GumbelLogistic(2, 0.5).exponent([1, 1]) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_infinite_argument(self, m4_example):
        assert Independence(2).exponent([math.inf, 1]) == math.inf
        assert m4_example.exponent([math.inf, 0]) == math.inf
        # a zero coefficient must not turn inf into nan
        c = M4([[[1.0, 0.0], [0.0, 1.0]]])
        assert c.exponent([math.inf, 1.0]) == math.inf

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            Independence(2).exponent([-1, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            Independence(3).exponent([1, 1])

    def test_vectorized_rows(self, m4_example):
        x = np.array([[1, 1], [2, 2], [0, 1]])
        np.testing.assert_allclose(m4_example.exponent(x), [1.4, 2.8, 1.0], rtol=1e-15)


class TestCdfExamples:
    def test_independence(self):
        assert Independence(2).cdf([0.5, 0.5]) == 0.25

    def test_comonotone(self):
        assert Comonotone(2).cdf([0.5, 0.9]) == pytest.approx(0.5, rel=1e-15)

    def test_m4(self, m4_example):
        assert m4_example.cdf([math.exp(-1)] * 2) == pytest.approx(math.exp(-1.4), rel=1e-14)

    def test_m4_product_of_minima(self, m4_example):
        # direct product form prod_{l,k} min_i u_i**a_lki
        u = np.array([0.3, 0.7])
        a = np.array(M4_EXAMPLE[0])
        direct = np.prod([min(u ** row) for row in a])
        assert m4_example.cdf(u) == pytest.approx(direct, rel=1e-14)

    def test_zero_coordinate(self, m4_example):
        assert m4_example.cdf([0.0, 0.5]) == 0.0
        assert Independence(3).cdf([0.2, 0.0, 1.0]) == 0.0

    @pytest.mark.parametrize("u", [[1.2, 0.5], [-0.1, 0.5]])
    def test_outside_unit_square(self, u):
        with pytest.raises(DomainError):
            Independence(2).cdf(u)


class TestSubcopula:
    def test_independence_singleton(self):
        c = Independence(4).subcopula(SubsetMask.from_indices([2], 4))
        assert c == Independence(1)
        assert c.cdf([0.37]) == pytest.approx(0.37)

    def test_m4_singleton_column_sum(self, m4_example):
        c = m4_example.subcopula([1])
        assert c.d == 1
        assert c.exponent([2.5]) == pytest.approx(2.5, rel=1e-15)

    def test_comonotone(self):
        assert Comonotone(3).subcopula([0, 2]) == Comonotone(2)

    def test_m4_subcopula_is_derived(self):
        c = M4([[[0.5, 0.5, 0.0], [0.5, 0.5, 1.0]]]).subcopula([0, 2])
        assert c.derived
        assert c.validate() == []
        with pytest.raises(UnsupportedOperationError):
            c.sample(10, rng=0)

    def test_empty_mask(self):
        with pytest.raises(DomainError):
            Independence(2).subcopula([])

    @given(copulas(d=4), st.lists(st.floats(0.01, 0.99), min_size=4, max_size=4), st.integers(1, 14))
    @settings(max_examples=200, deadline=None)
    def test_consistency_with_parent(self, c, u, bits):
        a = SubsetMask(bits, 4)
        full = np.ones(4)
        idx = list(a.indices)
        full[idx] = np.array(u)[idx]
        assert c.cdf(full) == c.subcopula(a).cdf(np.array(u)[idx])


class TestValidate:
    def test_m4_column_sum_violation(self):
        problems = M4([[[0.5, 0.6], [0.4, 0.4]]]).validate()
        assert len(problems) == 1
        assert "column 1" in problems[0] and "0.9" in problems[0]

    def test_gumbel_r_out_of_range(self):
        assert any("out of (0,1]" in p for p in GumbelLogistic(2, 1.5).validate())

    def test_m4_example_ok(self, m4_example):
        assert m4_example.validate() == []

    def test_negative_coefficient(self):
        assert any("negative" in p for p in M4([[[1.2, 1.0], [-0.2, 0.0]]]).validate())


class TestJsonRoundTrip:
    @pytest.mark.parametrize(
        "doc",
        [{"kind": "independence"}, {"kind": "comonotone"}, {"kind": "gumbel", "r": 0.5},
         {"kind": "m4", "a": M4_EXAMPLE}],
    )
    def test_roundtrip(self, doc):
        c = from_dict(doc, 2)
        assert c.to_dict() == doc

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            from_dict({"kind": "clayton"}, 2)


# structural properties ---------------------------------------------------------


@given(copulas(), st.data())
@settings(max_examples=300, deadline=None)
def test_max_stability(c, data):
    u = np.array(data.draw(st.lists(st.floats(0.001, 0.999), min_size=c.d, max_size=c.d)))
    for t in (0.5, 2.0, 3.7):
        assert c.cdf(u**t) == pytest.approx(c.cdf(u) ** t, rel=1e-12)


@given(copulas(), st.data())
@settings(max_examples=300, deadline=None)
def test_homogeneity_and_bounds(c, data):
    x = np.array(data.draw(st.lists(st.floats(0.0, 50.0, allow_subnormal=False), min_size=c.d, max_size=c.d)))
    t = data.draw(st.floats(0.01, 100.0))
    ell = c.exponent(x)
    assert c.exponent(t * x) == pytest.approx(t * ell, rel=1e-12, abs=1e-300)
    assert x.max() * (1 - 1e-12) <= ell <= x.sum() * (1 + 1e-12)


@given(copulas(), st.data())
@settings(max_examples=200, deadline=None)
def test_uniform_margins_of_cdf(c, data):
    i = data.draw(st.integers(0, c.d - 1))
    v = data.draw(st.floats(0.0, 1.0))
    u = np.ones(c.d)
    u[i] = v
    assert c.cdf(u) == pytest.approx(v, rel=1e-12, abs=1e-300)


@given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3))
def test_gumbel_one_is_independence(u):
    assert abs(GumbelLogistic(3, 1.0).cdf(u) - Independence(3).cdf(u)) <= 1e-15


# samplers ----------------------------------------------------------------------


def test_comonotone_sample_equal_coordinates():
    u = Comonotone(2).sample(1000, rng=1)
    assert np.array_equal(u[:, 0], u[:, 1])


def test_independence_sample_uncorrelated():
    u = Independence(2).sample(100_000, rng=np.random.default_rng(2))
    r = np.corrcoef(u.T)[0, 1]
    assert abs(r) <= 3 / math.sqrt(u.shape[0])


def _cdf_z(c, points, n, seed):
    u = c.sample(n, rng=np.random.default_rng(seed))
    out = []
    for p in points:
        exact = c.cdf(p)
        emp = (u <= p).all(axis=1).mean()
        out.append((emp - exact) / math.sqrt(exact * (1 - exact) / n))
    return np.array(out)


def test_m4_sampler_joint_cdf(m4_example):
    z = _cdf_z(m4_example, [np.array([0.5, 0.5])], 1_000_000, 8)
    assert np.all(np.abs(z) <= 3), z


@pytest.mark.parametrize("c", [GumbelLogistic(3, 0.4), M4([[[0.2, 0.5, 0.0], [0.3, 0.0, 0.6], [0.5, 0.5, 0.4]]])])
def test_sampler_joint_cdf_grid(c):
    pts = [np.full(c.d, v) for v in (0.3, 0.6, 0.9)] + [np.array([0.4, 0.8, 0.6])]
    z = _cdf_z(c, pts, 1_000_000, 9)
    assert np.all(np.abs(z) <= 3), z


@pytest.mark.parametrize("c", [Independence(3), Comonotone(2), GumbelLogistic(2, 0.3), M4(M4_EXAMPLE)])
def test_sampler_uniform_margins(c):
    u = c.sample(200_000, rng=np.random.default_rng(4))
    assert u.shape == (200_000, c.d)
    assert np.all((u > 0) & (u < 1))
    # P(U_i <= 0.3) for each margin
    se = math.sqrt(0.3 * 0.7 / u.shape[0])
    assert np.all(np.abs((u <= 0.3).mean(axis=0) - 0.3) <= 3.5 * se)
