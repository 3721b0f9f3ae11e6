import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_rwa.distributions import DirichletParams, dirichlet_mixed_moment
from dirichlet_rwa.moments import (
    CompositionTable,
    DirMultParams,
    MomentIndex,
    OrderCapExceeded,
    compositions,
    dirmult_normalization_check,
    dirmult_pmf,
    kerov_tsilevich_check,
    rwa_moment_closed_form,
    rwa_moment_expansion,
    weight_moment,
    weighted_average_moment,
)
from dirichlet_rwa.rwa import RwaSpec, scenario_of

VAN_ASSCHE = RwaSpec([[0.5, 0.5], [0.5, 0.5]])

entry = st.sampled_from([0.5, 1.0, 2.0, 3.5])


def test_moment_index_cap():
    MomentIndex((4, 4))
    with pytest.raises(OrderCapExceeded):
        MomentIndex((5, 4))
    with pytest.raises(ValueError):
        MomentIndex((-1, 0))


@given(st.integers(0, 6), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_composition_count(total, parts):
    comps = list(compositions(total, parts))
    assert len(comps) == math.comb(total + parts - 1, parts - 1)
    assert all(sum(c) == total for c in comps)
    assert comps == sorted(comps)  # lexicographic


@given(st.integers(2, 4), st.lists(st.integers(0, 3), min_size=1, max_size=3))
@settings(max_examples=50, deadline=None)
def test_composition_table_cardinality(n, s):
    table = CompositionTable(n, s)
    assert table.size == table.expected_size
    assert len(list(table.tuples())) == table.size


def test_expansion_examples():
    assert rwa_moment_expansion(VAN_ASSCHE, MomentIndex((1, 0))) == pytest.approx(0.5)
    assert rwa_moment_expansion(VAN_ASSCHE, MomentIndex((1, 1))) == pytest.approx(
        1 / 6, abs=1e-12
    )
    spec = RwaSpec([[1, 2], [3, 4]])
    lhs = rwa_moment_expansion(spec, MomentIndex((2, 1)))
    rhs = dirichlet_mixed_moment(DirichletParams((4, 6)), (2, 1))
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_closed_form_examples():
    assert rwa_moment_closed_form(VAN_ASSCHE, MomentIndex((0, 0))) == 1.0
    assert rwa_moment_closed_form(VAN_ASSCHE, MomentIndex((2, 0))) == pytest.approx(
        1 / 3, rel=1e-12
    )
    spec = RwaSpec([[1, 2, 3], [4, 5, 6]])
    assert rwa_moment_closed_form(spec, MomentIndex((1, 0, 0))) == pytest.approx(
        5 / 21, rel=1e-12
    )


def test_weight_moment_examples():
    spec = RwaSpec([[1, 2], [3, 4]])
    assert weight_moment(spec, (0, 0)) == 1.0
    assert weight_moment(spec, (1, 1)) == pytest.approx(21 / 110, rel=1e-12)
    assert weight_moment(VAN_ASSCHE, (1, 0)) == pytest.approx(0.5)


@given(
    st.integers(2, 3),
    st.integers(2, 3),
    st.data(),
)
@settings(max_examples=40, deadline=None)
def test_expansion_equals_closed_form(n, k, data):
    mat = data.draw(
        st.lists(st.lists(entry, min_size=k, max_size=k), min_size=n, max_size=n)
    )
    s = data.draw(
        st.lists(st.integers(0, 3), min_size=k, max_size=k).filter(
            lambda v: 1 <= sum(v) <= 5
        )
    )
    spec = RwaSpec(mat)
    a = rwa_moment_expansion(spec, MomentIndex(tuple(s)))
    b = rwa_moment_closed_form(spec, MomentIndex(tuple(s)))
    assert abs(a - b) / b < 1e-9


def test_moment_monotonicity_in_order():
    spec = RwaSpec([[0.5, 2.0], [1.0, 3.5]])
    prev = rwa_moment_closed_form(spec, MomentIndex((0, 0)))
    for s1 in range(1, 5):
        cur = rwa_moment_closed_form(spec, MomentIndex((s1, 1)))
        assert cur < prev
        prev = cur


def test_weighted_average_moment_dimension_mismatch():
    with pytest.raises(ValueError):
        weighted_average_moment(scenario_of(VAN_ASSCHE), MomentIndex((1, 0, 0)))


def test_dirmult_pmf_examples():
    assert dirmult_pmf(
        DirMultParams(DirichletParams((1, 1)), 1), (1, 0)
    ) == pytest.approx(0.5)
    assert dirmult_pmf(
        DirMultParams(DirichletParams((1, 1)), 2), (1, 1)
    ) == pytest.approx(1 / 3)
    assert dirmult_pmf(
        DirMultParams(DirichletParams((2, 3)), 0), (0, 0)
    ) == pytest.approx(1.0)


def test_dirmult_pmf_count_mismatch():
    with pytest.raises(ValueError):
        dirmult_pmf(DirMultParams(DirichletParams((1, 1)), 2), (1, 0))


def test_dirmult_normalization_examples():
    for alpha, trials in [((1, 1), 5), ((0.5, 0.5, 0.5), 4), ((2, 3, 5), 8)]:
        total = dirmult_normalization_check(
            DirMultParams(DirichletParams(alpha), trials)
        )
        assert abs(total - 1.0) <= 1e-10


def test_dirmult_trials_cap():
    with pytest.raises(OrderCapExceeded):
        dirmult_normalization_check(DirMultParams(DirichletParams((1, 1)), 1000))


@pytest.mark.parametrize("alpha", [(0.5, 0.5), (1.0, 2.0)])
@pytest.mark.parametrize(
    "t", [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.25, -0.4), (0.0, 0.0)]
)
def test_kerov_tsilevich_identity(alpha, t):
    series, product, tail = kerov_tsilevich_check(alpha, t, order=12)
    assert abs(series - product) <= tail + 1e-6


def test_kerov_tsilevich_quadrature_cross_check():
    # independent oracle: numerically integrate (1 - t'x)^(-A) against the
    # Beta density for one case and compare with the closed-form product
    from scipy.integrate import quad
    from scipy.special import beta as beta_fn

    a1, a2 = 1.0, 2.0
    t = np.array([0.3, -0.2])
    A = a1 + a2

    def integrand(x):
        dens = x ** (a1 - 1) * (1 - x) ** (a2 - 1) / beta_fn(a1, a2)
        return dens * (1 - (t[0] * x + t[1] * (1 - x))) ** (-A)

    lhs, _ = quad(integrand, 0, 1, epsabs=1e-12)
    rhs = (1 - t[0]) ** (-a1) * (1 - t[1]) ** (-a2)
    assert lhs == pytest.approx(rhs, abs=1e-8)
