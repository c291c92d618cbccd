import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqss.gf import PrimeModulus
from vqss.sss import (
    AdditiveNofN,
    CensusCapExceeded,
    Component,
    Polynomial,
    ShamirScheme,
    Share,
    SharingError,
    census_mutual_information,
    component,
    deal,
    interpolate_at_zero,
    reconstruct,
    secrecy_census,
)


def xs_of(m, values):
    return [m(v) for v in values]


def test_constant_polynomial(rng):
    m = PrimeModulus(7)
    shares = deal(m(3), 1, xs_of(m, [1, 2]), rng)
    assert [(s.x.value, s.y.value) for s in shares] == [(1, 3), (2, 3)]


def test_forced_linear_polynomial():
    m = PrimeModulus(7)
    f = Polynomial.of(m, [3, 2])
    want = [(x, (3 + 2 * x) % 7) for x in (1, 2)]
    assert want == [(1, 5), (2, 0)]
    assert [(s.x.value, s.y.value) for s in f.shares(xs_of(m, [1, 2]))] == want


def test_component_examples():
    m = PrimeModulus(7)
    s1, s2 = Polynomial.of(m, [3, 2]).shares(xs_of(m, [1, 2]))
    xs = [s1.x, s2.x]
    c1, c2 = component(s1, xs), component(s2, xs)
    assert c1 == 5 * 2 * pow(2 - 1, -1, 7) % 7 == 3
    assert c2 == 0
    assert reconstruct([c1, c2]) == 3 == interpolate_at_zero([s1, s2])
    assert reconstruct([c2, c1]) == 3


def test_single_component_is_secret(rng):
    m = PrimeModulus(11)
    (sh,) = deal(m(9), 1, [m(4)], rng)
    assert component(sh, [m(4)]) == 9
    assert reconstruct([Component(component(sh, [m(4)]), "bob")]) == 9


@pytest.mark.parametrize("t, xs", [(3, [1, 2]), (2, [1, 1, 2]), (2, [0, 1, 2])])
def test_deal_rejects(rng, t, xs):
    m = PrimeModulus(7)
    with pytest.raises(SharingError):
        deal(m(1), t, [m(x) for x in xs], rng)


def test_deal_rejects_n_ge_d(rng):
    m = PrimeModulus(5)
    with pytest.raises(SharingError):
        deal(m(1), 2, xs_of(m, [1, 2, 3, 4, 4]), rng)
    m3 = PrimeModulus(3)
    with pytest.raises(SharingError):
        deal(m3(1), 2, xs_of(m3, [1, 2, 1]), rng)


def test_component_errors():
    m = PrimeModulus(7)
    sh = Share(m(3), m(1))
    with pytest.raises(SharingError):
        component(sh, xs_of(m, [1, 2]))
    with pytest.raises(SharingError):
        component(sh, xs_of(m, [3, 3]))
    with pytest.raises(SharingError):
        reconstruct([])


def test_coefficients_include_zero():
    # a_1 is uniform on all of GF(3), zero included
    m = PrimeModulus(3)
    seen = set()
    g = np.random.default_rng(1)
    for _ in range(200):
        s1, s2 = deal(m(0), 2, xs_of(m, [1, 2]), g)
        seen.add(s1.y.value)  # f(1) = a_1
    assert seen == {0, 1, 2}


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 31, 101]), st.data())
def test_any_authorized_subset_reconstructs(d, data):
    n = data.draw(st.integers(1, min(12, d - 1)))
    t = data.draw(st.integers(1, n))
    mod = PrimeModulus(d)
    xs_vals = data.draw(st.lists(st.integers(1, d - 1), min_size=n, max_size=n, unique=True))
    xs = [mod(v) for v in xs_vals]
    s = mod(data.draw(st.integers(0, d - 1)))
    shares = deal(s, t, xs, np.random.default_rng(data.draw(st.integers(0, 2**32))))
    m = data.draw(st.integers(t, n))
    subset = data.draw(st.permutations(shares))[:m]
    active = [sh.x for sh in subset]
    assert reconstruct([component(sh, active) for sh in subset]) == s
    assert interpolate_at_zero(subset[:t]) == s


@pytest.mark.parametrize("scheme_cls, t_of", [(ShamirScheme, lambda n: max(1, n - 1)),
                                              (AdditiveNofN, lambda n: n)])
@pytest.mark.parametrize("d", [5, 7, 13])
def test_cumulative_sum_contract(scheme_cls, t_of, d):
    mod = PrimeModulus(d)
    scheme = scheme_cls(mod)
    g = np.random.default_rng(d)
    for n in range(1, d):
        t = t_of(n)
        xs = [mod(v) for v in range(1, n + 1)]
        for _ in range(5):
            s = mod(int(g.integers(d)))
            shares = scheme.deal(s, t, xs, g)
            for m in range(t, n + 1):
                for subset in itertools.combinations(shares, m):
                    active = [sh.x for sh in subset]
                    if not scheme.authorized(t, active):
                        continue
                    assert reconstruct([scheme.component(sh, active) for sh in subset]) == s


def brute_census(d, t, fixed):
    counts = {a: 0 for a in range(d)}
    for coeffs in itertools.product(range(d), repeat=t):
        f = lambda x: sum(c * x**i for i, c in enumerate(coeffs)) % d
        if all(f(s.x.value) == s.y.value for s in fixed):
            counts[coeffs[0]] += 1
    return counts


def test_census_matches_brute_force():
    m = PrimeModulus(5)
    for fixed in ([], [Share(m(1), m(3))], [Share(m(2), m(0)), Share(m(4), m(4))]):
        assert secrecy_census(5, 3, fixed) == brute_census(5, 3, fixed)


def test_census_uniform_d5_t3():
    m = PrimeModulus(5)
    for x1, x2 in itertools.combinations(range(1, 5), 2):
        for y1, y2 in itertools.product(range(5), repeat=2):
            fixed = [Share(m(x1), m(y1)), Share(m(x2), m(y2))]
            c = secrecy_census(5, 3, fixed)
            # 125 polynomials, 25 share-value pairs: 5 consistent, one per secret
            assert c == brute_census(5, 3, fixed)
            assert set(c.values()) == {1}
            assert census_mutual_information(c) == 0.0


def test_census_unconstrained():
    assert secrecy_census(5, 2, []) == {a: 5 for a in range(5)}


def test_census_negative_control():
    m = PrimeModulus(5)
    fixed = Polynomial.of(m, [2, 3]).shares([m(1), m(4)])
    with pytest.raises(SharingError):
        secrecy_census(5, 2, fixed)
    c = secrecy_census(5, 2, fixed, allow_determined=True)
    assert c == {0: 0, 1: 0, 2: 1, 3: 0, 4: 0}
    assert census_mutual_information(c) == pytest.approx(np.log2(5))


def test_census_cap():
    with pytest.raises(CensusCapExceeded):
        secrecy_census(101, 4, [])


@pytest.mark.parametrize("d, t", [(3, 2), (3, 3), (5, 2), (5, 3)])
def test_perfection_small_cases(d, t):
    m = PrimeModulus(d)
    for r in range(t):
        for xs in itertools.combinations(range(1, d), r):
            for ys in itertools.product(range(d), repeat=r):
                c = secrecy_census(d, t, [Share(m(x), m(y)) for x, y in zip(xs, ys)])
                total = sum(c.values())
                assert all(Fraction(v, total) == Fraction(1, d) for v in c.values())
