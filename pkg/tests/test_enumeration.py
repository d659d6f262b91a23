import random
from fractions import Fraction
from math import gcd

from hypothesis import given, settings
from hypothesis import strategies as st

from ternary_cosets.cosets import coset, scale_shift
from ternary_cosets.enumeration import (
    QSeries,
    default_precision,
    representation_counts,
    short_vectors,
    theta_series,
)
from oracles import I3, box_scan, random_gram, theta_brute


def test_short_vectors_examples():
    sv = short_vectors(coset(I3, 1, (0, 0, 0)), 2)
    assert len(sv) == 19 and sv == box_scan(I3, 1, (0, 0, 0), 2)
    assert short_vectors(coset(I3, 2, (1, 1, 1)), 3) == sorted(
        (x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)
    )
    c = coset(I3, 12, (5, 5, 5))
    assert short_vectors(c, 74) == []
    assert (5, 5, 5) in short_vectors(c, 75)


def test_theta_examples():
    th = theta_series(coset(I3, 1, (0, 0, 0)), 9)
    assert [th[n] for n in range(10)] == [1, 6, 12, 8, 6, 24, 24, 0, 12, 30]
    th = theta_series(coset(I3, 2, (1, 1, 1)), 11)
    assert th[3] == 8 and th[11] == 24
    assert all(th[n] == 0 for n in range(11) if n != 3)
    assert theta_series(coset(I3, 12, (5, 5, 5)), 75)[75] >= 1


def test_default_precision():
    assert default_precision(coset(I3, 12, (5, 5, 5))) == 144
    assert default_precision(coset(I3, 1, (0, 0, 0))) == 1  # M = 4: 4 * 3/2 / 8


def _random_coset(rng):
    g = random_gram(rng, diag=(1, 5), off=2)
    a = rng.choice([1, 2, 3, 4, 5, 6])
    while True:
        nu = tuple(rng.randrange(a) for _ in range(3))
        if gcd(a, *nu) == 1:
            return coset(g, a, nu)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 60))
def test_short_vectors_match_box_scan(seed, bound):
    c = _random_coset(random.Random(seed))
    assert short_vectors(c, bound) == box_scan(c.gram, c.a, c.nu, bound)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_theta_counts(seed):
    rng = random.Random(seed)
    c = _random_coset(rng)
    th = theta_series(c, 40)
    assert th.as_list() == theta_brute(c.gram, c.a, c.nu, 40)
    assert all(v.denominator == 1 and v >= 0 for v in th.as_list())
    if c.a == 1:
        assert all(th[n] % 2 == 0 for n in range(1, 41))
    assert theta_series(scale_shift(c, -1), 40) == th


def test_qseries_algebra_and_json():
    f = QSeries(5, {0: 1, 3: Fraction(1, 2)})
    g = QSeries(4, {3: Fraction(1, 2), 4: 2})
    h = f - g
    assert h.precision == 4 and h.coeffs == {0: 1, 4: -2}
    assert (f + g)[3] == 1
    assert f.scale(2)[3] == 1
    assert QSeries.from_json(f.to_json()) == f
    assert f.to_json() == {"precision": 5, "coeffs": {"0": "1", "3": "1/2"}}
    assert f.differences(QSeries(5, {0: 1})) == [3]


def test_counts_partition_independent():
    c = coset(((2, 1, 0), (1, 3, 1), (0, 1, 4)), 3, (1, 2, 0))
    full = representation_counts(c, 120)
    assert representation_counts(c, 60) == full[:61]
