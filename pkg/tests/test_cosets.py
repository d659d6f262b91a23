import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ternary_cosets import linalg as la
from ternary_cosets.cosets import (
    ConductorMismatch,
    Coset,
    Lattice,
    SchemaError,
    canonical_key,
    coset,
    coset_from_json,
    make_coset,
    scale_shift,
)
from ternary_cosets.enumeration import short_vectors, theta_series
from oracles import I3, qform, random_gram, random_unimodular


def test_discriminant_and_level():
    assert Lattice.from_gram(I3).discriminant == 1
    assert Lattice.from_gram(((1, 0, 0), (0, 1, 0), (0, 0, 3))).discriminant == 3
    assert Lattice.from_gram(I3).level == 1
    assert Lattice.from_gram(((1, 0, 0), (0, 1, 0), (0, 0, 3))).level == 3
    assert Lattice.from_gram(((1, 0, 0), (0, 2, 0), (0, 0, 2))).level == 2
    assert Lattice.from_gram(((2, 1, 1), (1, 2, 1), (1, 1, 2))).level == 4


def test_invalid_lattices():
    with pytest.raises(ValueError):
        Lattice.from_gram(((1, 2, 0), (2, 1, 0), (0, 0, 1)))  # indefinite
    with pytest.raises(ValueError):
        Lattice.from_gram(((1, 1, 0), (0, 1, 0), (0, 0, 1)))  # not symmetric
    L = Lattice.from_gram(I3)
    with pytest.raises(ValueError):
        Lattice(L.ambient, ((Fraction(1, 2), 0, 0), (0, 1, 0), (0, 0, 1)))  # Q(e1/2) = 1/4


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_invariants_under_basis_change(seed):
    rng = random.Random(seed)
    L = Lattice.from_gram(random_gram(rng))
    L2 = L.with_basis_change(random_unimodular(rng))
    assert L.discriminant == L2.discriminant
    assert L.level == L2.level


def test_make_coset_examples():
    L = Lattice.from_gram(I3)
    c = make_coset(L, 12, (5, 5, 5))
    assert c.a == 12 and c.nu == (5, 5, 5)
    assert make_coset(L, 12, (17, 5, 5)).key == c.key
    with pytest.raises(ConductorMismatch) as err:
        make_coset(L, 12, (4, 4, 4))
    e = err.value
    assert e.conductor == 3
    ref = e.refactored
    assert ref.a == 3 and ref.lattice.gram == ((16, 0, 0), (0, 16, 0), (0, 0, 16))
    # same point set: compare elements of norm <= 600 in ambient coordinates
    orig = {tuple(x) for x in short_vectors(Coset(L, 1, (0, 0, 0)), 600) if all((t - 4) % 12 == 0 for t in x)}
    new = {tuple(int(v) for v in ref.lattice.to_ambient(y)) for y in short_vectors(ref, 600)}
    assert orig == new and orig


def test_canonical_keys():
    c = coset(I3, 2, (1, 0, 0))
    perm = ((0, 1, 0), (1, 0, 0), (0, 0, 1))
    assert c.with_lattice_basis(perm).key == c.key
    assert coset(I3, 12, (5, 5, 5)).key == coset(I3, 12, (5, 5, -7)).key
    assert coset(I3, 2, (1, 0, 0)).key != coset(I3, 2, (1, 1, 1)).key
    assert theta_series(coset(I3, 2, (1, 0, 0)), 1)[1] != theta_series(coset(I3, 2, (1, 1, 1)), 1)[1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_key_respects_point_sets(seed):
    rng = random.Random(seed)
    a = rng.choice([1, 2, 3, 4, 6, 12])
    g = random_gram(rng)
    nu = [rng.randrange(a) for _ in range(3)]
    nu[0] = 1 % a if a > 1 else 0
    c = coset(g, a, nu)
    u = random_unimodular(rng)
    assert c.with_lattice_basis(u).key == c.key
    s = rng.choice([s for s in range(1, 2 * a + 2) if la.xgcd(s, a)[0] == 1])
    back = scale_shift(scale_shift(c, s), la.mod_inverse(s, a))
    assert back.key == c.key


def test_scale_shift_examples():
    c = coset(I3, 12, (5, 5, 5))
    assert scale_shift(c, 5).nu == (1, 1, 1)
    assert scale_shift(c, 1) == c
    assert scale_shift(scale_shift(c, 7), la.mod_inverse(7, 12)) == c
    with pytest.raises(ValueError):
        scale_shift(c, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sampled_values_are_nonnegative_integers(seed):
    rng = random.Random(seed)
    a = rng.choice([1, 2, 3, 4, 6])
    g = random_gram(rng)
    nu = (1 % a, rng.randrange(a), rng.randrange(a)) if a > 1 else (0, 0, 0)
    c = coset(g, a, nu)
    for _ in range(100):
        x = c.sample(rng)
        q = c.Q(x)
        assert q == qform(g, x) and q >= 0
        assert (q == 0) == (x == (0, 0, 0))


def test_json_roundtrip_and_schema():
    c = coset_from_json({"gram": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "a": "12", "nu": [17, 5, 5]})
    assert c.nu == (5, 5, 5)
    assert coset_from_json(c.to_json()).key == c.key
    for bad in (
        {"gram": [[1, 0], [0, 1]], "a": 1, "nu": [0, 0, 0]},
        {"gram": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "a": 0, "nu": [0, 0, 0]},
        {"gram": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "a": 1},
        {"gram": [[1, 0, 0], [0, -1, 0], [0, 0, 1]], "a": 1, "nu": [0, 0, 0]},
        {"gram": [[1, 0, 0], [0, 1, 0], [0, 0, "x"]], "a": 1, "nu": [0, 0, 0]},
        [1, 2, 3],
    ):
        with pytest.raises(SchemaError):
            coset_from_json(bad)
    big = coset_from_json({"gram": [[1, 0, 0], [0, 1, 0], [0, 0, str(10**30)]], "a": 1, "nu": [0, 0, 0]})
    assert big.to_json()["gram"][2][2] == str(10**30)
