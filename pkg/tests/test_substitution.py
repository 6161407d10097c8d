import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cshape.errors import InvalidInput, ResourceError
from cshape.substitution import (
    Substitution, fixed_points, hamming_distance, incidence, is_bijective, is_bijective_on_extremities,
    is_primitive, is_reduced, iterate, k_set, k_set_oracle, limit_distances, pc4_power,
    product_substitution, recode, reduce, substitution_1d,
)

from conftest import load_example

EXAMPLES = ["tm1d", "tm2d", "table", "twindragon", "gasket", "rocket", "shooter", "nonpolytope",
            "nonselfsimilar", "nonlinear", "tm_doubling", "height_product"]


def test_construction_rejects_bad_digit_sets():
    with pytest.raises(InvalidInput):
        Substitution("ab", [[2]], [(0,), (2,)], {"a": "ab", "b": "ba"})
    with pytest.raises(InvalidInput):
        Substitution("ab", [[1]], [(0,)], {"a": "a", "b": "b"})
    with pytest.raises(InvalidInput):
        Substitution("ab", [[2]], [(0,), (1,)], {"a": "ac", "b": "ba"})


def test_k_sets_of_thue_morse():
    assert k_set(load_example("tm1d")) == [(-1,), (0,)]
    assert k_set(load_example("tm2d")) == [(-1, -1), (-1, 0), (0, -1), (0, 0)]


@pytest.mark.parametrize("name", EXAMPLES)
def test_k_set_matches_periodic_point_enumeration(name):
    z = load_example(name)
    assert z.k_set == k_set_oracle(z, 4)


@st.composite
def one_dim_digit_sets(draw):
    length = draw(st.integers(2, 4))
    digits = [0] + [r + length * draw(st.integers(-2, 2)) for r in range(1, length)]
    return length, digits


@given(one_dim_digit_sets())
def test_k_set_oracle_random_1d(data):
    length, digits = data
    z = Substitution(["a"], [[length]], [(f,) for f in digits], {"a": ["a"] * length})
    K = z.k_set
    # every periodic point of the digit map has period at most |K|
    assert K == k_set_oracle(z, max(1, len(K)))


@pytest.mark.parametrize("name", ["tm2d", "nonselfsimilar", "rocket"])
def test_k_bar_contains_k(name):
    z = load_example(name)
    assert set(z.k_set) <= set(z.k_bar)
    # K is invariant under the digit map
    assert {z.digits.quotient(k) for k in z.k_set} == set(z.k_set)


def _primitive_bruteforce(z):
    m = np.array(incidence(z), dtype=np.int64)
    k = z.size
    p = m.copy()
    for n in range(1, k * k - 2 * k + 3):
        if (p > 0).all():
            return True, n
        p = np.minimum(p @ m, 1)
    return False, None


@pytest.mark.parametrize("name", EXAMPLES)
def test_primitivity_matches_matrix_powers(name):
    z = load_example(name)
    assert is_primitive(z) == _primitive_bruteforce(z)


def test_non_primitive_detected():
    z = substitution_1d({"a": "ab", "b": "bb"})
    assert is_primitive(z) == (False, None)


def test_bijectivity():
    assert is_bijective(load_example("tm2d"))
    assert is_bijective(load_example("table"))
    assert not is_bijective(load_example("nonlinear"))
    assert is_bijective_on_extremities(load_example("table"))


def test_iterate_respects_cell_cap():
    z = load_example("tm2d")
    pats = iterate(z, 3)
    assert len(pats["0"].support) == 64
    with pytest.raises(ResourceError):
        iterate(z, 12, cap=1000)


def test_product_matches_packaged_file():
    tm = substitution_1d({"0": "01", "1": "10"})
    dbl = substitution_1d({"a": "ab", "b": "aa"})
    prod = product_substitution([tm, dbl])
    packaged = load_example("tm_doubling")
    rename = {"0a": "0", "0b": "1", "1a": "2", "1b": "3"}
    order = [prod.support.index(f) for f in packaged.support]
    for a, img in prod.rules.items():
        assert [rename[img[i]] for i in order] == list(packaged.rules[rename[a]])


def test_reduction_and_idempotence():
    z = load_example("tm_doubling")
    info = is_reduced(z)
    assert not info.reduced and info.eta == 0
    assert info.classes == [["0", "1"], ["2", "3"]]
    red, _ = reduce(z)
    assert is_reduced(red).reduced
    again, _ = reduce(red)
    assert again.key() == red.key()


@pytest.mark.parametrize("name", ["tm2d", "table", "nonlinear", "tm_doubling"])
def test_limit_distance_bounds_finite_distances(name):
    z = load_example(name)
    lim = limit_distances(z)
    for a, b in itertools.permutations(range(z.size), 2):
        ds = [hamming_distance(z, z.alphabet[a], z.alphabet[b], n) for n in range(1, 6)]
        assert all(x >= y for x, y in zip(ds, ds[1:]))
        assert ds[-1] >= lim[(a, b)]


def test_eta_matches_minimum_of_limit_distances():
    z = load_example("table")
    lim = limit_distances(z)
    info = is_reduced(z)
    assert info.eta == min(v for (a, b), v in lim.items() if a != b)
    assert info.reduced


def test_pc4_power():
    assert pc4_power(load_example("tm2d")) == 1


def test_recoding_conjugacy_on_patches():
    z = load_example("tm1d")
    rec = recode(z, 1)
    new = rec.substitution
    assert is_primitive(new)[0]
    # psi2 after psi1 is the identity: decode the recoded image letter by letter
    for a, pattern in rec.letters.items():
        assert rec.zero_code[a] == pattern[rec.shape.index((0,))]
        assert rec.block_code[pattern] == a
    for a in new.alphabet:
        img = [rec.zero_code[b] for b in new.rules[a]]
        old = z.apply({(0,): z.index[rec.zero_code[a]]})
        assert img == [z.alphabet[old[f]] for f in z.support]


def test_fixed_point_seeds_are_legal():
    z = load_example("tm2d")
    # the origin column swaps the letters, so only the square has fixed points
    assert fixed_points(z) == []
    seeds = fixed_points(z.power(2))
    assert len(seeds) == 8
    for s in seeds:
        assert s.support == ((-1, -1), (-1, 0), (0, -1), (0, 0))
