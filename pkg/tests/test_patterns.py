import itertools
from fractions import Fraction

import pytest

from cshape.patterns import (
    Pattern, difference_sets, is_admissible, language, language_shape, normalize_shape, occurrences,
    pattern_free_ball, period_search, phase_table, recognizability_radius, windows,
)
from cshape.substitution import reduce

from conftest import load_example

K2 = ((-1, -1), (-1, 0), (0, -1), (0, 0))

# the eight 2x2 patterns printed for two-dimensional Thue-Morse, top row first
TM_PRINTED = [("01", "10"), ("10", "01"), ("10", "10"), ("01", "01"),
              ("00", "11"), ("11", "00"), ("00", "00"), ("11", "11")]


def from_picture(top: str, bottom: str) -> Pattern:
    return Pattern.from_items({(-1, 0): top[0], (0, 0): top[1], (-1, -1): bottom[0], (0, -1): bottom[1]}.items())


def windows_of_iterates(z, shape, n_max):
    """Definition-level oracle: windows of zeta^n(a) for n <= n_max."""
    out = set()
    for n in range(1, n_max + 1):
        p = z.power(n)
        for a in range(z.size):
            out |= windows(p.apply({tuple([0] * z.d): a}), shape)
    return out


def test_tm_language_matches_printed_patterns(tm):
    assert set(language(tm, K2)) == {from_picture(*p) for p in TM_PRINTED}


@pytest.mark.parametrize("name", ["tm2d", "table", "nonlinear", "tm1d"])
def test_language_matches_windows_of_iterates(name):
    z = load_example(name)
    shape = normalize_shape(z.k_set)
    assert language_shape(z, shape) == frozenset(windows_of_iterates(z, shape, 5))


def test_box_language_matches_windows(table):
    box = normalize_shape(itertools.product(range(3), range(2)))
    assert language_shape(table, box) == frozenset(windows_of_iterates(table, box, 5))


def test_admissibility(tm):
    assert is_admissible(tm, from_picture("01", "10"))
    assert not is_admissible(tm, from_picture("01", "11"))


def _disagreements(patterns):
    out = set()
    for p, q in itertools.combinations(patterns, 2):
        W = tuple(k for k, a, b in zip(p.support, p.letters, q.letters) if a != b)
        if W:
            out.add(W)
    return out


def test_tm_difference_sets_from_printed_language(tm):
    # the printed patterns form a subgroup of order 8 of (Z/2)^K under XOR,
    # so the disagreement sets are its 7 nonzero elements
    printed = [from_picture(*p) for p in TM_PRINTED]
    expected = _disagreements(printed)
    computed = {ds.W for ds in difference_sets(tm)}
    assert computed == expected
    assert len(computed) == 7
    for ds in difference_sets(tm):
        a, b = ds.witnesses
        assert tuple(k for k, x, y in zip(K2, a.letters, b.letters) if x != y) == ds.W


def test_table_difference_sets(table):
    computed = {ds.W for ds in difference_sets(table)}
    assert len(computed) == 15
    assert computed == _disagreements(language(table, K2))


def test_phase_recognition(tm):
    R = recognizability_radius(tm, 3)
    assert R is not None
    table = phase_table(tm, R)
    assert set(table.values()) == set(range(tm.q))


def test_periods():
    assert period_search(load_example("tm2d"), 2) == []
    red, _ = reduce(load_example("tm_doubling"))
    assert (0, 1) in period_search(red, 2)
    assert (1, 0) not in period_search(red, 2)


def test_occurrences_and_pattern_free_ball():
    patch = {(x, y): "a" for x in range(7) for y in range(7)}
    patch[(0, 0)] = "b"
    w = Pattern.from_items([((0, 0), "b")])
    assert occurrences(patch, w) == [(0, 0)]
    c = pattern_free_ball(patch, w, Fraction(5, 2))
    assert c is not None
    assert pattern_free_ball(patch, w, 4) is None
