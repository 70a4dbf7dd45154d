# services/pattern-packing/tests/unit/test_permutation.py
import random
from fractions import Fraction

import pytest

from permpack.core.combination import FormalCombination, combination_density, parse_combination
from permpack.core.permutation import (
    Permutation,
    all_permutations,
    count_occurrences,
    delete_position,
    density,
    induced_subpermutation,
    longest_monotone,
    make_identity,
    make_reverse,
    parse_permutation,
    pattern_counts,
)
from permpack.errors import MalformedPermutationError, ParseError

SIGMA = "68153427"


def _random_permutation(rng: random.Random, n: int) -> Permutation:
    word = list(range(1, n + 1))
    rng.shuffle(word)
    return Permutation(tuple(word))


def test_parse_compact_and_comma_forms():
    """Digits and comma-separated words parse to the same word"""
    assert parse_permutation(SIGMA).word == (6, 8, 1, 5, 3, 4, 2, 7)
    assert parse_permutation("6,8,1,5,3,4,2,7") == parse_permutation(SIGMA)
    assert parse_permutation("(132)").word == (1, 3, 2)
    assert parse_permutation("1") == make_identity(1)
    assert len(parse_permutation("")) == 0


def test_parse_rejects_non_bijections():
    with pytest.raises(MalformedPermutationError):
        parse_permutation("1,1,3")
    with pytest.raises(MalformedPermutationError):
        parse_permutation("124")
    with pytest.raises(ParseError):
        parse_permutation("12a")


def test_long_permutations_print_with_commas():
    sigma = Permutation(tuple(range(10, 0, -1)))
    assert str(sigma) == "10,9,8,7,6,5,4,3,2,1"
    assert parse_permutation(str(sigma)) == sigma
    assert str(make_identity(3)) == "123"


def test_identity_and_reverse():
    assert make_identity(3).word == (1, 2, 3)
    assert make_reverse(3).word == (3, 2, 1)
    assert make_reverse(1) == make_identity(1)
    with pytest.raises(ValueError):
        make_identity(-1)


def test_symmetries():
    sigma = parse_permutation(SIGMA)
    assert sigma.reverse().word == (7, 2, 4, 3, 5, 1, 8, 6)
    assert sigma.complement().word == (3, 1, 8, 4, 6, 5, 7, 2)
    assert sigma.inverse().inverse() == sigma
    assert sigma.reverse_complement() == sigma.complement().reverse()


def test_induced_subpermutation_examples():
    sigma = parse_permutation(SIGMA)
    assert induced_subpermutation(sigma, [1, 3, 6]).word == (3, 1, 2)
    assert induced_subpermutation(sigma, [2, 4, 7, 8]).word == (4, 2, 1, 3)
    assert induced_subpermutation(sigma, range(1, 9)) == sigma


def test_induced_subpermutation_rejects_bad_positions():
    sigma = parse_permutation(SIGMA)
    with pytest.raises(ValueError):
        induced_subpermutation(sigma, [3, 1])
    with pytest.raises(IndexError):
        induced_subpermutation(sigma, [1, 9])


def test_count_occurrences_examples():
    assert count_occurrences(parse_permutation("12"), parse_permutation("123")) == 3
    assert count_occurrences(parse_permutation("21"), parse_permutation("2143")) == 2
    assert count_occurrences(parse_permutation("12"), make_reverse(5)) == 0
    assert count_occurrences(parse_permutation("123"), parse_permutation("12")) == 0


def test_density_examples():
    assert density(parse_permutation("21"), parse_permutation("2143")).exact == Fraction(1, 3)
    assert density(parse_permutation("123"), parse_permutation("12")).exact == 0
    sigma = parse_permutation(SIGMA)
    assert density(sigma, sigma).exact == 1
    assert density(parse_permutation("21"), parse_permutation("2143")).to_json() == {
        "num": 1,
        "den": 3,
        "float": pytest.approx(1 / 3),
    }


def test_count_matches_pattern_counts():
    """The DFS count and the one-pass tally agree on random instances"""
    rng = random.Random(7)
    for _ in range(20):
        sigma = _random_permutation(rng, rng.randint(3, 8))
        m = rng.randint(1, 3)
        counts = pattern_counts(sigma, m)
        for tau in all_permutations(m):
            assert counts.get(tau.word, 0) == count_occurrences(tau, sigma)


def test_reverse_complement_duality():
    rng = random.Random(11)
    for _ in range(30):
        sigma = _random_permutation(rng, rng.randint(1, 8))
        tau = _random_permutation(rng, rng.randint(1, 4))
        assert count_occurrences(tau, sigma) == count_occurrences(
            tau.reverse_complement(), sigma.reverse_complement()
        )


def test_averaging_identity():
    """p(tau, sigma) is the mean of p(tau, sigma minus one point)"""
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(3, 7)
        sigma = _random_permutation(rng, n + 1)
        tau = _random_permutation(rng, rng.randint(1, n))
        mean = sum(
            (density(tau, delete_position(sigma, j)).exact for j in range(1, n + 2)), Fraction(0)
        ) / (n + 1)
        assert density(tau, sigma).exact == mean


def test_densities_over_s_m_sum_to_one():
    rng = random.Random(5)
    for m in range(1, 5):
        sigma = _random_permutation(rng, 7)
        total = sum((density(tau, sigma).exact for tau in all_permutations(m)), Fraction(0))
        assert total == 1


def test_all_permutations_is_lexicographic():
    perms = list(all_permutations(3))
    assert [str(p) for p in perms] == ["123", "132", "213", "231", "312", "321"]
    assert perms == sorted(perms)


def test_longest_monotone():
    assert longest_monotone((2, 1, 4, 3)) == 2
    assert longest_monotone((2, 1, 4, 3), increasing=False) == 2
    assert longest_monotone(parse_permutation(SIGMA).word) == 4
    assert longest_monotone(()) == 0


def test_combination_density_examples():
    f = parse_combination("123 + 321")
    assert combination_density(f, parse_permutation("2143")).exact == 0
    assert combination_density(f, make_identity(5)).exact == 1
    doubled = FormalCombination.single(make_identity(2), 2)
    assert combination_density(doubled, parse_permutation("12")).exact == 2


def test_parse_combination_grammar():
    f = parse_combination("1*123 + 1/2*321 - 2*21")
    assert f.terms == {
        make_identity(3): Fraction(1),
        make_reverse(3): Fraction(1, 2),
        make_reverse(2): Fraction(-2),
    }
    assert not f.is_conical
    assert f.max_pattern_length == 3
    assert parse_combination("−1*12").terms == {make_identity(2): Fraction(-1)}
    assert parse_combination("1*12 - 1*12").terms == {}


def test_parse_combination_errors():
    for text in ["", "1*12 +", "x*12", "1*12 1*21"]:
        with pytest.raises(ParseError):
            parse_combination(text)


def test_combination_string_round_trip():
    f = parse_combination("1*123 + 1*321")
    assert str(f) == "1*123 + 1*321"
    assert parse_combination(str(f)) == f
