"""
Tests for candidate generation and the projection filters.
"""

import pytest

from models.errors import ConfigError
from models.schemas import EquivalenceStatus
from services.enumeration import (
    candidates,
    check_crossing_gate,
    enumerate_projections,
    projection_counts,
)
from services.moves import equivalent
from services.notation import EMPTY, Notation, is_canonical, is_prime_candidate
from services.realizability import is_realizable

TREFOIL = Notation([(1, 4), (3, 6), (5, 2)])


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 8), (3, 48)])
def test_candidate_counts(n, expected):
    assert sum(1 for _ in candidates(n)) == expected


def test_candidates_come_out_in_word_order():
    assert list(candidates(1)) == [Notation([(1, 2)]), Notation([(2, 1)])]
    for n in (2, 3):
        generated = list(candidates(n))
        assert generated == sorted(generated)
        assert len(set(generated)) == len(generated)


def test_candidates_need_a_crossing():
    with pytest.raises(ValueError):
        next(candidates(0))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_pruning_keeps_every_canonical_candidate(n):
    full = {v for v in candidates(n) if is_canonical(v)}
    pruned = {v for v in candidates(n, prune=True) if is_canonical(v)}
    assert pruned == full
    assert sum(1 for _ in candidates(n, prune=True)) <= sum(1 for _ in candidates(n))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_a_plain_filter(n):
    expected = [
        v for v in candidates(n)
        if is_canonical(v) and is_prime_candidate(v) and is_realizable(v).realizable
    ]
    assert enumerate_projections(n, workers=1) == expected


def test_small_enumerations():
    assert enumerate_projections(1, workers=1) == [Notation([(1, 2)])]
    assert TREFOIL in enumerate_projections(3, workers=1)


def test_two_crossing_projections_are_all_unknots():
    assert enumerate_projections(2, workers=1) == []
    drawable = [v for v in candidates(2) if is_realizable(v).realizable]
    assert drawable
    for v in drawable:
        assert equivalent(v, EMPTY, 4, 1000).status == EquivalenceStatus.CONNECTED


def test_projection_counts():
    raw = projection_counts(3, canonical=False, realizable=False, prime=False)
    assert raw == {1: 2, 2: 8, 3: 48}
    filtered = projection_counts(3)
    assert filtered[1] == 1
    assert filtered[3] == len(enumerate_projections(3, workers=1))
    realizable_only = projection_counts(3, canonical=False, prime=False)
    for n in raw:
        assert filtered[n] <= realizable_only[n] <= raw[n]


def test_crossing_gate():
    check_crossing_gate(8, allow_experimental=False)
    check_crossing_gate(9, allow_experimental=True)
    with pytest.raises(ConfigError):
        check_crossing_gate(9, allow_experimental=False)
    with pytest.raises(ConfigError):
        enumerate_projections(9, allow_experimental=False)
