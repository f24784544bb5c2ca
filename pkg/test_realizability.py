"""
Tests for drawability: parity, interlacement and rotation-system search.
"""

import random

import pytest

from models.errors import UnrealizableError
from models.schemas import RealizabilityReason
from services.enumeration import candidates
from services.notation import EMPTY, Notation, mirror, orbit
from services.realizability import (
    faces_of,
    interlacement_graph,
    is_realizable,
    parity_check,
    require_witness,
    search_rotation_systems,
)

TREFOIL = Notation([(1, 4), (3, 6), (5, 2)])
# every chord meets an even number of others, yet chords {1,8} and {3,6}
# share exactly one interlaced neighbour
EVEN_BUT_NOT_PLANAR = Notation([(1, 8), (2, 9), (3, 6), (4, 7), (5, 10)])


def test_empty_and_curl_are_drawable():
    empty = is_realizable(EMPTY)
    assert empty.realizable
    assert empty.witness.face_count == 2
    curl = is_realizable(Notation([(1, 2)]))
    assert curl.realizable
    assert curl.witness.face_count == 3


def test_trefoil_witness():
    verdict = is_realizable(TREFOIL)
    assert verdict.realizable
    assert verdict.witness.bits == (0, 0, 1)
    assert verdict.witness.face_count == 5
    assert verdict.to_record().witness == "001"


def test_parity_violation():
    v = Notation([(1, 3), (2, 4)])
    assert not parity_check(v)
    verdict = is_realizable(v)
    assert not verdict.realizable
    assert verdict.reason == RealizabilityReason.PARITY_VIOLATION
    assert verdict.to_record().witness is None


def test_parity_is_not_sufficient():
    assert parity_check(EVEN_BUT_NOT_PLANAR)
    assert all(degree % 2 == 0 for _, degree in interlacement_graph(EVEN_BUT_NOT_PLANAR).degree())
    verdict = is_realizable(EVEN_BUT_NOT_PLANAR)
    assert not verdict.realizable
    assert verdict.reason == RealizabilityReason.NO_PLANAR_ROTATION
    assert not search_rotation_systems(EVEN_BUT_NOT_PLANAR, prune=False).realizable


def test_interlacement_graph_of_trefoil_is_a_triangle():
    graph = interlacement_graph(TREFOIL)
    assert graph.number_of_nodes() == 3
    assert graph.number_of_edges() == 3
    assert graph.nodes[0]["pair"] == (1, 4)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pruned_search_agrees_with_full_search(n):
    for v in candidates(n):
        pruned = search_rotation_systems(v, prune=True)
        full = search_rotation_systems(v, prune=False)
        assert pruned.realizable == full.realizable
        if full.realizable:
            assert pruned.witness.bits == full.witness.bits


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_witness_faces_partition_the_darts(n):
    for v in candidates(n):
        verdict = is_realizable(v)
        if not verdict.realizable:
            continue
        faces = faces_of(verdict.witness)
        assert len(faces) == n + 2
        darts = sorted(d for face in faces for d in face)
        assert darts == list(range(4 * n))


def test_require_witness_refuses_undrawable_input():
    with pytest.raises(UnrealizableError):
        require_witness(Notation([(1, 3), (2, 4)]))
    assert require_witness(TREFOIL).notation == TREFOIL


def random_notation(rng, n):
    evens = list(range(2, 2 * n + 1, 2))
    rng.shuffle(evens)
    return Notation(
        (odd, even) if rng.random() < 0.5 else (even, odd)
        for odd, even in zip(range(1, 2 * n, 2), evens)
    )


def _agrees_with_full_search(v):
    pruned = search_rotation_systems(v, prune=True)
    full = search_rotation_systems(v, prune=False)
    assert pruned.realizable == full.realizable, v
    if full.realizable:
        assert pruned.witness.bits == full.witness.bits


@pytest.mark.slow
def test_pruned_search_agrees_with_full_search_at_five_crossings():
    for v in candidates(5):
        _agrees_with_full_search(v)


def test_pruned_search_agrees_on_random_notations():
    rng = random.Random(1729)
    for _ in range(100):
        _agrees_with_full_search(random_notation(rng, rng.randint(1, 7)))


@pytest.mark.slow
def test_pruned_search_agrees_on_many_random_notations():
    rng = random.Random(4104)
    for _ in range(1000):
        _agrees_with_full_search(random_notation(rng, rng.randint(1, 8)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_verdict_ignores_relabeling_and_mirror(n):
    for v in candidates(n):
        expected = is_realizable(v).realizable
        assert is_realizable(mirror(v)).realizable == expected
        for u in orbit(v):
            assert is_realizable(u).realizable == expected


@pytest.mark.slow
def test_verdict_ignores_relabeling_and_mirror_on_random_notations():
    rng = random.Random(6174)
    for _ in range(1000):
        v = random_notation(rng, rng.randint(1, 8))
        expected = is_realizable(v).realizable
        assert is_realizable(mirror(v)).realizable == expected
        assert all(is_realizable(u).realizable == expected for u in orbit(v))
