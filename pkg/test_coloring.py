"""
Tests for the coloring counts and fingerprints.
"""

import random

import pytest
from pydantic import ValidationError

from models.errors import ColoringGuardError, UnrealizableError
from models.schemas import ColoringScheme, Fingerprint
from services.coloring import (
    count_colorings,
    count_colorings_bruteforce,
    crossing_signs,
    default_schemes,
    fingerprint,
    strands,
)
from services.enumeration import enumerate_projections
from services.moves import legal_moves
from services.notation import EMPTY, Notation, is_split_composite, mirror, orbit

TREFOIL = Notation([(1, 4), (3, 6), (5, 2)])
BIGON = Notation([(1, 4), (2, 3)])


def scheme(r, t):
    return ColoringScheme(r=r, t=t)


def test_strands():
    assert strands(EMPTY).strand_count == 1
    trefoil = strands(TREFOIL)
    assert trefoil.strand_count == 3
    assert all(len(set(crossing)) == 3 for crossing in trefoil.crossings)
    curl = strands(Notation([(1, 2)]))
    assert curl.strand_count == 1
    assert curl.crossings == ((0, 0, 0),)


def test_strands_refuse_undrawable_input():
    with pytest.raises(UnrealizableError):
        strands(Notation([(1, 3), (2, 4)]))


def test_crossing_signs():
    assert crossing_signs(TREFOIL) == (1, 1, 1)
    # the mirror's witness is the reflected embedding, so signs are only fixed up to a global flip
    assert len(set(crossing_signs(mirror(TREFOIL)))) == 1
    assert crossing_signs(EMPTY) == ()


@pytest.mark.parametrize("v, r, t, expected", [
    (TREFOIL, 3, 2, 9),
    (TREFOIL, 5, 4, 5),
    (TREFOIL, 7, 3, 49),
    (TREFOIL, 7, 5, 49),
    (TREFOIL, 7, 2, 7),
    (BIGON, 3, 2, 3),
    (EMPTY, 5, 2, 5),
    (Notation([(1, 2)]), 5, 2, 5),
    (Notation([(2, 1)]), 7, 3, 7),
])
def test_known_counts(v, r, t, expected):
    assert count_colorings(v, scheme(r, t)) == expected
    assert count_colorings_bruteforce(v, scheme(r, t)) == expected


def test_scheme_validation():
    assert ColoringScheme.parse("3:2") == scheme(3, 2)
    assert scheme(5, 3).label == "5:3"
    with pytest.raises(ValidationError):
        ColoringScheme(r=4, t=2)
    with pytest.raises(ValueError):
        ColoringScheme.parse("3-2")


def test_default_schemes():
    schemes = default_schemes()
    assert len(schemes) == 29
    assert schemes[0] == scheme(3, 2)
    assert all(s.t != 1 for s in schemes)
    assert [s.label for s in default_schemes([5])] == ["5:2", "5:3", "5:4"]


def test_bruteforce_guard():
    with pytest.raises(ColoringGuardError):
        count_colorings_bruteforce(TREFOIL, scheme(3, 2), limit=10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_linear_algebra_matches_bruteforce(n):
    schemes = [scheme(3, 2), scheme(4, 3), scheme(5, 2), scheme(5, 3), scheme(5, 4)]
    for v in enumerate_projections(n, workers=1):
        for s in schemes:
            count = count_colorings(v, s)
            assert count == count_colorings_bruteforce(v, s)
            assert count % s.r == 0


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6])
def test_linear_algebra_matches_bruteforce_exhaustive(n):
    schemes = [scheme(3, 2), scheme(4, 3), scheme(5, 2), scheme(5, 3), scheme(5, 4)]
    for v in enumerate_projections(n, workers=1):
        for s in schemes:
            assert count_colorings(v, s) == count_colorings_bruteforce(v, s)


def test_counts_survive_every_legal_move():
    schemes = [scheme(3, 2), scheme(5, 2), scheme(5, 4), scheme(7, 3), scheme(7, 2)]
    before = [count_colorings(TREFOIL, s) for s in schemes]
    for _, result in legal_moves(TREFOIL, 5):
        assert [count_colorings(result, s) for s in schemes] == before


def test_counts_survive_a_random_walk():
    rng = random.Random(20240611)
    schemes = [scheme(3, 2), scheme(5, 2), scheme(5, 3), scheme(7, 3)]
    before = [count_colorings(TREFOIL, s) for s in schemes]
    current = TREFOIL
    for _ in range(40):
        _, current = rng.choice(legal_moves(current, 5))
        assert [count_colorings(current, s) for s in schemes] == before


def test_fingerprint():
    schemes = [scheme(3, 2), scheme(5, 4)]
    trefoil = fingerprint(TREFOIL, schemes)
    assert trefoil.key() == ((3, 2, 9, 9), (5, 4, 5, 5))
    assert fingerprint(EMPTY, schemes).key() == ((3, 2, 3, 3), (5, 4, 5, 5))
    assert trefoil != fingerprint(EMPTY, schemes)
    with pytest.raises(ValueError):
        fingerprint(TREFOIL, [])


def test_fingerprint_ignores_mirror_and_relabeling():
    target = fingerprint(TREFOIL)
    assert fingerprint(mirror(TREFOIL)) == target
    for u in orbit(TREFOIL):
        assert fingerprint(u) == target


def test_fingerprint_record():
    fp = fingerprint(TREFOIL, [scheme(3, 2)])
    record = fp.to_record()
    assert record == '[{"r":3,"t":2,"counts":[9,9]}]'
    assert Fingerprint.from_record(record) == fp


@pytest.mark.slow
def test_counts_survive_ten_thousand_moves():
    rng = random.Random(19937)
    schemes = [scheme(3, 2), scheme(5, 2), scheme(5, 3), scheme(5, 4), scheme(7, 2), scheme(7, 3)]
    starts = [v for n in (3, 4, 5, 6) for v in enumerate_projections(n, workers=1)]
    applied = 0
    while applied < 10_000:
        current = rng.choice(starts)
        before = [count_colorings(current, s) for s in schemes]
        for _ in range(200):
            options = [result for _, result in legal_moves(current, 7) if not is_split_composite(result)]
            if not options:
                break
            current = rng.choice(options)
            assert [count_colorings(current, s) for s in schemes] == before, current
            applied += 1
