"""
Candidate generation for a given crossing number.

Odd labels are matched to even labels (the parity condition), then each
pair is given one of its two over/under orientations. Candidates come out
in SignedWord order, so a prefix bound derived from the first chord cuts
branches that cannot be canonical.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterator, List, Optional, Tuple

from config.settings import settings
from models.errors import ConfigError
from services.notation import Notation, Pair, is_canonical, is_prime_candidate
from services.realizability import is_realizable

logger = logging.getLogger(__name__)

Chord = Tuple[int, int]


def check_crossing_gate(n: int, allow_experimental: Optional[bool] = None) -> None:
    """Refuse crossing numbers above the configured default unless experiments are enabled."""
    allowed = settings.allow_experimental if allow_experimental is None else allow_experimental
    if n > settings.max_default_crossings and not allowed:
        raise ConfigError(
            f"{n} crossings is above {settings.max_default_crossings}; "
            f"set KNOT_ALLOW_EXPERIMENTAL=1 to run it"
        )


def _cyclic_gap(a: int, b: int, size: int) -> int:
    gap = abs(a - b)
    return min(gap, size - gap)


def _matchings(n: int, first: Optional[int] = None, prune: bool = False) -> Iterator[Tuple[Chord, ...]]:
    """
    Perfect matchings of labels 1..2n joining odd to even, in order of the
    partner sequence. `first` fixes the partner of label 1. With `prune`
    every chord must be at least as long (cyclically) as the first one,
    which any canonical notation satisfies.
    """
    size = 2 * n
    partner = [0] * (size + 1)

    def extend(position: int, bound: int) -> Iterator[Tuple[Chord, ...]]:
        while position <= size and partner[position]:
            position += 1
        if position > size:
            yield tuple(sorted((p, partner[p]) for p in range(1, size + 1) if p < partner[p]))
            return
        choices = [first] if (position == 1 and first is not None) else range(position + 1, size + 1, 2)
        for q in choices:
            if partner[q]:
                continue
            if prune and position > 1 and _cyclic_gap(position, q, size) < bound:
                continue
            partner[position], partner[q] = q, position
            yield from extend(position + 1, q - 1 if position == 1 else bound)
            partner[position] = partner[q] = 0

    yield from extend(1, 0)


def _oriented(chords: Tuple[Chord, ...]) -> Iterator[Notation]:
    """All 2^n role assignments; lower label over comes first."""
    n = len(chords)
    for code in range(2 ** n):
        pairs: List[Pair] = []
        for k, (a, b) in enumerate(chords):
            under_first = (code >> (n - 1 - k)) & 1
            pairs.append((b, a) if under_first else (a, b))
        yield Notation(pairs)


def candidates(n: int, prune: bool = False) -> Iterator[Notation]:
    """
    Every parity-valid notation with n crossings, n! * 2^n of them, in
    SignedWord order. `prune` skips branches whose first chord is longer
    than some later chord; no canonical notation is lost.
    """
    if n <= 0:
        raise ValueError(f"candidates needs n >= 1, got {n}")
    size = 2 * n
    partner = [0] * (size + 1)
    under = [0] * (size + 1)

    def extend(position: int, bound: int) -> Iterator[Notation]:
        while position <= size and partner[position]:
            position += 1
        if position > size:
            yield Notation((p, partner[p]) for p in range(1, size + 1) if not under[p])
            return
        for q in range(position + 1, size + 1, 2):
            if partner[q]:
                continue
            if prune and position > 1 and _cyclic_gap(position, q, size) < bound:
                continue
            partner[position], partner[q] = q, position
            for position_under in (0, 1):
                under[position], under[q] = position_under, 1 - position_under
                yield from extend(position + 1, q - 1 if position == 1 else bound)
            partner[position] = partner[q] = 0
            under[position] = under[q] = 0

    yield from extend(1, 0)


def _projections_from(n: int, first: int) -> List[Notation]:
    survivors = []
    for chords in _matchings(n, first=first, prune=True):
        trial = Notation(chords)
        if not is_prime_candidate(trial) or not is_realizable(trial).realizable:
            continue
        survivors.extend(v for v in _oriented(chords) if is_canonical(v))
    return survivors


def enumerate_projections(n: int, workers: Optional[int] = None, allow_experimental: Optional[bool] = None) -> List[Notation]:
    """
    Canonical, drawable, prime notations with n crossings in SignedWord order.

    Drawability and primality only depend on the chords, so they are decided
    once per matching; the role assignments then only face the canonical
    check. The work splits by the partner of label 1.
    """
    if n <= 0:
        raise ValueError(f"enumerate_projections needs n >= 1, got {n}")
    check_crossing_gate(n, allow_experimental)
    firsts = list(range(2, 2 * n + 1, 2))
    workers = settings.worker_count() if workers is None else workers
    if workers > 1 and n >= 6:
        with ProcessPoolExecutor(max_workers=min(workers, len(firsts))) as pool:
            parts = list(pool.map(_projections_from, [n] * len(firsts), firsts))
    else:
        parts = [_projections_from(n, first) for first in firsts]
    result = sorted(v for part in parts for v in part)
    logger.info(f"{len(result)} canonical prime projections with {n} crossings")
    return result


def projection_counts(
    n_max: int,
    canonical: bool = True,
    realizable: bool = True,
    prime: bool = True,
) -> Dict[int, int]:
    """Per-n number of candidates passing the selected filters."""
    if n_max < 1:
        raise ValueError(f"projection_counts needs n_max >= 1, got {n_max}")
    check_crossing_gate(n_max)
    counts: Dict[int, int] = {}
    for n in range(1, n_max + 1):
        total = 0
        for chords in _matchings(n):
            trial = Notation(chords)
            if prime and not is_prime_candidate(trial):
                continue
            if realizable and not is_realizable(trial).realizable:
                continue
            if canonical:
                total += sum(1 for v in _oriented(chords) if is_canonical(v))
            else:
                total += 2 ** n
        counts[n] = total
        logger.debug(f"n={n}: {total} candidates (canonical={canonical}, realizable={realizable}, prime={prime})")
    return counts
