"""
Pair notation for regular knot projections.

Walking along an oriented projection from a chosen start point numbers the
crossings met 1..2n; every crossing collects one over label and one under
label and becomes the pair (over, under). This module owns that data model,
its textual form, the 4n relabelings produced by moving the start point or
reversing the orientation, the preferred (lexicographically least) member of
that orbit, the mirror, and the segment decomposition used for primality.
"""

import logging
import re
from enum import Enum
from typing import Iterable, List, Set, Tuple

from models.errors import (
    DuplicateLabelError,
    LabelRangeError,
    MalformedNotationError,
    NotationError,
    OddTokenCountError,
)
from models.schemas import SegmentDecomposition

logger = logging.getLogger(__name__)

EMPTY_TOKEN = "()0"

Pair = Tuple[int, int]
WordKey = Tuple[int, ...]


class Role(str, Enum):
    """Role of a label at its crossing; OVER sorts before UNDER."""
    OVER = "over"
    UNDER = "under"


class Notation:
    """Immutable set of (over, under) pairs over the labels 1..2n."""

    __slots__ = ("pairs", "n", "_partner", "_under")

    def __init__(self, pairs: Iterable[Pair] = ()):
        ordered = tuple(sorted((int(a), int(b)) for a, b in pairs))
        size = 2 * len(ordered)
        partner = [0] * (size + 1)
        under = [0] * (size + 1)
        for over_label, under_label in ordered:
            for label in (over_label, under_label):
                if not 1 <= label <= size:
                    raise LabelRangeError(f"label {label} outside 1..{size}", token=str(label))
            if over_label == under_label or partner[over_label] or partner[under_label]:
                dup = over_label if (over_label == under_label or partner[over_label]) else under_label
                raise DuplicateLabelError(f"label {dup} used twice", token=str(dup))
            partner[over_label] = under_label
            partner[under_label] = over_label
            under[under_label] = 1
        object.__setattr__(self, "pairs", ordered)
        object.__setattr__(self, "n", len(ordered))
        object.__setattr__(self, "_partner", tuple(partner))
        object.__setattr__(self, "_under", tuple(under))

    def __setattr__(self, name, value):
        raise AttributeError("Notation is immutable")

    def __reduce__(self):
        return (Notation, (self.pairs,))

    def __eq__(self, other) -> bool:
        return isinstance(other, Notation) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __lt__(self, other: "Notation") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"Notation({serialize_notation(self)!r})"

    def __str__(self) -> str:
        return serialize_notation(self)

    @property
    def size(self) -> int:
        """Number of labels, 2n."""
        return 2 * self.n

    def partner(self, label: int) -> int:
        """The other label at the crossing that `label` belongs to."""
        return self._partner[label]

    def is_under(self, label: int) -> bool:
        return bool(self._under[label])

    def role(self, label: int) -> Role:
        """Whether the strand passes over or under at `label`."""
        return Role.UNDER if self._under[label] else Role.OVER

    @property
    def partners(self) -> Tuple[int, ...]:
        """Partner table indexed by label (index 0 unused)."""
        return self._partner

    @property
    def unders(self) -> Tuple[int, ...]:
        """1 where the label is an undercrossing, indexed by label."""
        return self._under

    @property
    def chords(self) -> Tuple[Pair, ...]:
        """Role-free chords (low, high) in crossing order."""
        return tuple((a, b) if a < b else (b, a) for a, b in self.pairs)

    @property
    def word_key(self) -> WordKey:
        """SignedWord flattened to ints: partner * 2 + (0 over, 1 under)."""
        return tuple(self._partner[p] * 2 + self._under[p] for p in range(1, self.size + 1))

    @property
    def sort_key(self) -> Tuple[int, WordKey]:
        """Shortlex order: crossing count first, then SignedWord."""
        return (self.n, self.word_key)


EMPTY = Notation()

_GROUP_RE = re.compile(r"\(([^()]*)\)")
_NUMBER_RE = re.compile(r"[0-9]+")


def parse_notation(text: str) -> Notation:
    """
    Parse `(a,b)(c,d)...` or the empty token `()0`.

    Whitespace is ignored anywhere.

    Args:
        text: Notation text

    Returns:
        The parsed Notation (the shared EMPTY for `()0`)

    Raises:
        NotationError: a subclass naming the offending token
    """
    compact = "".join(text.split())
    if compact == EMPTY_TOKEN:
        return EMPTY
    if not compact:
        raise MalformedNotationError("empty notation text (use ()0 for the unknot)", token="")

    groups: List[str] = []
    position = 0
    for match in _GROUP_RE.finditer(compact):
        if match.start() != position:
            stray = compact[position:match.start()]
            raise MalformedNotationError(f"unexpected text {stray!r}", token=stray)
        groups.append(match.group(1))
        position = match.end()
    if position != len(compact):
        stray = compact[position:]
        raise MalformedNotationError(f"unexpected text {stray!r}", token=stray)

    fields: List[List[str]] = []
    for group in groups:
        parts = group.split(",") if group else []
        for part in parts:
            if not _NUMBER_RE.fullmatch(part):
                raise MalformedNotationError(f"{part!r} in ({group}) is not a label", token=part or f"({group})")
        fields.append(parts)

    total = sum(len(parts) for parts in fields)
    for group, parts in zip(groups, fields):
        if len(parts) != 2:
            if total % 2:
                raise OddTokenCountError(f"odd number of labels ({total}), first bad group ({group})", token=f"({group})")
            raise MalformedNotationError(f"group ({group}) must hold exactly two labels", token=f"({group})")

    size = 2 * len(fields)
    seen: Set[int] = set()
    for parts in fields:
        for part in parts:
            label = int(part)
            if not 1 <= label <= size:
                raise LabelRangeError(f"label {label} outside 1..{size}", token=part)
            if label in seen:
                raise DuplicateLabelError(f"label {label} used twice", token=part)
            seen.add(label)
    return Notation((int(a), int(b)) for a, b in fields)


def serialize_notation(v: Notation) -> str:
    """Pairs sorted by over-label, no whitespace; `()0` for the empty notation."""
    if v.n == 0:
        return EMPTY_TOKEN
    return "".join(f"({a},{b})" for a, b in v.pairs)


def _label_map(size: int, shift: int, reversed_: bool):
    if reversed_:
        return lambda p: ((shift - p) % size) + 1
    return lambda p: ((p - 1 - shift) % size) + 1


def relabel(v: Notation, shift: int, reversed_: bool = False) -> Notation:
    """Renumber from a new start point (old label shift+1 becomes 1; reversed walks backwards from old label shift)."""
    if v.n == 0:
        if shift != 0:
            raise NotationError(f"shift {shift} out of range for the empty notation", token=str(shift))
        return v
    if not 0 <= shift < v.size:
        raise NotationError(f"shift {shift} out of range 0..{v.size - 1}", token=str(shift))
    f = _label_map(v.size, shift, reversed_)
    return Notation((f(a), f(b)) for a, b in v.pairs)


def _relabelled_word(v: Notation, shift: int, reversed_: bool) -> WordKey:
    size = v.size
    partner = v.partners
    under = v.unders
    word = [0] * size
    if reversed_:
        for p in range(1, size + 1):
            word[(shift - p) % size] = (((shift - partner[p]) % size) + 1) * 2 + under[p]
    else:
        for p in range(1, size + 1):
            word[(p - 1 - shift) % size] = (((partner[p] - 1 - shift) % size) + 1) * 2 + under[p]
    return tuple(word)


def orbit(v: Notation) -> Set[Notation]:
    """All notations of the same projection (start point and orientation changed)."""
    if v.n == 0:
        return {v}
    return {relabel(v, s, r) for s in range(v.size) for r in (False, True)}


def encode_word(v: Notation) -> List[Tuple[int, Role]]:
    """Entry i is (partner of i, role of i); compared partner first, then over < under."""
    return [(v.partner(p), v.role(p)) for p in range(1, v.size + 1)]


def _best_relabelling(v: Notation) -> Tuple[WordKey, int, bool]:
    best = (v.word_key, 0, False)
    for shift in range(v.size):
        for reversed_ in (False, True):
            word = _relabelled_word(v, shift, reversed_)
            if word < best[0]:
                best = (word, shift, reversed_)
    return best


def canonicalize(v: Notation) -> Notation:
    """The orbit member with the least SignedWord."""
    if v.n == 0:
        return v
    _, shift, reversed_ = _best_relabelling(v)
    return relabel(v, shift, reversed_)


def is_canonical(v: Notation) -> bool:
    """
    Check whether v is already the least member of its relabeling orbit.

    Args:
        v: Any notation

    Returns:
        True when canonicalize(v) == v (the empty notation always is)
    """
    if v.n == 0:
        return True
    return _best_relabelling(v)[0] == v.word_key


def mirror(v: Notation) -> Notation:
    """Swap over and under at every crossing."""
    return Notation((b, a) for a, b in v.pairs)


def canonical_key(v: Notation) -> Notation:
    """Class key with mirror images identified: the lesser of the two canonical forms."""
    straight = canonicalize(v)
    flipped = canonicalize(mirror(v))
    return straight if straight.word_key <= flipped.word_key else flipped


def segment_decomposition(v: Notation) -> SegmentDecomposition:
    """Cut after k whenever no pair has one label <= k and the other > k."""
    if v.n == 0:
        raise NotationError("segment decomposition needs at least one crossing", token=EMPTY_TOKEN)
    partner = v.partners
    reach = 0
    boundaries: List[int] = []
    for k in range(1, v.size + 1):
        reach = max(reach, partner[k])
        if reach <= k:
            boundaries.append(k)
    m = len(boundaries)
    return SegmentDecomposition(boundaries=boundaries, m=m, projections=2 ** m)


def is_split_composite(v: Notation, min_crossings: int = 3) -> bool:
    """
    True when some cyclic run of labels is closed under pairing while both
    it and the rest hold at least `min_crossings` crossings.

    Unlike the segment decomposition this does not depend on the start
    point. Such a notation draws both K1 # K2 and K1 # mirror(K2).
    """
    size = v.size
    shortest = 2 * min_crossings
    if size < 2 * shortest:
        return False
    partner = v.partners
    for start in range(1, size + 1):
        reach = 0
        for length in range(1, size - shortest + 1):
            label = (start + length - 2) % size + 1
            reach = max(reach, (partner[label] - start) % size)
            if length >= shortest and reach < length:
                return True
    return False


def is_prime_candidate(v: Notation) -> bool:
    return segment_decomposition(v).m == 1
