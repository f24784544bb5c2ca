"""
Drawability of pair notations.

A notation is drawable when its curve can sit on the sphere: the parity rule
(odd labels pair with even ones) is necessary, and the Jordan curve condition
is decided exactly by looking for a genus-0 rotation system. Every crossing
offers two cyclic orders of its four half-edges that keep the two passages
crossing; an assignment is planar when face tracing finds n + 2 faces.

Half-edges ("darts") are numbered per arc: arc p runs from label p to label
p+1 (arc 2n closes the curve back to label 1); dart 2(p-1) is its tail at
label p and dart 2(p-1)+1 its head at label p+1. Reversing a dart is `d ^ 1`.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import networkx as nx

from models.errors import UnrealizableError
from models.schemas import RealizabilityReason, RealizabilityRecord
from services.notation import Notation

logger = logging.getLogger(__name__)

Chord = Tuple[int, int]


def out_dart(label: int) -> int:
    """Tail of the arc leaving `label`."""
    return 2 * (label - 1)


def in_dart(label: int, size: int) -> int:
    """Head of the arc arriving at `label`."""
    return (2 * (label - 2) + 1) % (2 * size)


def dart_arc(dart: int) -> int:
    """Arc p (label p to label p+1) carrying the dart."""
    return dart // 2 + 1


def dart_label(dart: int, size: int) -> int:
    """Label of the crossing the dart is attached to."""
    arc = dart // 2 + 1
    return arc if dart % 2 == 0 else arc % size + 1


def parity_check(v: Notation) -> bool:
    """Every pair joins an odd label to an even one."""
    return all((a + b) % 2 == 1 for a, b in v.pairs)


def interlacement_graph(v: Notation) -> nx.Graph:
    """Crossings as vertices; an edge when exactly one end of a chord lies inside the other."""
    graph = nx.Graph()
    for index, pair in enumerate(v.pairs):
        graph.add_node(index, pair=pair)
    chords = v.chords
    for x, (a, b) in enumerate(chords):
        for y in range(x + 1, len(chords)):
            c, d = chords[y]
            if (a < c < b) != (a < d < b):
                graph.add_edge(x, y)
    return graph


def _even_degrees(v: Notation) -> bool:
    return all(degree % 2 == 0 for _, degree in interlacement_graph(v).degree())


def _rotation(chords: Tuple[Chord, ...], bits: Tuple[int, ...], size: int) -> List[int]:
    sigma = [0] * (2 * size)
    for (a, b), bit in zip(chords, bits):
        ia, oa, ib, ob = in_dart(a, size), out_dart(a), in_dart(b, size), out_dart(b)
        cycle = (ia, ib, oa, ob) if bit == 0 else (ia, ob, oa, ib)
        for k in range(4):
            sigma[cycle[k]] = cycle[(k + 1) % 4]
    return sigma


def _count_faces(sigma: List[int]) -> int:
    seen = bytearray(len(sigma))
    faces = 0
    for start in range(len(sigma)):
        if seen[start]:
            continue
        faces += 1
        dart = start
        while not seen[dart]:
            seen[dart] = 1
            dart = sigma[dart ^ 1]
    return faces


@lru_cache(maxsize=1 << 18)
def _planar_bits(chords: Tuple[Chord, ...], prune: bool) -> Optional[Tuple[int, ...]]:
    """
    First planar chirality assignment in lexicographic order, or None.

    Flipping every bit mirrors the embedding and keeps the face count, so the
    pruned search only tries assignments whose first bit is 0; the first
    witness is the same one the full search returns.
    """
    n = len(chords)
    size = 2 * n
    target = n + 2
    cycles = []
    for a, b in chords:
        ia, oa, ib, ob = in_dart(a, size), out_dart(a), in_dart(b, size), out_dart(b)
        cycles.append(((ia, ib, oa, ob), (ia, ob, oa, ib)))
    sigma = [0] * (2 * size)
    total = 2 ** (n - 1) if prune else 2 ** n
    for code in range(total):
        for k in range(n):
            cycle = cycles[k][(code >> (n - 1 - k)) & 1]
            sigma[cycle[0]] = cycle[1]
            sigma[cycle[1]] = cycle[2]
            sigma[cycle[2]] = cycle[3]
            sigma[cycle[3]] = cycle[0]
        if _count_faces(sigma) == target:
            return tuple((code >> (n - 1 - k)) & 1 for k in range(n))
    return None


class RotationSystem:
    """Chirality bit per crossing (crossing order sorted by over-label) and the derived rotation."""

    __slots__ = ("notation", "bits", "sigma")

    def __init__(self, notation: Notation, bits: Tuple[int, ...]):
        if len(bits) != notation.n:
            raise ValueError(f"{len(bits)} chirality bits for {notation.n} crossings")
        object.__setattr__(self, "notation", notation)
        object.__setattr__(self, "bits", tuple(bits))
        object.__setattr__(self, "sigma", tuple(_rotation(notation.chords, tuple(bits), notation.size)))

    def __setattr__(self, name, value):
        raise AttributeError("RotationSystem is immutable")

    @property
    def bitstring(self) -> str:
        return "".join(str(bit) for bit in self.bits)

    @property
    def face_count(self) -> int:
        # a crossing-free circle still splits the sphere in two
        if self.notation.n == 0:
            return 2
        return _count_faces(list(self.sigma))


@dataclass(frozen=True)
class RealizabilityVerdict:
    realizable: bool
    witness: Optional[RotationSystem] = None
    reason: Optional[RealizabilityReason] = None

    def to_record(self) -> RealizabilityRecord:
        return RealizabilityRecord(
            realizable=self.realizable,
            reason=self.reason,
            witness=self.witness.bitstring if self.witness is not None else None,
        )


def search_rotation_systems(v: Notation, prune: bool = True) -> RealizabilityVerdict:
    """
    Exhaustive chirality search.

    With `prune` the parity and even-interlacement filters run first and the
    global mirror symmetry halves the space; without it every one of the 2^n
    assignments is traced.
    """
    if v.n == 0:
        return RealizabilityVerdict(True, RotationSystem(v, ()))
    if not parity_check(v):
        return RealizabilityVerdict(False, reason=RealizabilityReason.PARITY_VIOLATION)
    if prune and not _even_degrees(v):
        logger.debug(f"{v} rejected by the interlacement degree filter")
        return RealizabilityVerdict(False, reason=RealizabilityReason.NO_PLANAR_ROTATION)
    bits = _planar_bits(v.chords, prune)
    if bits is None:
        return RealizabilityVerdict(False, reason=RealizabilityReason.NO_PLANAR_ROTATION)
    return RealizabilityVerdict(True, RotationSystem(v, bits))


@lru_cache(maxsize=1 << 18)
def is_realizable(v: Notation) -> RealizabilityVerdict:
    return search_rotation_systems(v, prune=True)


def require_witness(v: Notation) -> RotationSystem:
    """Witness embedding of a drawable notation; refuses undrawable input."""
    verdict = is_realizable(v)
    if not verdict.realizable:
        raise UnrealizableError(f"{v} is not drawable ({verdict.reason.value})")
    return verdict.witness


def faces_of(w: RotationSystem) -> List[Tuple[int, ...]]:
    """Orbits of (rotation successor of the reversed dart); every dart lands in exactly one face."""
    sigma = w.sigma
    seen = bytearray(len(sigma))
    faces: List[Tuple[int, ...]] = []
    for start in range(len(sigma)):
        if seen[start]:
            continue
        face = []
        dart = start
        while not seen[dart]:
            seen[dart] = 1
            face.append(dart)
            dart = sigma[dart ^ 1]
        faces.append(tuple(face))
    return faces
