"""
Reidemeister moves on pair notation and the bounded searches built on them.

Labels are renumbered after every move so the result again uses 1..2n.
Sites that straddle the end of the labelling (arc 2n back to label 1) are
reached by first rotating the start point by `shift` labels.
"""

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

from models.errors import BudgetError, MoveError
from models.schemas import (
    EquivalenceStatus,
    EquivalenceVerdict,
    MoveDirection,
    MoveKind,
    MoveRecord,
    R2Variant,
)
from services.notation import Notation, Pair, canonical_key, is_split_composite, relabel
from services.realizability import dart_arc, faces_of, is_realizable, require_witness
from services.union_find import UnionFind

logger = logging.getLogger(__name__)

Triple = Tuple[Pair, Pair, Pair]


@dataclass(frozen=True)
class MoveDescriptor:
    """
    One move, replayable on the notation it was generated for.

    R1: `site` is i, the curl occupies labels i, i+1 (over at i when
    `over_first`). R2: the bigon occupies labels i, i+1 and j, j+1 with
    i = `site`; the strand through i, i+1 is over when `over_first`. R3:
    `triple` holds the three pairs ((i,j),(i',k),(j',k')) of the triangle.
    """
    kind: MoveKind
    direction: MoveDirection
    shift: int = 0
    site: Optional[int] = None
    j: Optional[int] = None
    variant: Optional[R2Variant] = None
    over_first: Optional[bool] = None
    triple: Optional[Triple] = None

    def to_record(self) -> MoveRecord:
        return MoveRecord(
            kind=self.kind,
            direction=self.direction,
            shift=self.shift,
            site=self.site,
            j=self.j,
            variant=self.variant,
            over_first=self.over_first,
            triple=list(self.triple) if self.triple is not None else None,
        )

    @classmethod
    def from_record(cls, record: MoveRecord) -> "MoveDescriptor":
        return cls(
            kind=record.kind,
            direction=record.direction,
            shift=record.shift,
            site=record.site,
            j=record.j,
            variant=record.variant,
            over_first=record.over_first,
            triple=tuple(tuple(p) for p in record.triple) if record.triple is not None else None,
        )

    def describe(self) -> str:
        parts = [self.kind.value, self.direction.value]
        if self.shift:
            parts.append(f"shift={self.shift}")
        if self.kind == MoveKind.R3:
            parts.append(" ".join(f"({a},{b})" for a, b in self.triple))
        else:
            parts.append(f"i={self.site}")
            if self.j is not None:
                parts.append(f"j={self.j} {self.variant.value}")
            parts.append("over-first" if self.over_first else "under-first")
        return " ".join(parts)


def _rotated(v: Notation, shift: int) -> Notation:
    if shift == 0:
        return v
    if v.n == 0 or not 0 < shift < v.size:
        raise MoveError(f"shift {shift} out of range for {v}")
    return relabel(v, shift)


def _curl(i: int, over_first: bool) -> Pair:
    return (i, i + 1) if over_first else (i + 1, i)


def _bigon(i: int, j: int, variant: R2Variant, over_first: bool) -> List[Pair]:
    if variant == R2Variant.PARALLEL:
        pairs = [(i, j), (i + 1, j + 1)]
    else:
        pairs = [(i, j + 1), (i + 1, j)]
    return pairs if over_first else [(b, a) for a, b in pairs]


def r2_variant_for(i: int, j: int) -> R2Variant:
    """The only variant that keeps odd labels paired with even ones."""
    return R2Variant.PARALLEL if (j - i) % 2 == 1 else R2Variant.ANTIPARALLEL


def apply_r1(v: Notation, d: MoveDescriptor) -> Notation:
    """
    Add or remove a curl.

    Args:
        v: Notation to rewrite
        d: R1 descriptor; adding shifts every label >= site up by 2,
            removing shifts every label > site + 1 down by 2

    Returns:
        The renumbered notation

    Raises:
        MoveError: the site is out of range or holds no curl
    """
    if d.kind != MoveKind.R1 or d.site is None or d.over_first is None:
        raise MoveError(f"not an R1 move: {d.describe()}")
    base = _rotated(v, d.shift)
    i = d.site
    if d.direction == MoveDirection.ADD:
        if not 1 <= i <= base.size + 1:
            raise MoveError(f"R1 site {i} outside 1..{base.size + 1}")
        bump = lambda x: x + 2 if x >= i else x
        return Notation([(bump(a), bump(b)) for a, b in base.pairs] + [_curl(i, d.over_first)])
    if d.direction == MoveDirection.REMOVE:
        curl = _curl(i, d.over_first)
        if curl not in base.pairs:
            raise MoveError(f"no curl {curl} in {base}")
        drop = lambda x: x - 2 if x > i + 1 else x
        return Notation((drop(a), drop(b)) for a, b in base.pairs if (a, b) != curl)
    raise MoveError(f"R1 has no {d.direction.value} direction")


def apply_r2(v: Notation, d: MoveDescriptor) -> Notation:
    """
    Add or remove a bigon between labels i, i+1 and j, j+1 of the result side.

    Args:
        v: Notation to rewrite
        d: R2 descriptor; the variant must keep odd labels paired with even ones

    Returns:
        The renumbered notation

    Raises:
        MoveError: overlapping strands, labels out of range, the wrong
            variant, or no such bigon to remove
    """
    if d.kind != MoveKind.R2 or None in (d.site, d.j, d.variant, d.over_first):
        raise MoveError(f"not an R2 move: {d.describe()}")
    base = _rotated(v, d.shift)
    i, j = d.site, d.j
    if j < i + 2:
        raise MoveError(f"R2 strands at {i} and {j} overlap")
    bigon = _bigon(i, j, d.variant, d.over_first)
    if d.direction == MoveDirection.ADD:
        if i < 1 or j + 1 > base.size + 4:
            raise MoveError(f"R2 labels {i}, {j} outside 1..{base.size + 4}")
        if d.variant != r2_variant_for(i, j):
            raise MoveError(f"{d.variant.value} bigon at {i}, {j} breaks the odd-even pairing")

        def bump(x: int) -> int:
            if x < i:
                return x
            return x + 2 if x <= j - 3 else x + 4

        return Notation([(bump(a), bump(b)) for a, b in base.pairs] + bigon)
    if d.direction == MoveDirection.REMOVE:
        present = set(base.pairs)
        if any(pair not in present for pair in bigon):
            raise MoveError(f"no bigon {bigon} in {base}")

        def drop(x: int) -> int:
            if x < i:
                return x
            return x - 2 if x < j else x - 4

        return Notation((drop(a), drop(b)) for a, b in base.pairs if (a, b) not in bigon)
    raise MoveError(f"R2 has no {d.direction.value} direction")


def _adjacent(x: int, y: int, size: int) -> bool:
    return (x - y) % size in (1, size - 1)


def apply_r3(v: Notation, d: MoveDescriptor) -> Notation:
    """Slide the bottom strand across the crossing of the other two: pairs become (i,k'),(i',j'),(j,k)."""
    if d.kind != MoveKind.R3 or d.triple is None:
        raise MoveError(f"not an R3 move: {d.describe()}")
    base = _rotated(v, d.shift)
    (i, j), (i2, k), (j2, k2) = d.triple
    present = set(base.pairs)
    if len({i, j, i2, k, j2, k2}) != 6 or any(pair not in present for pair in d.triple):
        raise MoveError(f"triangle {d.triple} not in {base}")
    size = base.size
    if not (_adjacent(i, i2, size) and _adjacent(j, j2, size) and _adjacent(k, k2, size)):
        raise MoveError(f"pairs {d.triple} do not bound a triangle")
    kept = [pair for pair in base.pairs if pair not in d.triple]
    return Notation(kept + [(i, k2), (i2, j2), (j, k)])


def invert_r3(d: MoveDescriptor) -> MoveDescriptor:
    """The R3 descriptor that undoes `d` on its result."""
    (i, j), (i2, k), (j2, k2) = d.triple
    return MoveDescriptor(
        kind=MoveKind.R3,
        direction=MoveDirection.REPLACE,
        shift=d.shift,
        triple=((i2, j2), (i, k2), (j, k)),
    )


def apply_move(v: Notation, d: MoveDescriptor) -> Notation:
    if d.kind == MoveKind.R1:
        return apply_r1(v, d)
    if d.kind == MoveKind.R2:
        return apply_r2(v, d)
    return apply_r3(v, d)


def _r1_remove_sites(base: Notation, shift: int) -> Iterator[MoveDescriptor]:
    for a, b in base.pairs:
        if abs(a - b) == 1:
            i = min(a, b)
            if shift and i != base.size - 1:
                continue
            yield MoveDescriptor(MoveKind.R1, MoveDirection.REMOVE, shift=shift, site=i, over_first=a < b)


def _r2_remove_sites(base: Notation, shift: int) -> Iterator[MoveDescriptor]:
    partner = base.partners
    for i in range(1, base.size):
        if base.is_under(i) != base.is_under(i + 1):
            continue
        p, q = partner[i], partner[i + 1]
        if q == p + 1:
            j, variant = p, R2Variant.PARALLEL
        elif p == q + 1:
            j, variant = q, R2Variant.ANTIPARALLEL
        else:
            continue
        if j < i + 2:
            continue
        # rotated copies only contribute the bigons that use the wrapping arc
        if shift and j != base.size - 1:
            continue
        yield MoveDescriptor(
            MoveKind.R2, MoveDirection.REMOVE, shift=shift, site=i, j=j,
            variant=variant, over_first=not base.is_under(i),
        )


def removal_sites(v: Notation) -> List[MoveDescriptor]:
    """R1 then R2 removals, read off label patterns alone."""
    if v.n == 0:
        return []
    sites = list(_r1_remove_sites(v, 0))
    sites.extend(_r1_remove_sites(relabel(v, 1), 1))
    sites.extend(_r2_remove_sites(v, 0))
    if v.n >= 2:
        sites.extend(_r2_remove_sites(relabel(v, 1), 1))
    return sites


def _insertion_points(arc: int, size: int) -> Tuple[int, ...]:
    # inserting at label q puts the new labels on arc q-1; arc 2n also accepts q = 1
    if arc == size:
        return (1, size + 1)
    return (arc + 1,)


def r2_add_sites(v: Notation) -> List[MoveDescriptor]:
    """Bigons pushed between two arcs (or one arc) bordering a common face of the witness."""
    if v.n == 0:
        spots = {(1, 1)}
    else:
        size = v.size
        spots = set()
        for face in faces_of(require_witness(v)):
            points = sorted({q for arc in {dart_arc(d) for d in face} for q in _insertion_points(arc, size)})
            for x, a in enumerate(points):
                for b in points[x:]:
                    spots.add((a, b))
    sites = []
    for a, b in sorted(spots):
        i, j = a, b + 2
        for over_first in (True, False):
            sites.append(MoveDescriptor(
                MoveKind.R2, MoveDirection.ADD, site=i, j=j,
                variant=r2_variant_for(i, j), over_first=over_first,
            ))
    return sites


def r3_sites(v: Notation) -> List[MoveDescriptor]:
    """Triangular faces of the witness with one over-over, one under-under and one mixed side."""
    if v.n < 3:
        return []
    size = v.size
    partner = v.partners
    sites = set()
    for face in faces_of(require_witness(v)):
        if len(face) != 3:
            continue
        arcs = {dart_arc(d) for d in face}
        if len(arcs) != 3:
            continue
        top, middle, bottom = [], [], []
        for arc in arcs:
            ends = (arc, arc % size + 1)
            unders = sum(v.is_under(label) for label in ends)
            (top, middle, bottom)[unders].append(ends)
        if len(top) != 1 or len(middle) != 1 or len(bottom) != 1:
            continue
        top_labels, middle_labels, bottom_labels = set(top[0]), set(middle[0]), set(bottom[0])
        x = [(a, partner[a]) for a in top_labels if partner[a] in middle_labels]
        if len(x) != 1:
            continue
        i, j = x[0]
        (i2,) = top_labels - {i}
        (j2,) = middle_labels - {j}
        k = partner[i2]
        if k not in bottom_labels:
            continue
        (k2,) = bottom_labels - {k}
        if partner[j2] != k2 or v.is_under(j2):
            continue
        # faces that revisit a crossing do not bound a triangle of three crossings
        if len({i, j, i2, k, j2, k2}) != 6:
            continue
        sites.add(((i, j), (i2, k), (j2, k2)))
    return [MoveDescriptor(MoveKind.R3, MoveDirection.REPLACE, triple=t) for t in sorted(sites)]


_CROSSING_DELTA = {
    (MoveKind.R1, MoveDirection.ADD): 1,
    (MoveKind.R1, MoveDirection.REMOVE): -1,
    (MoveKind.R2, MoveDirection.ADD): 2,
    (MoveKind.R2, MoveDirection.REMOVE): -2,
    (MoveKind.R3, MoveDirection.REPLACE): 0,
}


def check_effect(v: Notation, d: MoveDescriptor, result: Notation) -> None:
    """
    Verify the label-level effect of a move.

    Args:
        v: Notation the move was applied to
        d: The move
        result: What apply_move returned

    Raises:
        MoveError: when the crossing count changed by the wrong amount, the
            labels are not exactly 1..2n, the inserted curl or bigon is
            missing, or an R3 did not replace exactly three pairs
    """
    expected = v.n + _CROSSING_DELTA[(d.kind, d.direction)]
    if result.n != expected:
        raise MoveError(f"{d.describe()} on {v} gave {result.n} crossings, expected {expected}")
    labels = sorted(label for pair in result.pairs for label in pair)
    if labels != list(range(1, result.size + 1)):
        raise MoveError(f"{d.describe()} on {v} left labels {labels}")
    if d.direction == MoveDirection.ADD:
        inserted = [_curl(d.site, d.over_first)] if d.kind == MoveKind.R1 else _bigon(d.site, d.j, d.variant, d.over_first)
        if any(pair not in result.pairs for pair in inserted):
            raise MoveError(f"{d.describe()} on {v} did not insert {inserted}")
    if d.kind == MoveKind.R3:
        base = _rotated(v, d.shift)
        replaced = set(base.pairs) - set(result.pairs)
        if replaced != set(d.triple):
            raise MoveError(f"{d.describe()} on {v} replaced {sorted(replaced)}")


def legal_moves(v: Notation, budget_n: int) -> List[Tuple[MoveDescriptor, Notation]]:
    """
    Every move available on a drawable notation, removals first, with its result.

    Args:
        v: A drawable notation
        budget_n: Additions that would exceed this many crossings are skipped

    Returns:
        (descriptor, result) pairs; every result has passed check_effect and
        is drawable again

    Raises:
        UnrealizableError: v has no planar embedding
        MoveError: a generated move broke its label-level contract
    """
    witness = require_witness(v)
    descriptors = removal_sites(v)
    if v.n + 1 <= budget_n:
        descriptors.extend(
            MoveDescriptor(MoveKind.R1, MoveDirection.ADD, site=i, over_first=over_first)
            for i in range(1, v.size + 2)
            for over_first in (True, False)
        )
    if v.n + 2 <= budget_n:
        descriptors.extend(r2_add_sites(v))
    descriptors.extend(r3_sites(v))
    results = []
    for d in descriptors:
        result = apply_move(v, d)
        check_effect(v, d, result)
        if not is_realizable(result).realizable:
            raise MoveError(f"{d.describe()} on {v} (witness {witness.bitstring}) gave undrawable {result}")
        results.append((d, result))
    return results


def _searchable(v: Notation) -> bool:
    return not is_split_composite(v)


def _neighbours(key: Notation, budget_n: int) -> Iterator[Tuple[MoveDescriptor, Notation]]:
    for d, result in legal_moves(key, budget_n):
        if _searchable(result):
            yield d, canonical_key(result)


def replay(start: Notation, path: Sequence[MoveDescriptor]) -> Notation:
    """Apply a path the way the searches produce it: canonical key before every step."""
    current = canonical_key(start)
    for d in path:
        current = canonical_key(apply_move(current, d))
    return current


def _step_between(source: Notation, target: Notation, budget_n: int) -> Optional[MoveDescriptor]:
    for d, child in _neighbours(source, budget_n):
        if child == target:
            return d
    return None


def _join(
    forward: Dict[Notation, Optional[Tuple[Notation, MoveDescriptor]]],
    backward: Dict[Notation, Optional[Tuple[Notation, MoveDescriptor]]],
    meeting: Notation,
    budget_n: int,
) -> Optional[List[MoveDescriptor]]:
    head: List[MoveDescriptor] = []
    node = meeting
    while forward[node] is not None:
        node, d = forward[node]
        head.append(d)
    head.reverse()
    tail: List[MoveDescriptor] = []
    node = meeting
    while backward[node] is not None:
        previous, _ = backward[node]
        # moves are reversible, so the reverse step is among the neighbours
        step = _step_between(node, previous, budget_n)
        if step is None:
            logger.warning(f"could not reverse the step {previous} -> {node}")
            return None
        tail.append(step)
        node = previous
    return head + tail


def equivalent(a: Notation, b: Notation, budget_n: int, budget_nodes: int) -> EquivalenceVerdict:
    """
    Bidirectional breadth-first search over canonical keys.

    Args:
        a, b: Drawable notations
        budget_n: Crossing cap for intermediate states
        budget_nodes: Number of expanded states before giving up

    Returns:
        EquivalenceVerdict, `connected` with a replayable path or `unknown`
        once the budget is spent; absence of a path is never reported as
        inequivalence
    """
    if budget_n < max(a.n, b.n):
        raise BudgetError(f"budget_n {budget_n} below the input crossing count {max(a.n, b.n)}")
    require_witness(a)
    require_witness(b)
    start, goal = canonical_key(a), canonical_key(b)
    if start == goal:
        return EquivalenceVerdict(status=EquivalenceStatus.CONNECTED, path=[], explored=0)

    parents = ({start: None}, {goal: None})
    frontiers = (deque([start]), deque([goal]))
    explored = 0
    while frontiers[0] and frontiers[1] and explored < budget_nodes:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        node = frontiers[side].popleft()
        explored += 1
        for d, child in _neighbours(node, budget_n):
            if child in parents[side]:
                continue
            parents[side][child] = (node, d)
            if child in parents[1 - side]:
                path = _join(parents[0], parents[1], child, budget_n)
                if path is None:
                    return EquivalenceVerdict(status=EquivalenceStatus.UNKNOWN, explored=explored)
                if replay(start, path) != goal:
                    logger.error(f"path between {start} and {goal} does not replay")
                    return EquivalenceVerdict(status=EquivalenceStatus.UNKNOWN, explored=explored)
                logger.debug(f"{start} ~ {goal} in {len(path)} moves, {explored} nodes")
                return EquivalenceVerdict(
                    status=EquivalenceStatus.CONNECTED,
                    path=[step.to_record() for step in path],
                    explored=explored,
                )
            frontiers[side].append(child)
    logger.debug(f"no path between {start} and {goal} within {explored} nodes")
    return EquivalenceVerdict(status=EquivalenceStatus.UNKNOWN, explored=explored)


def dedupe(
    items: Sequence[Notation],
    budget_n: int,
    budget_nodes: int,
    group_of: Optional[Callable[[Notation], Hashable]] = None,
) -> List[List[Notation]]:
    """
    Partition `items` into move-connected components.

    Keys are processed in shortlex order. Each key after the first of its
    group runs a best-first search (fewest crossings first) until it meets
    a state already claimed by another component of its group. States are
    claimed by the first search that reaches them, so every state is
    expanded at most once. With `group_of` only keys of equal group are
    ever merged; meeting a state of another group is an invariant violation
    and is logged, not merged.
    """
    for item in items:
        if budget_n < item.n:
            raise BudgetError(f"budget_n {budget_n} below {item} ({item.n} crossings)")
    key_of = {item: canonical_key(item) for item in items}
    keys = sorted(set(key_of.values()))
    group = {key: (group_of(key) if group_of is not None else None) for key in keys}
    uf = UnionFind()
    owner: Dict[Notation, Notation] = {}
    started = set()

    for index, key in enumerate(keys):
        uf.find(key)
        claimed = owner.get(key)
        if claimed is not None:
            if group[claimed] == group[key]:
                uf.union(claimed, key)
                continue
            logger.error(f"{key} reached from {claimed} across fingerprint groups")
        owner[key] = key
        if group[key] not in started:
            started.add(group[key])
            continue
        merged = _search_component(key, group, uf, owner, budget_n, budget_nodes)
        if index % 50 == 0 or not merged:
            logger.info(f"dedupe {index + 1}/{len(keys)}: {key} {'merged' if merged else 'unresolved'}")

    items_of: Dict[Notation, List[Notation]] = {}
    for item in items:
        items_of.setdefault(key_of[item], []).append(item)
    components = [sorted({item for k in group for item in items_of[k]}) for group in uf.groups()]
    return sorted(components, key=lambda c: c[0])


def _search_component(
    key: Notation,
    group: Dict[Notation, Hashable],
    uf: UnionFind,
    owner: Dict[Notation, Notation],
    budget_n: int,
    budget_nodes: int,
) -> bool:
    heap = [(key.n, key.word_key, key)]
    explored = 0
    while heap and explored < budget_nodes:
        _, _, node = heapq.heappop(heap)
        explored += 1
        for _, child in _neighbours(node, budget_n):
            claimed = owner.get(child)
            if claimed is None:
                owner[child] = key
                heapq.heappush(heap, (child.n, child.word_key, child))
                continue
            if uf.connected(claimed, key):
                continue
            if group.get(claimed) == group[key]:
                uf.union(claimed, key)
                return True
            logger.error(f"{key} and {claimed} meet at {child} with different fingerprints")
    return False
