"""
Coloring invariants: counts of strand colorings mod r.

Strands run from one undercrossing to the next. A coloring assigns every
strand a residue mod r so that at each positive crossing
    out = t * in + (1 - t) * over   (mod r)
and at each negative crossing in = t * out + (1 - t) * over, with t a unit;
t = r - 1 is the classic rule 2*over = in + out, where the sign drops out.
Crossing signs come from the witness embedding. The count is unchanged by
the three moves, so unequal counts separate knots.
"""

import logging
from bisect import bisect_left
from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from models.errors import ColoringGuardError
from models.schemas import ColoringScheme, Fingerprint, SchemeCount
from services.notation import Notation, mirror
from services.realizability import require_witness

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrandStructure:
    """
    Strand count and, per crossing (over-label order), the
    (over, incoming, outgoing) strand indices and the crossing sign.
    """
    strand_count: int
    crossings: Tuple[Tuple[int, int, int], ...]
    signs: Tuple[int, ...] = ()


def crossing_signs(v: Notation) -> Tuple[int, ...]:
    """
    +1 where the witness rotation around the crossing reads
    (in over, in under, out over, out under), -1 otherwise.

    The witness is fixed only up to reflection, which flips every sign.
    """
    witness = require_witness(v)
    return tuple(
        1 if (bit == 0) == (over_label < under_label) else -1
        for (over_label, under_label), bit in zip(v.pairs, witness.bits)
    )


def strands(v: Notation) -> StrandStructure:
    """
    Strand k spans the labels strictly between the k-th and (k+1)-th
    undercrossing labels; the last strand wraps past 2n back to 1.
    """
    signs = crossing_signs(v)
    if v.n == 0:
        return StrandStructure(1, ())
    unders = sorted(b for _, b in v.pairs)
    position = {label: k for k, label in enumerate(unders)}
    n = len(unders)
    crossings = []
    for over_label, under_label in v.pairs:
        outgoing = position[under_label]
        incoming = (outgoing - 1) % n
        over_strand = (bisect_left(unders, over_label) - 1) % n
        crossings.append((over_strand, incoming, outgoing))
    return StrandStructure(n, tuple(crossings), signs)


def _relation(sign: int, t: int) -> Tuple[int, int, int]:
    """Coefficients of (incoming, over, outgoing) in the crossing relation."""
    if sign > 0:
        return t, 1 - t, -1
    return 1, t - 1, -t


def relation_matrix(structure: StrandStructure, scheme: ColoringScheme) -> np.ndarray:
    """One row per crossing, reduced mod r: t*in + (1-t)*over - out, or in - (1-t)*over - t*out when negative."""
    r, t = scheme.r, scheme.t
    matrix = np.zeros((len(structure.crossings), structure.strand_count), dtype=np.int64)
    for row, ((over_strand, incoming, outgoing), sign) in enumerate(zip(structure.crossings, structure.signs)):
        c_in, c_over, c_out = _relation(sign, t)
        matrix[row, incoming] += c_in
        matrix[row, over_strand] += c_over
        matrix[row, outgoing] += c_out
    return matrix % r


def _diagonal_mod(matrix: np.ndarray, r: int) -> List[int]:
    """
    Diagonalize with unimodular row and column operations, working mod r.

    Euclidean steps keep every entry in [0, r); the returned diagonal has one
    entry per column (0 past the last pivot).
    """
    a = matrix.copy() % r
    rows, cols = a.shape
    diagonal = [0] * cols
    for s in range(min(rows, cols)):
        nonzero = np.argwhere(a[s:, s:] != 0)
        if nonzero.size == 0:
            break
        values = a[s:, s:][nonzero[:, 0], nonzero[:, 1]]
        i, j = nonzero[int(np.argmin(values))] + s
        a[[s, i]] = a[[i, s]]
        a[:, [s, j]] = a[:, [j, s]]
        while True:
            pivot = a[s, s]
            for i in range(s + 1, rows):
                if a[i, s]:
                    a[i, :] = (a[i, :] - (a[i, s] // pivot) * a[s, :]) % r
            for j in range(s + 1, cols):
                if a[s, j]:
                    a[:, j] = (a[:, j] - (a[s, j] // pivot) * a[:, s]) % r
            column = [(a[i, s], i) for i in range(s + 1, rows) if a[i, s]]
            row = [(a[s, j], j) for j in range(s + 1, cols) if a[s, j]]
            if not column and not row:
                break
            # remainders are smaller than the pivot; move the least one in
            best_column = min(column) if column else None
            best_row = min(row) if row else None
            if best_row is None or (best_column is not None and best_column[0] <= best_row[0]):
                a[[s, best_column[1]]] = a[[best_column[1], s]]
            else:
                a[:, [s, best_row[1]]] = a[:, [best_row[1], s]]
        diagonal[s] = int(a[s, s])
    return diagonal


def count_colorings(v: Notation, scheme: ColoringScheme) -> int:
    """Number of solutions of the crossing relations: product of gcd(d, r) over the diagonal."""
    return _count(strands(v), scheme)


def _count(structure: StrandStructure, scheme: ColoringScheme) -> int:
    if not structure.crossings:
        return scheme.r ** structure.strand_count
    diagonal = _diagonal_mod(relation_matrix(structure, scheme), scheme.r)
    count = 1
    for entry in diagonal:
        count *= gcd(entry, scheme.r)
    return count


def count_colorings_bruteforce(v: Notation, scheme: ColoringScheme, limit: Optional[int] = None) -> int:
    """Try every assignment; refuses when r**strands exceeds the limit."""
    structure = strands(v)
    limit = settings.bruteforce_limit if limit is None else limit
    r, t = scheme.r, scheme.t
    if r ** structure.strand_count > limit:
        raise ColoringGuardError(f"{r}^{structure.strand_count} assignments exceed the limit {limit}")
    relations = [
        (over_strand, incoming, outgoing, _relation(sign, t))
        for (over_strand, incoming, outgoing), sign in zip(structure.crossings, structure.signs)
    ]
    count = 0
    for colors in product(range(r), repeat=structure.strand_count):
        if all(
            (c_in * colors[incoming] + c_over * colors[over_strand] + c_out * colors[outgoing]) % r == 0
            for over_strand, incoming, outgoing, (c_in, c_over, c_out) in relations
        ):
            count += 1
    return count


def default_schemes(moduli: Optional[Sequence[int]] = None) -> List[ColoringScheme]:
    """Every unit t != 1 for each modulus, ordered by (r, t)."""
    moduli = settings.fingerprint_moduli if moduli is None else moduli
    return [
        ColoringScheme(r=r, t=t)
        for r in sorted(set(moduli))
        for t in range(2, r)
        if gcd(t, r) == 1
    ]


def fingerprint(v: Notation, schemes: Optional[Sequence[ColoringScheme]] = None) -> Fingerprint:
    """Unordered (v, mirror(v)) count pair per scheme."""
    schemes = default_schemes() if schemes is None else schemes
    if not schemes:
        raise ValueError("fingerprint needs at least one coloring scheme")
    straight = strands(v)
    flipped = strands(mirror(v))
    entries = []
    for scheme in sorted(schemes, key=lambda s: (s.r, s.t)):
        a = _count(straight, scheme)
        b = _count(flipped, scheme)
        entries.append(SchemeCount(r=scheme.r, t=scheme.t, counts=(min(a, b), max(a, b))))
    return Fingerprint(entries=tuple(entries))
