"""
Pydantic models for records, verdicts, reports and run configuration.
"""

from math import gcd
from pathlib import Path
from typing import List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from enum import Enum


class RealizabilityReason(str, Enum):
    """Why a notation was found not drawable."""
    PARITY_VIOLATION = "parity_violation"
    NO_PLANAR_ROTATION = "no_planar_rotation"


class SegmentDecomposition(BaseModel):
    """Maximal split of the labels into segments closed under pairing."""
    model_config = ConfigDict(frozen=True)

    boundaries: List[int] = Field(..., description="Increasing cut labels, last one is 2n")
    m: int = Field(..., ge=1)
    projections: int = Field(..., description="2**m projections share this notation")


class RealizabilityRecord(BaseModel):
    """Serialized realizability verdict."""
    realizable: bool
    reason: Optional[RealizabilityReason] = None
    witness: Optional[str] = Field(None, description="Chirality bits in crossing order sorted by over-label")


class MoveKind(str, Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"


class MoveDirection(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    REPLACE = "replace"


class R2Variant(str, Enum):
    """(i,j),(i+1,j+1) is parallel, (i,j+1),(i+1,j) is antiparallel."""
    PARALLEL = "parallel"
    ANTIPARALLEL = "antiparallel"


class MoveRecord(BaseModel):
    """Replayable form of a single move."""
    kind: MoveKind
    direction: MoveDirection
    shift: int = 0
    site: Optional[int] = None
    j: Optional[int] = None
    variant: Optional[R2Variant] = None
    over_first: Optional[bool] = None
    triple: Optional[List[Tuple[int, int]]] = None


class EquivalenceStatus(str, Enum):
    CONNECTED = "connected"
    UNKNOWN = "unknown"


class EquivalenceVerdict(BaseModel):
    """Outcome of a bounded move search; never claims inequivalence."""
    status: EquivalenceStatus
    path: Optional[List[MoveRecord]] = None
    explored: int = 0


class ColoringScheme(BaseModel):
    """Colors mod r with out = t*in + (1-t)*over at every crossing."""
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=2)
    t: int

    @model_validator(mode="after")
    def _check_unit(self) -> "ColoringScheme":
        if not 0 < self.t < self.r or gcd(self.t, self.r) != 1:
            raise ValueError(f"t={self.t} is not a unit modulo r={self.r}")
        return self

    @classmethod
    def parse(cls, text: str) -> "ColoringScheme":
        """Parse the `r:t` form used on the command line."""
        r_text, sep, t_text = text.strip().partition(":")
        if not sep or not r_text.isdigit() or not t_text.isdigit():
            raise ValueError(f"scheme {text!r} is not of the form r:t")
        return cls(r=int(r_text), t=int(t_text))

    @property
    def label(self) -> str:
        return f"{self.r}:{self.t}"


class SchemeCount(BaseModel):
    """Counts for a notation and its mirror under one scheme, smaller first."""
    model_config = ConfigDict(frozen=True)

    r: int
    t: int
    counts: Tuple[int, int]


_SCHEME_COUNTS = TypeAdapter(List[SchemeCount])


class Fingerprint(BaseModel):
    """Mirror-symmetrized coloring counts ordered by (r, t)."""
    model_config = ConfigDict(frozen=True)

    entries: Tuple[SchemeCount, ...]

    def key(self) -> Tuple[Tuple[int, int, int, int], ...]:
        return tuple((e.r, e.t, e.counts[0], e.counts[1]) for e in self.entries)

    def to_record(self) -> str:
        return _SCHEME_COUNTS.dump_json(list(self.entries)).decode("utf-8")

    @classmethod
    def from_record(cls, text: str) -> "Fingerprint":
        return cls(entries=tuple(_SCHEME_COUNTS.validate_json(text)))


class KnotClass(BaseModel):
    """A move-equivalence class of projections."""
    id: int
    representative: str
    crossing_number: int
    fingerprint: Fingerprint
    member_count: int = Field(1, ge=1)


class ClassificationReport(BaseModel):
    """Per-crossing-number knot counts with their bounds."""
    n_max: int
    classes: List[KnotClass]
    counts: List[int]
    lower_bounds: List[int]
    upper_bounds: List[int]
    unresolved: List[Tuple[str, str]] = Field(default_factory=list)
    budget_n: int
    budget_nodes: int


class ReferenceStatus(str, Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    BOUND_ONLY = "bound-only"


class ReferenceEntry(BaseModel):
    n: int
    reported: int
    reference: Optional[int] = None
    status: ReferenceStatus


class ReferenceComparison(BaseModel):
    entries: List[ReferenceEntry]

    @property
    def consistent(self) -> bool:
        return all(e.status != ReferenceStatus.MISMATCH for e in self.entries)


class ClassifyConfig(BaseModel):
    """Budgets and invariants for one classification run."""
    budget_n: Optional[int] = Field(None, description="Crossing cap during move search; default n_max + extra")
    budget_nodes: int = Field(..., gt=0)
    schemes: List[ColoringScheme]
    workers: int = Field(1, ge=1)
    allow_experimental: bool = False


class OutputFormat(str, Enum):
    TEXT = "text"
    RECORDS = "records"


class CliConfig(BaseModel):
    """Validated command line, built before any computation starts."""
    subcommand: str
    notations: List[str] = Field(default_factory=list)
    n_max: Optional[int] = Field(None, ge=0)
    budget_n: Optional[int] = Field(None, ge=0)
    budget_nodes: Optional[int] = Field(None, gt=0)
    schemes: List[ColoringScheme] = Field(default_factory=list)
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[Path] = None
    table_path: Optional[Path] = None
    emit_path: bool = False
