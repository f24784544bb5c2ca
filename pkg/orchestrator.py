"""
Main orchestrator for the prime knot census.
Runs enumerate -> fingerprint -> dedupe and assembles the per-crossing-number table.
"""

import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from config.settings import settings
from models.errors import BudgetError, ConfigError, KnotError, NotationError, TableFormatError
from models.schemas import (
    ClassificationReport,
    ClassifyConfig,
    ColoringScheme,
    Fingerprint,
    KnotClass,
    ReferenceComparison,
    ReferenceEntry,
    ReferenceStatus,
)
from services.coloring import default_schemes, fingerprint
from services.enumeration import check_crossing_gate, enumerate_projections
from services.moves import dedupe
from services.notation import EMPTY, Notation, canonical_key, is_split_composite, parse_notation

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Prime knots by crossing number, 0..10
REFERENCE_KNOT_COUNTS = [1, 0, 0, 1, 1, 2, 3, 7, 21, 49, 165]
# Counts for 11..13 were only established as upper limits
REFERENCE_UPPER_LIMITS = {11: 552, 12: 2191, 13: 29781}


def _assemble_report(
    n_max: int,
    classes: List[KnotClass],
    budget_n: int,
    budget_nodes: int,
) -> ClassificationReport:
    """
    Reduce classes to per-n counts.

    Upper bound: move components per crossing number. Lower bound: fingerprint
    groups, each counted at its least crossing number. Components that share a
    fingerprint are listed as unresolved pairs.
    """
    upper = [0] * (n_max + 1)
    by_fingerprint: Dict[tuple, List[KnotClass]] = defaultdict(list)
    for knot_class in classes:
        upper[knot_class.crossing_number] += 1
        by_fingerprint[knot_class.fingerprint.key()].append(knot_class)

    lower = [0] * (n_max + 1)
    unresolved = []
    for group in by_fingerprint.values():
        lower[min(c.crossing_number for c in group)] += 1
        for a, b in combinations(group, 2):
            unresolved.append((a.representative, b.representative))

    for n in range(n_max + 1):
        if lower[n] > upper[n]:
            logger.error(f"lower bound {lower[n]} exceeds upper bound {upper[n]} at n={n}")
    if unresolved:
        logger.warning(f"{len(unresolved)} unresolved pairs share a fingerprint but were not connected")

    return ClassificationReport(
        n_max=n_max,
        classes=classes,
        counts=list(upper),
        lower_bounds=lower,
        upper_bounds=upper,
        unresolved=sorted(unresolved),
        budget_n=budget_n,
        budget_nodes=budget_nodes,
    )


class KnotClassificationOrchestrator:
    """Runs classifications and reads and writes their tables."""

    def __init__(self, schemes: Optional[Sequence[ColoringScheme]] = None, workers: Optional[int] = None):
        self.schemes = list(schemes) if schemes else default_schemes()
        self.workers = workers if workers is not None else settings.worker_count()
        logger.info(f"Knot classification orchestrator initialized ({len(self.schemes)} schemes, {self.workers} workers)")

    def build_config(
        self,
        n_max: int,
        budget_n: Optional[int] = None,
        budget_nodes: Optional[int] = None,
        schemes: Optional[Sequence[ColoringScheme]] = None,
        allow_experimental: Optional[bool] = None,
    ) -> ClassifyConfig:
        """
        Validate a run configuration before anything is computed.

        Args:
            n_max: Largest crossing number to classify
            budget_n: Crossing cap during move search (default n_max + extra_crossings)
            budget_nodes: Node budget per search (default from settings)
            schemes: Coloring schemes for the fingerprints
            allow_experimental: Lift the crossing-number gate

        Returns:
            ClassifyConfig ready for classify()
        """
        if n_max < 0:
            raise ConfigError(f"n_max must be non-negative, got {n_max}")
        budget_n = n_max + settings.extra_crossings if budget_n is None else budget_n
        if budget_n < n_max:
            raise BudgetError(f"budget_n {budget_n} is below n_max {n_max}")
        allow = settings.allow_experimental if allow_experimental is None else allow_experimental
        check_crossing_gate(n_max, allow)
        try:
            return ClassifyConfig(
                budget_n=budget_n,
                budget_nodes=settings.budget_nodes if budget_nodes is None else budget_nodes,
                schemes=list(schemes) if schemes else self.schemes,
                workers=max(1, self.workers),
                allow_experimental=allow,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def classify(self, n_max: int, config: Optional[ClassifyConfig] = None) -> ClassificationReport:
        """
        Classify prime knots up to n_max crossings.

        Args:
            n_max: Largest crossing number to classify
            config: Validated run configuration (built with defaults when omitted)

        Returns:
            ClassificationReport with counts, bounds and unresolved pairs
        """
        start_time = time.time()
        config = config or self.build_config(n_max)
        budget_n = n_max + settings.extra_crossings if config.budget_n is None else config.budget_n
        if budget_n < n_max:
            raise BudgetError(f"budget_n {budget_n} is below n_max {n_max}")
        check_crossing_gate(n_max, config.allow_experimental)

        try:
            # Step 1: Enumeration
            logger.info(f"Step 1: enumerating projections up to {n_max} crossings")
            keys = {EMPTY}
            for n in range(1, n_max + 1):
                projections = enumerate_projections(n, config.workers, config.allow_experimental)
                keys.update(canonical_key(v) for v in projections)
            composites = {key for key in keys if is_split_composite(key)}
            if composites:
                logger.info(f"Skipping {len(composites)} projections that split into two knotted parts")
            items = sorted(keys - composites)

            # Step 2: Fingerprints
            logger.info(f"Step 2: fingerprinting {len(items)} mirror-identified projections")
            prints = self._fingerprints(items, config)

            # Step 3: Move search
            logger.info(f"Step 3: merging by moves (budget_n={budget_n}, budget_nodes={config.budget_nodes})")
            components = dedupe(items, budget_n, config.budget_nodes, group_of=lambda key: prints[key].key())
        except KnotError as e:
            logger.error(f"Classification up to {n_max} crossings failed: {e}")
            raise

        classes = [
            KnotClass(
                id=index,
                representative=str(component[0]),
                crossing_number=component[0].n,
                fingerprint=prints[component[0]],
                member_count=len(component),
            )
            for index, component in enumerate(components)
        ]
        report = _assemble_report(n_max, classes, budget_n, config.budget_nodes)
        logger.info(f"Classified up to {n_max} crossings in {time.time() - start_time:.2f}s: {report.counts}")
        return report

    def _fingerprints(self, items: List[Notation], config: ClassifyConfig) -> Dict[Notation, Fingerprint]:
        compute = partial(fingerprint, schemes=config.schemes)
        if config.workers > 1 and len(items) > 64:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                prints = list(pool.map(compute, items, chunksize=32))
        else:
            prints = [compute(v) for v in items]
        return dict(zip(items, prints))

    def compare_with_reference(self, report: ClassificationReport) -> ReferenceComparison:
        """
        Compare reported counts with the published table.

        Crossing numbers up to 10 must match exactly; 11..13 only carry upper
        limits and are reported as bound-only.
        """
        entries = []
        for n, reported in enumerate(report.counts):
            if n < len(REFERENCE_KNOT_COUNTS):
                reference = REFERENCE_KNOT_COUNTS[n]
                status = ReferenceStatus.MATCH if reported == reference else ReferenceStatus.MISMATCH
            else:
                reference = REFERENCE_UPPER_LIMITS.get(n)
                status = ReferenceStatus.BOUND_ONLY
            entries.append(ReferenceEntry(n=n, reported=reported, reference=reference, status=status))
        comparison = ReferenceComparison(entries=entries)
        if not comparison.consistent:
            bad = [e.n for e in entries if e.status == ReferenceStatus.MISMATCH]
            logger.warning(f"Counts differ from the reference table at n={bad}")
        return comparison

    def save_table(self, report: ClassificationReport, path: Union[str, Path]) -> None:
        """Write the report as tab-separated records, LF line endings."""
        lines = [f"B\t{report.budget_n},{report.budget_nodes}"]
        for knot_class in report.classes:
            lines.append(
                f"C\t{knot_class.representative}\t{knot_class.crossing_number}\t{knot_class.fingerprint.to_record()}"
            )
        lines.append("M\t" + ",".join(str(c.member_count) for c in report.classes))
        lines.append("T\t" + ",".join(str(c) for c in report.counts))
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
        logger.info(f"Saved {len(report.classes)} classes to {path}")

    def load_table(self, path: Union[str, Path]) -> ClassificationReport:
        """
        Read a classification table.

        Only `C` and `T` records are required. The `B` (budgets) and `M`
        (member counts) records written by save_table are optional; without
        them the settings budgets and a member count of 1 are used.

        Args:
            path: Table file

        Returns:
            ClassificationReport rebuilt from the class records

        Raises:
            TableFormatError: a malformed record, naming its line
        """
        with open(path, encoding="utf-8", newline="") as handle:
            text = handle.read()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise TableFormatError("empty table", 1)

        budgets: Optional[List[int]] = None
        classes: List[KnotClass] = []
        members: Optional[List[int]] = None
        counts: Optional[List[int]] = None
        for line_no, line in enumerate(lines, start=1):
            if counts is not None:
                raise TableFormatError("records after the summary row", line_no)
            tag = line.split("\t", 1)[0]
            if tag == "B":
                if line_no != 1:
                    raise TableFormatError("budget record must come first", line_no)
                budgets = _parse_ints(line, "B", line_no, expected=2)
            elif tag == "C":
                if members is not None:
                    raise TableFormatError("class record after the member counts", line_no)
                classes.append(_parse_class(line, line_no, len(classes)))
            elif tag == "M":
                if members is not None:
                    raise TableFormatError("second member count record", line_no)
                members = _parse_ints(line, "M", line_no, expected=len(classes))
            elif tag == "T":
                counts = _parse_ints(line, "T", line_no)
            else:
                raise TableFormatError(f"unknown record {tag!r}", line_no)
        if counts is None:
            raise TableFormatError("missing summary row", len(lines))
        if not counts:
            raise TableFormatError("summary row without counts", len(lines))

        if members is not None:
            classes = [c.model_copy(update={"member_count": m}) for c, m in zip(classes, members)]
        n_max = len(counts) - 1
        first_class_line = 2 if budgets is not None else 1
        for line_no, knot_class in enumerate(classes, start=first_class_line):
            if knot_class.crossing_number > n_max:
                raise TableFormatError(f"class at n={knot_class.crossing_number} beyond n_max {n_max}", line_no)
        if budgets is None:
            budgets = [n_max + settings.extra_crossings, settings.budget_nodes]
            logger.info(f"{path} has no budget record; using budget_n={budgets[0]}, budget_nodes={budgets[1]}")
        report = _assemble_report(n_max, classes, budgets[0], budgets[1])
        if report.counts != counts:
            raise TableFormatError(f"summary {counts} disagrees with the class records {report.counts}", len(lines))
        return report


def _parse_ints(line: str, tag: str, line_no: int, expected: Optional[int] = None) -> List[int]:
    head, sep, body = line.partition("\t")
    if head != tag or not sep:
        raise TableFormatError(f"expected a {tag} record", line_no)
    fields = body.split(",") if body else []
    if any(not field.isdigit() for field in fields):
        raise TableFormatError(f"non-numeric field in {body!r}", line_no)
    if expected is not None and len(fields) != expected:
        raise TableFormatError(f"expected {expected} values, found {len(fields)}", line_no)
    return [int(field) for field in fields]


def _parse_class(line: str, line_no: int, index: int) -> KnotClass:
    fields = line.split("\t")
    if len(fields) != 4:
        raise TableFormatError(f"class record needs 4 fields, found {len(fields)}", line_no)
    _, notation_text, n_text, record = fields
    try:
        notation = parse_notation(notation_text)
    except NotationError as e:
        raise TableFormatError(f"bad notation: {e}", line_no) from e
    if not n_text.isdigit() or int(n_text) != notation.n:
        raise TableFormatError(f"crossing number {n_text!r} does not match {notation_text}", line_no)
    try:
        fp = Fingerprint.from_record(record)
    except ValueError as e:
        raise TableFormatError(f"bad fingerprint record: {e}", line_no) from e
    return KnotClass(
        id=index,
        representative=notation_text,
        crossing_number=notation.n,
        fingerprint=fp,
    )


# Global orchestrator instance
orchestrator = KnotClassificationOrchestrator()
