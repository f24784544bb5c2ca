"""
Command-line front end for the knot census.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from config.settings import settings
from models.errors import BudgetError, ConfigError, KnotError, NotationError
from models.schemas import CliConfig, ColoringScheme, OutputFormat
from orchestrator import KnotClassificationOrchestrator
from services.coloring import count_colorings, default_schemes, fingerprint
from services.enumeration import enumerate_projections
from services.moves import MoveDescriptor, equivalent, legal_moves
from services.notation import (
    Notation,
    canonicalize,
    mirror,
    orbit,
    parse_notation,
    segment_decomposition,
)
from services.realizability import is_realizable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_USAGE = 2


class _Output:
    """Collects stdout lines in text or JSON-records form."""

    def __init__(self, output_format: OutputFormat):
        self.output_format = output_format

    def line(self, text: str):
        sys.stdout.write(text + "\n")

    def record(self, model: BaseModel, text: str):
        if self.output_format == OutputFormat.RECORDS:
            self.line(model.model_dump_json())
        else:
            self.line(text)


class NotationRecord(BaseModel):
    notation: str
    n: int


class CountRecord(BaseModel):
    notation: str
    scheme: str
    count: int


class MoveResultRecord(BaseModel):
    move: dict
    result: str


def _notation_record(v: Notation) -> NotationRecord:
    return NotationRecord(notation=str(v), n=v.n)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default="text")

    parser = argparse.ArgumentParser(prog="knot-census", description="Prime knot classification by pair notation")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name in ("canonical", "orbit", "mirror", "realizable", "segments", "fingerprint"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("notation")
        if name == "fingerprint":
            p.add_argument("--schemes", default=None, help="comma-separated r:t list")

    p = sub.add_parser("moves", parents=[common])
    p.add_argument("notation")
    p.add_argument("--budget-n", type=int, default=None)

    p = sub.add_parser("equiv", parents=[common])
    p.add_argument("notations", nargs=2)
    p.add_argument("--emit-path", action="store_true")
    p.add_argument("--budget-n", type=int, default=None)
    p.add_argument("--budget-nodes", type=int, default=None)

    p = sub.add_parser("colorings", parents=[common])
    p.add_argument("notation")
    p.add_argument("--scheme", action="append", required=True, help="r:t, repeatable")

    p = sub.add_parser("enumerate", parents=[common])
    p.add_argument("--crossings", type=int, required=True)

    p = sub.add_parser("classify", parents=[common])
    p.add_argument("--max-crossings", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--budget-n", type=int, default=None)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("--schemes", default=None, help="comma-separated r:t list")

    p = sub.add_parser("compare", parents=[common])
    p.add_argument("--table", required=True)
    return parser


def _schemes(args: argparse.Namespace) -> List[ColoringScheme]:
    texts = list(getattr(args, "scheme", None) or [])
    joined = getattr(args, "schemes", None)
    if joined:
        texts.extend(part for part in joined.split(",") if part.strip())
    return [ColoringScheme.parse(text) for text in texts]


def build_config(args: argparse.Namespace) -> CliConfig:
    """Validate parsed arguments; raises before any computation starts."""
    notations = list(getattr(args, "notations", None) or [])
    if getattr(args, "notation", None) is not None:
        notations.append(args.notation)
    for text in notations:
        parse_notation(text)
    n_max = getattr(args, "max_crossings", None)
    if n_max is None:
        n_max = getattr(args, "crossings", None)
    if args.subcommand == "enumerate" and n_max is not None and n_max < 1:
        raise ConfigError(f"--crossings must be at least 1, got {n_max}")
    return CliConfig(
        subcommand=args.subcommand,
        notations=notations,
        n_max=n_max,
        budget_n=getattr(args, "budget_n", None),
        budget_nodes=getattr(args, "budget_nodes", None),
        schemes=_schemes(args),
        output_format=OutputFormat(args.output_format),
        output_path=getattr(args, "out", None),
        table_path=getattr(args, "table", None),
        emit_path=bool(getattr(args, "emit_path", False)),
    )


def _cmd_canonical(config: CliConfig, out: _Output) -> int:
    v = canonicalize(parse_notation(config.notations[0]))
    out.record(_notation_record(v), str(v))
    return EXIT_OK


def _cmd_orbit(config: CliConfig, out: _Output) -> int:
    for v in sorted(orbit(parse_notation(config.notations[0]))):
        out.record(_notation_record(v), str(v))
    return EXIT_OK


def _cmd_mirror(config: CliConfig, out: _Output) -> int:
    v = mirror(parse_notation(config.notations[0]))
    out.record(_notation_record(v), str(v))
    return EXIT_OK


def _cmd_realizable(config: CliConfig, out: _Output) -> int:
    record = is_realizable(parse_notation(config.notations[0])).to_record()
    if record.realizable:
        text = f"realizable {record.witness}" if record.witness else "realizable"
    else:
        text = f"not realizable ({record.reason.value})"
    out.record(record, text)
    return EXIT_OK


def _cmd_segments(config: CliConfig, out: _Output) -> int:
    decomposition = segment_decomposition(parse_notation(config.notations[0]))
    boundaries = ",".join(str(b) for b in decomposition.boundaries)
    out.record(decomposition, f"m={decomposition.m} boundaries={boundaries} projections={decomposition.projections}")
    return EXIT_OK


def _cmd_moves(config: CliConfig, out: _Output) -> int:
    v = parse_notation(config.notations[0])
    budget_n = v.n + settings.extra_crossings if config.budget_n is None else config.budget_n
    for d, result in legal_moves(v, budget_n):
        record = MoveResultRecord(move=d.to_record().model_dump(mode="json"), result=str(result))
        out.record(record, f"{d.describe()}\t{result}")
    return EXIT_OK


def _cmd_equiv(config: CliConfig, out: _Output) -> int:
    a, b = (parse_notation(text) for text in config.notations)
    budget_n = max(a.n, b.n) + settings.extra_crossings if config.budget_n is None else config.budget_n
    budget_nodes = settings.budget_nodes if config.budget_nodes is None else config.budget_nodes
    verdict = equivalent(a, b, budget_n, budget_nodes)
    if config.output_format == OutputFormat.RECORDS:
        if not config.emit_path:
            verdict = verdict.model_copy(update={"path": None})
        out.line(verdict.model_dump_json())
        return EXIT_OK
    out.line(verdict.status.value)
    if config.emit_path and verdict.path is not None:
        for record in verdict.path:
            out.line(MoveDescriptor.from_record(record).describe())
    return EXIT_OK


def _cmd_colorings(config: CliConfig, out: _Output) -> int:
    v = parse_notation(config.notations[0])
    for scheme in config.schemes:
        count = count_colorings(v, scheme)
        text = str(count) if len(config.schemes) == 1 else f"{scheme.label}\t{count}"
        out.record(CountRecord(notation=str(v), scheme=scheme.label, count=count), text)
    return EXIT_OK


def _cmd_fingerprint(config: CliConfig, out: _Output) -> int:
    v = parse_notation(config.notations[0])
    fp = fingerprint(v, config.schemes or default_schemes())
    if config.output_format == OutputFormat.RECORDS:
        out.line(fp.model_dump_json())
        return EXIT_OK
    for entry in fp.entries:
        out.line(f"{entry.r}:{entry.t}\t{entry.counts[0]},{entry.counts[1]}")
    return EXIT_OK


def _cmd_enumerate(config: CliConfig, out: _Output) -> int:
    for v in enumerate_projections(config.n_max):
        out.record(_notation_record(v), str(v))
    return EXIT_OK


def _cmd_classify(config: CliConfig, out: _Output) -> int:
    orchestrator = KnotClassificationOrchestrator(schemes=config.schemes or None)
    run_config = orchestrator.build_config(
        config.n_max,
        budget_n=config.budget_n,
        budget_nodes=config.budget_nodes,
        schemes=config.schemes or None,
    )
    report = orchestrator.classify(config.n_max, run_config)
    if config.output_path is not None:
        orchestrator.save_table(report, config.output_path)
    if config.output_format == OutputFormat.RECORDS:
        out.line(report.model_dump_json())
        return EXIT_OK
    out.line(",".join(str(c) for c in report.counts))
    for a, b in report.unresolved:
        out.line(f"unresolved\t{a}\t{b}")
    return EXIT_OK


def _cmd_compare(config: CliConfig, out: _Output) -> int:
    orchestrator = KnotClassificationOrchestrator()
    comparison = orchestrator.compare_with_reference(orchestrator.load_table(config.table_path))
    for entry in comparison.entries:
        reference = "-" if entry.reference is None else str(entry.reference)
        out.record(entry, f"{entry.n}\t{entry.reported}\t{reference}\t{entry.status.value}")
    return EXIT_OK if comparison.consistent else EXIT_REFUSED


COMMANDS: Dict[str, Callable[[CliConfig, _Output], int]] = {
    "canonical": _cmd_canonical,
    "orbit": _cmd_orbit,
    "mirror": _cmd_mirror,
    "realizable": _cmd_realizable,
    "segments": _cmd_segments,
    "moves": _cmd_moves,
    "equiv": _cmd_equiv,
    "colorings": _cmd_colorings,
    "fingerprint": _cmd_fingerprint,
    "enumerate": _cmd_enumerate,
    "classify": _cmd_classify,
    "compare": _cmd_compare,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        config = build_config(args)
    except (NotationError, ConfigError, ValidationError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE

    try:
        return COMMANDS[config.subcommand](config, _Output(config.output_format))
    except (BudgetError, ConfigError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except KnotError as e:
        logger.error(f"{config.subcommand} refused: {e}")
        sys.stderr.write(f"refused: {e}\n")
        return EXIT_REFUSED


def main():
    """Console entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
