"""
End-to-end tests: classification runs, tables on disk and the command line.
"""

import json

import pytest

from cli import run
from config.settings import settings
from models.errors import BudgetError, ConfigError, TableFormatError
from models.schemas import ReferenceStatus
from orchestrator import REFERENCE_KNOT_COUNTS, KnotClassificationOrchestrator
from services.coloring import fingerprint
from services.moves import dedupe
from services.notation import EMPTY, Notation, canonical_key


@pytest.fixture(scope="module")
def orchestrator():
    return KnotClassificationOrchestrator(workers=1)


@pytest.fixture(scope="module")
def report_4(orchestrator):
    return orchestrator.classify(4)


@pytest.mark.parametrize("n_max", [0, 1, 2, 3])
def test_classify_small_tables(orchestrator, n_max):
    report = orchestrator.classify(n_max)
    assert report.counts == REFERENCE_KNOT_COUNTS[:n_max + 1]
    assert report.lower_bounds == report.upper_bounds
    assert report.unresolved == []


def test_classify_four_crossings(report_4):
    assert report_4.counts == [1, 0, 0, 1, 1]
    assert report_4.classes[0].representative == "()0"
    assert report_4.classes[0].member_count > 1
    assert [c.crossing_number for c in report_4.classes] == [0, 3, 4]


@pytest.mark.slow
def test_classify_reproduces_the_table_to_seven(orchestrator):
    report = orchestrator.classify(7)
    assert report.counts == [1, 0, 0, 1, 1, 2, 3, 7]
    assert orchestrator.compare_with_reference(report).consistent


def test_build_config_validation(orchestrator):
    with pytest.raises(BudgetError):
        orchestrator.build_config(4, budget_n=3)
    with pytest.raises(ConfigError):
        orchestrator.build_config(-1)
    with pytest.raises(ConfigError):
        orchestrator.build_config(9, allow_experimental=False)
    assert orchestrator.build_config(4).budget_n == 6


def test_table_round_trip(orchestrator, report_4, tmp_path):
    path = tmp_path / "table.tsv"
    orchestrator.save_table(report_4, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines()[-1] == "T\t1,0,0,1,1"
    loaded = orchestrator.load_table(path)
    assert loaded.counts == report_4.counts
    assert [c.representative for c in loaded.classes] == [c.representative for c in report_4.classes]
    assert [c.member_count for c in loaded.classes] == [c.member_count for c in report_4.classes]


def test_truncated_table_names_the_line(orchestrator, report_4, tmp_path):
    path = tmp_path / "table.tsv"
    orchestrator.save_table(report_4, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(TableFormatError, match="line"):
        orchestrator.load_table(path)

    lines[1] = "C\t(1,4)(3,6)(5,2)\t4\t[]"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TableFormatError, match="line 2"):
        orchestrator.load_table(path)


def test_compare_with_reference(orchestrator, report_4):
    assert orchestrator.compare_with_reference(report_4).consistent
    wrong = report_4.model_copy(update={"counts": [1, 0, 0, 2, 1]})
    comparison = orchestrator.compare_with_reference(wrong)
    assert not comparison.consistent
    assert comparison.entries[3].status == ReferenceStatus.MISMATCH
    long = report_4.model_copy(update={"counts": REFERENCE_KNOT_COUNTS + [552]})
    entries = orchestrator.compare_with_reference(long).entries
    assert entries[11].status == ReferenceStatus.BOUND_ONLY
    assert entries[11].reference == 552


def test_cli_colorings(capsys):
    assert run(["colorings", "(1,4)(3,6)(5,2)", "--scheme", "3:2"]) == 0
    assert capsys.readouterr().out == "9\n"
    assert run(["colorings", "(1,4)(3,6)(5,2)", "--scheme", "3:2", "--scheme", "7:2"]) == 0
    assert capsys.readouterr().out == "3:2\t9\n7:2\t7\n"


def test_cli_equiv(capsys):
    assert run(["equiv", "(1,4)(2,3)", "()0", "--emit-path"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "connected"
    assert len(lines) == 2
    assert run(["equiv", "(1,4)(2,3)", "()0", "--format", "records"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["status"] == "connected"
    assert record["path"] is None


def test_cli_canonical_and_realizable(capsys):
    assert run(["canonical", "(6,3)(2,5)(4,1)"]) == 0
    assert capsys.readouterr().out == "(1,4)(3,6)(5,2)\n"
    assert run(["canonical", "(2,1)", "--format", "records"]) == 0
    assert json.loads(capsys.readouterr().out) == {"notation": "(1,2)", "n": 1}
    assert run(["realizable", "(1,3)(2,4)"]) == 0
    assert capsys.readouterr().out.startswith("not realizable (")
    assert run(["realizable", "(1,4)(3,6)(5,2)"]) == 0
    assert capsys.readouterr().out == "realizable 001\n"


@pytest.mark.parametrize("argv, code", [
    (["canonical", "(1,2)(3)"], 2),
    (["colorings", "(1,2)", "--scheme", "4:2"], 2),
    (["segments", "()0"], 1),
    (["equiv", "(1,4)(3,6)(5,2)", "()0", "--budget-n", "2"], 2),
    (["classify", "--max-crossings", "9"], 2),
    (["canonical", "(1,2)", "--bogus"], 2),
    (["compare", "--table", "/nonexistent/table.tsv"], 2),
    (["moves", "(1,3)(2,4)"], 1),
])
def test_cli_exit_codes(argv, code, capsys):
    assert run(argv) == code
    assert capsys.readouterr().err


def test_cli_classify_and_compare(tmp_path, capsys):
    path = tmp_path / "table.tsv"
    assert run(["classify", "--max-crossings", "4", "--out", str(path)]) == 0
    assert capsys.readouterr().out == "1,0,0,1,1\n"
    assert run(["compare", "--table", str(path)]) == 0
    assert "match" in capsys.readouterr().out

    text = path.read_text().replace("T\t1,0,0,1,1", "T\t1,0,0,1,2")
    path.write_text(text)
    assert run(["compare", "--table", str(path)]) == 1


def _class_and_summary_lines(path):
    return [line for line in path.read_text().splitlines() if line[0] in "CT"]


def test_table_without_budget_and_member_records(orchestrator, report_4, tmp_path):
    path = tmp_path / "table.tsv"
    orchestrator.save_table(report_4, path)
    path.write_text("\n".join(_class_and_summary_lines(path)) + "\n")
    loaded = orchestrator.load_table(path)
    assert loaded.counts == report_4.counts
    assert [c.member_count for c in loaded.classes] == [1] * len(report_4.classes)
    assert loaded.budget_n == 4 + settings.extra_crossings
    assert loaded.budget_nodes == settings.budget_nodes


def test_class_and_summary_only_table_compares(orchestrator, report_4, tmp_path, capsys):
    path = tmp_path / "table.tsv"
    orchestrator.save_table(report_4, path)
    path.write_text("\n".join(_class_and_summary_lines(path)) + "\n")
    assert run(["compare", "--table", str(path)]) == 0
    assert "match" in capsys.readouterr().out


@pytest.mark.parametrize("edit, line", [
    (lambda lines: lines + ["C\t(1,2)\t1\t[]"], 7),
    (lambda lines: lines[:-1] + [lines[1], lines[-1]], 6),
    (lambda lines: lines[:-1] + [lines[-2], lines[-1]], 6),
    (lambda lines: lines[:-1] + ["X\t1", lines[-1]], 6),
    (lambda lines: lines[1:2] + lines[:1] + lines[2:], 2),
])
def test_misplaced_records_name_the_line(orchestrator, report_4, tmp_path, edit, line):
    path = tmp_path / "table.tsv"
    orchestrator.save_table(report_4, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(edit(lines)) + "\n")
    with pytest.raises(TableFormatError, match=f"line {line}"):
        orchestrator.load_table(path)


def test_saved_table_is_reproduced_byte_for_byte(orchestrator, report_4, tmp_path):
    first, second = tmp_path / "first.tsv", tmp_path / "second.tsv"
    orchestrator.save_table(report_4, first)
    orchestrator.save_table(orchestrator.load_table(first), second)
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.slow
def test_seven_crossing_table_is_reproduced_byte_for_byte(orchestrator, tmp_path):
    report = orchestrator.classify(7)
    first, second = tmp_path / "first.tsv", tmp_path / "second.tsv"
    orchestrator.save_table(report, first)
    orchestrator.save_table(orchestrator.load_table(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_unknot_diagrams_land_in_the_empty_class(report_4):
    assert report_4.classes[0].representative == "()0"
    assert "(1,2)" not in [c.representative for c in report_4.classes]
    assert "(1,4)(2,3)" not in [c.representative for c in report_4.classes]
    items = [EMPTY, canonical_key(Notation([(2, 1)])), canonical_key(Notation([(1, 4), (2, 3)]))]
    components = dedupe(items, 4, 1000, group_of=lambda v: fingerprint(v).key())
    assert len(components) == 1
    assert components[0][0] == EMPTY
    assert fingerprint(items[2]) == report_4.classes[0].fingerprint


def test_classification_is_deterministic(orchestrator, report_4):
    again = orchestrator.classify(4)
    assert again.model_dump_json() == report_4.model_dump_json()


def test_larger_budgets_only_merge(orchestrator):
    reports = [
        orchestrator.classify(4, orchestrator.build_config(4, budget_nodes=nodes))
        for nodes in (2, 20, settings.budget_nodes)
    ]
    for smaller, larger in zip(reports, reports[1:]):
        assert larger.lower_bounds == smaller.lower_bounds
        assert all(b <= a for a, b in zip(smaller.upper_bounds, larger.upper_bounds))
    assert reports[-1].counts == [1, 0, 0, 1, 1]
