from __future__ import annotations

import json
from unittest.mock import patch

import pytest

from relkit.cli import (
    EXIT_CAP,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VIOLATION,
    build_parser,
    main,
    run,
)
from relkit.services.verify import BatteryReport, CheckResult
from relkit.utils.parsing import parse_group_spec


def _run(capsys, *argv: str) -> tuple[int, dict]:
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestParser:
    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_common_flags_after_command(self):
        args = build_parser().parse_args(["order", "C5@5", "--threads", "2", "-vv"])
        assert args.threads == 2
        assert args.verbose == 2

    def test_closure_k_appends(self):
        args = build_parser().parse_args(["closure", "C5@5", "--k", "1", "--k", "2"])
        assert args.k == [1, 2]


class TestCommands:
    def test_order(self, capsys):
        code, report = _run(capsys, "order", "Dihedral(5)")
        assert code == EXIT_OK
        assert report["command"] == "order"
        assert report["results"]["order"] == 10
        assert report["results"]["primitive"] is True
        assert report["inputs"]["group"] == "Dihedral(5)"
        assert report["inputs"]["limits"]["threads"] == 1
        assert "seconds" in report["timing"]

    def test_census(self, capsys):
        code, report = _run(capsys, "census", "C5@5")
        assert code == EXIT_OK
        assert report["results"]["regular_count_by_size"] == {"1": 5, "2": 10, "3": 10, "4": 5}

    def test_census_cap(self, capsys):
        code, report = _run(capsys, "census", "D10@5", "--census-work-cap", "8")
        assert code == EXIT_CAP
        assert report["caps_hit"] == ["census_work_cap"]
        assert report["results"]["cap"] == "census_work_cap"

    def test_census_sampling_fallback(self, capsys):
        code, report = _run(
            capsys, "census", "C5@5", "--census-work-cap", "1", "--sample", "100", "--seed", "3"
        )
        assert code == EXIT_OK
        assert report["caps_hit"] == ["census"]
        assert report["results"]["regular_set"] is not None

    def test_orbits(self, capsys):
        code, report = _run(capsys, "orbits", "C5@5")
        assert code == EXIT_OK
        assert report["results"]["burnside_count"] == 8

    def test_orbits_layer(self, capsys):
        _, report = _run(capsys, "orbits", "C5@5", "--k", "2")
        assert "burnside_count" not in report["results"]

    def test_closure(self, capsys):
        code, report = _run(capsys, "closure", "C4@4", "--k", "2")
        assert code == EXIT_OK
        assert report["results"]["star_order"] == 8
        assert report["results"]["closure"]["degree"] == 4

    def test_relation_group(self, capsys):
        code, report = _run(capsys, "relation-group", "Klein@4")
        assert code == EXIT_OK
        assert report["results"]["r_of_G"] == 2

    def test_invariance_group(self, capsys, relation_file):
        path = relation_file(5, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]])
        code, report = _run(capsys, "invariance-group", "--relation", str(path))
        assert code == EXIT_OK
        assert report["results"]["order"] == 10

    def test_wreath(self, capsys):
        code, report = _run(capsys, "wreath", "Cyclic(3)", "Cyclic(2)")
        assert code == EXIT_OK
        assert report["results"]["order"] == 18
        assert report["results"]["degree"] == 6

    def test_chains(self, capsys):
        code, report = _run(capsys, "chains", "wr(Cyclic(3),Cyclic(2))")
        assert code == EXIT_OK
        assert len(report["results"]["chains"]) == 1

    def test_chains_of_primitive_group(self, capsys):
        code, report = _run(capsys, "chains", "C5@5")
        assert code == EXIT_ERROR
        assert report["results"]["check"] == "primitive-input"

    def test_classify(self, capsys):
        code, report = _run(capsys, "classify-A", "wr(Cyclic(3),Cyclic(2))")
        assert code == EXIT_OK
        assert report["results"]["label"] == "A_imprimitive"

    def test_define_subgroup(self, capsys, relation_file):
        block = relation_file(5, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]], "block.json")
        top = relation_file(2, [[1], [2]], "top.json")
        code, report = _run(
            capsys,
            "define-subgroup",
            "--k", "D10@5",
            "--top", "Sym(2)",
            "--subgroup", "wr(Dihedral(5),Sym(2))",
            "--block-relation", str(block),
            "--top-relation", str(top),
        )  # fmt: skip
        assert code == EXIT_OK
        assert report["results"]["defined_order"] == report["results"]["subgroup_order"] == 200

    def test_define_subgroup_needs_top_relation(self, capsys, relation_file):
        block = relation_file(5, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]])
        code, _ = _run(
            capsys,
            "define-subgroup",
            "--k", "D10@5",
            "--top", "Sym(2)",
            "--subgroup", "wr(Dihedral(5),Sym(2))",
            "--block-relation", str(block),
        )  # fmt: skip
        assert code == EXIT_PARSE

    def test_export(self, capsys, tmp_path):
        out = tmp_path / "g.json"
        code, report = _run(capsys, "export", "F20@5", "--output", str(out))
        assert code == EXIT_OK
        assert json.loads(out.read_text())["degree"] == 5
        assert report["results"]["written"] == str(out)
        assert parse_group_spec(str(out)).order == 20

    def test_list(self, capsys):
        _, report = _run(capsys, "list", "--degree", "5")
        names = [e["name"] for e in report["results"]["entries"]]
        assert names == ["C5@5", "D10@5", "F20@5", "A5@5", "S5@5"]

    def test_table_format(self, capsys):
        assert run(["order", "C5@5", "--format", "table"]) == EXIT_OK
        assert "relkit order" in capsys.readouterr().out


class TestVerifyPaper:
    def test_pass(self, capsys):
        code, report = _run(capsys, "verify-paper", "--check", "klein-separation")
        assert code == EXIT_OK
        assert report["results"]["passed"] is True
        assert "check.klein-separation" in report["timing"]

    def test_violation_exit_code(self, capsys):
        failed = BatteryReport(level="quick", checks=[CheckResult("x", "fail")])
        with patch("relkit.services.verify.run_battery", return_value=failed):
            code, report = _run(capsys, "verify-paper")
        assert code == EXIT_VIOLATION
        assert report["results"]["passed"] is False


class TestErrors:
    def test_unknown_group(self, capsys):
        code, report = _run(capsys, "order", "Monster")
        assert code == EXIT_PARSE
        assert report["results"]["error"] == "UnknownGroupError"

    def test_parse_error_position(self, capsys):
        code, report = _run(capsys, "order", "(1,2")
        assert code == EXIT_PARSE
        assert report["results"]["position"] == 0

    @pytest.mark.parametrize("command", ["orbits", "closure"])
    def test_layer_out_of_range(self, capsys, command):
        code, report = _run(capsys, command, "Cyclic(5)", "--k", "9")
        assert code == EXIT_ERROR
        assert report["results"]["error"] == "PreconditionError"
        assert report["results"]["check"] == "parameter"

    def test_missing_relation_file(self, capsys, tmp_path):
        code, report = _run(
            capsys, "invariance-group", "--relation", str(tmp_path / "missing.json")
        )
        assert code == EXIT_ERROR
        assert report["results"]["error"] == "FileNotFoundError"

    def test_bad_config(self, capsys, monkeypatch):
        monkeypatch.setenv("RELKIT_THREADS", "zero")
        assert run(["order", "C5@5"]) == EXIT_ERROR
        assert capsys.readouterr().out == ""


class TestInit:
    def test_creates_template(self, capsys, tmp_path):
        assert run(["init"]) == EXIT_OK
        assert "created" in capsys.readouterr().out
        assert (tmp_path / "config" / "relkit.yaml").read_text().startswith("#")

    def test_existing_file_kept(self, capsys, tmp_path):
        dest = tmp_path / "config" / "relkit.yaml"
        dest.parent.mkdir(parents=True)
        dest.write_text("limits: {}\n")
        run(["init"])
        assert "already exists" in capsys.readouterr().out
        assert dest.read_text() == "limits: {}\n"


def test_main_exits_with_code(capsys):
    with patch("sys.argv", ["relkit", "order", "C5@5"]), pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == EXIT_OK
