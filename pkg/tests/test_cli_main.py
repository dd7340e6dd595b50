"""
Tests for the command-line driver.
"""

import importlib
import sys

import pytest
from loguru import logger
from openpyxl import load_workbook

from hydro_remap.cli_main import build_parser, cli_main, main
from hydro_remap.config import OUT_DIR_ENV
from hydro_remap.errors import UsageError
from hydro_remap.models import RemapKind
from hydro_remap.output import read_fields


@pytest.fixture(autouse=True)
def reset_logger(monkeypatch):
    """Subcommands install their own sinks; put the package back to silent afterwards."""
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    yield
    logger.remove()
    logger.disable("hydro_remap")


@pytest.fixture
def run_config(tmp_path):
    """Short advect run dumping every step into ``tmp_path / out``."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "\n".join(
            [
                "case = mono_advect",
                "resolution = 10x10",
                "end_time = 0.01",
                f"output_dir = {tmp_path / 'out'}",
                "output_every = 1",
                "log_level = WARNING",
            ]
        ),
        encoding="utf-8",
    )
    return path


class TestParser:
    """Tests for argument parsing."""

    def test_scheme_list(self):
        args = build_parser().parse_args(["converge", "mono_advect", "AD,directcf", "--meshes", "8,16"])
        assert args.schemes == [RemapKind.AD, RemapKind.DIRECT_CF]
        assert args.meshes == [8, 16]

    def test_invalid_scheme_raises(self):
        with pytest.raises(UsageError, match="invalid scheme 'Upwind'"):
            build_parser().parse_args(["converge", "mono_advect", "Upwind"])

    def test_subcommand_required(self):
        with pytest.raises(UsageError, match="required"):
            build_parser().parse_args([])

    @pytest.mark.parametrize(
        "argv",
        [["simulate"], ["run"], ["case-list", "--verbose"], ["analyze", "vortex"]],
        ids=["unknown_subcommand", "missing_config", "unknown_flag", "invalid_choice"],
    )
    def test_argument_errors_print_one_line(self, argv, capsys):
        assert cli_main(argv) == 1
        captured = capsys.readouterr()
        lines = captured.err.strip().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("error: UsageError: ")
        assert "usage:" not in captured.err


class TestRun:
    """Tests for the run subcommand."""

    def test_short_run(self, run_config, tmp_path, capsys):
        assert cli_main(["run", str(run_config), "--max-steps", "2", "--ledger"]) == 0
        out = capsys.readouterr().out
        assert "CONSERVATION LEDGER: mono_advect (DirectCF)" in out
        assert "RUN SUMMARY" in out
        out_dir = tmp_path / "out"
        assert (out_dir / "mono_advect_step000001.csv").exists()
        assert (out_dir / "mono_advect_step000002.csv").exists()
        final = read_fields(out_dir / "mono_advect_final.csv")
        assert len(final) == 100
        assert (out_dir / "diagnostics.log").exists()

    def test_missing_config(self, tmp_path, capsys):
        missing = tmp_path / "missing.cfg"
        assert cli_main(["run", str(missing)]) == 1
        err = capsys.readouterr().err.splitlines()
        assert any(line.startswith("error: FileNotFoundError") and "missing.cfg" in line for line in err)

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("scheme = Foo\n", encoding="utf-8")
        assert cli_main(["run", str(path)]) == 1
        err = capsys.readouterr().err
        assert "error: ConfigError: line 1: scheme: invalid value 'Foo'" in err


class TestOtherCommands:
    """Tests for converge, analyze and case-list."""

    def test_case_list(self, capsys):
        assert cli_main(["case-list"]) == 0
        out = capsys.readouterr().out
        assert "haas" in out
        assert "1000x90" in out
        assert len(out.strip().splitlines()) == 7

    def test_analyze_table(self, capsys):
        assert cli_main(["analyze", "table"]) == 0
        out = capsys.readouterr().out
        assert "One-step curl ratios" in out
        assert "0.98080000" in out
        assert "BBC stability bound" in out

    def test_analyze_singlenode(self, capsys):
        assert cli_main(["analyze", "singlenode"]) == 0
        out = capsys.readouterr().out
        assert "1.21000000" in out

    def test_analyze_linadv(self, capsys):
        assert cli_main(["analyze", "linadv", "--samples", "2"]) == 0
        out = capsys.readouterr().out
        assert "seed    1" in out
        assert "worst:" in out

    def test_converge_to_workbook(self, tmp_path, capsys):
        table = tmp_path / "study.xlsx"
        argv = ["converge", "mono_advect", "Direct", "--meshes", "8,12", "--end-time", "0.01"]
        assert cli_main([*argv, "--out", str(table)]) == 0
        out = capsys.readouterr().out
        assert "CONVERGENCE STUDY: mono_advect" in out
        assert "Fitted slope Direct" in out
        assert load_workbook(table).sheetnames == ["errors", "slopes"]


class TestEntryPoints:
    """The installed console scripts resolve to package callables."""

    @pytest.mark.parametrize(
        ("module", "attr"),
        [
            ("hydro_remap.cli_main", "main"),
            ("hydro_remap.cli_demo", "main"),
            ("hydro_remap.run_tests", "main"),
        ],
    )
    def test_script_targets_resolve(self, module, attr):
        assert callable(getattr(importlib.import_module(module), attr))

    def test_main_exits_with_command_status(self, monkeypatch, capsys):
        monkeypatch.setattr(sys, "argv", ["hydro-remap", "case-list"])
        with pytest.raises(SystemExit) as exc:
            main()
        assert exc.value.code == 0
        assert "haas" in capsys.readouterr().out

    def test_main_exits_nonzero_on_bad_arguments(self, monkeypatch, capsys):
        monkeypatch.setattr(sys, "argv", ["hydro-remap", "simulate"])
        with pytest.raises(SystemExit) as exc:
            main()
        assert exc.value.code == 1
        assert capsys.readouterr().err.startswith("error: UsageError: ")
