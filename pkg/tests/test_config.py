"""
Tests for run configuration parsing.
"""

import pytest

from hydro_remap.config import OUT_DIR_ENV, load_config, parse_config
from hydro_remap.errors import ConfigError
from hydro_remap.models import CornerScheme, OutputFormat, RemapKind, RunConfig

SAMPLE = """
# advect-and-return on a coarse mesh
case = multi_advect
scheme = AD          # alternate directions
face_order = 1
corner_scheme = avg_min
interface_degrade = no
cfl = 0.25
resolution = 40x20
end_time = 0.02
output_every = 5
output_format = vtk
log_level = debug
"""


class TestParseConfig:
    """Tests for key = value parsing."""

    def test_empty_text_gives_defaults(self):
        assert parse_config("") == RunConfig()

    def test_sample(self):
        config = parse_config(SAMPLE)
        assert config.case == "multi_advect"
        assert config.scheme is RemapKind.AD
        assert config.face_order == 1
        assert config.corner_scheme is CornerScheme.AVG_MIN
        assert config.interface_degrade is False
        assert config.cfl == 0.25
        assert config.resolution == (40, 20)
        assert config.end_time == 0.02
        assert config.output_every == 5
        assert config.output_format is OutputFormat.VTK
        assert config.log_level == "DEBUG"

    def test_enum_by_name_or_value(self):
        assert parse_config("scheme = direct_cf").scheme is RemapKind.DIRECT_CF
        assert parse_config("scheme = DirectCF").scheme is RemapKind.DIRECT_CF

    def test_derived_settings(self):
        config = parse_config("face_order = 1\na1 = 0.5\na2 = 2")
        assert config.recon.face_order == 1
        assert config.viscosity.a1 == 0.5
        assert config.viscosity.a2 == 2.0

    def test_invalid_enum(self):
        with pytest.raises(ConfigError, match="expected one of: AD, Direct, DirectCF") as exc:
            parse_config("scheme = Foo")
        assert exc.value.line == 1
        assert str(exc.value).startswith("line 1: scheme:")

    @pytest.mark.parametrize(
        "text,match,line",
        [
            ("case = mono_advect\nspeed = 3", "unknown key 'speed'", 2),
            ("cfl = 0.3\ncfl = 0.4", "duplicate key 'cfl'", 2),
            ("\n\nend_time =", "missing value for 'end_time'", 3),
            ("just some words", "expected 'key = value'", 1),
            ("case = sedov", "unknown case 'sedov'", 1),
            ("resolution = 40", "expected NXxNY", 1),
            ("interface_degrade = maybe", "invalid boolean", 1),
            ("divisor = two", "divisor", 1),
        ],
        ids=["unknown_key", "duplicate", "missing_value", "no_equals", "case", "resolution", "bool", "int"],
    )
    def test_malformed_lines(self, text, match, line):
        with pytest.raises(ConfigError, match=match) as exc:
            parse_config(text)
        assert exc.value.line == line

    def test_out_of_range_value(self):
        with pytest.raises(ConfigError, match="cfl must lie in") as exc:
            parse_config("cfl = 1.5")
        assert exc.value.line is None


class TestLoadConfig:
    """Tests for reading configuration files."""

    def test_reads_file(self, tmp_path, monkeypatch):
        monkeypatch.delenv(OUT_DIR_ENV, raising=False)
        path = tmp_path / "run.cfg"
        path.write_text("case = haas\ndivisor = 10\noutput_dir = results\n", encoding="utf-8")
        config = load_config(path)
        assert config.case == "haas"
        assert config.divisor == 10
        assert config.output_dir == "results"

    def test_environment_overrides_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "elsewhere"))
        path = tmp_path / "run.cfg"
        path.write_text("output_dir = results\n", encoding="utf-8")
        assert load_config(path).output_dir == str(tmp_path / "elsewhere")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "missing.cfg")
