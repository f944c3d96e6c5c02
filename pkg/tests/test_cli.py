"""
End-to-end tests of the command line.
"""

import json
import sys
from pathlib import Path

import jsonschema
import pandas as pd
import pytest
from click.testing import CliRunner
from loguru import logger

from main import cli
from src.config import settings
from src.services.orchestrator import SCHEMA_MODELS

UNIT_MODEL = {"family": "badic", "b": 2, "levels": [{"law": {"kind": "deterministic"}}]}
CANONICAL_MODEL = {"family": "badic", "b": 2, "levels": [{"law": {"kind": "atomic", "atoms": [
    {"value": 0.5, "probability": 0.5}, {"value": 1.5, "probability": 0.5}]}}]}
SCALED_MODEL = {"family": "badic", "b": 2, "levels": [{"law": {"kind": "deterministic", "value": 1.1}}]}
SCHEMA_DIR = Path(__file__).parent.parent / "schemas"


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    """No log files; loguru is reset after each invocation."""
    monkeypatch.setattr(settings, "log_dir", "")
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


def write_config(tmp_path, model, **extra):
    document = {
        "name": "test",
        "model": model,
        "seed": 3,
        "n_max": 4,
        "replicas": 20,
        "simulate": {"generations": [2, 4]},
        "phi": {"empirical": False},
        "verify": {"t_list": [0.5], "n_values": [2], "trend_range": [2, 4], "ratio_range": [2, 4]},
    }
    document.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document, indent=2))
    return str(path)


class TestSimulate:
    """Test the simulate command."""

    def test_unit_weights(self, tmp_path):
        """Test W = 1 writes F_n(t) = t."""
        config = write_config(tmp_path, UNIT_MODEL)
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["simulate", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(out / "paths_n4.csv", comment="#")
        assert list(frame.columns) == ["t", "re_F", "im_F", "n"]
        assert (frame["re_F"] - frame["t"]).abs().max() < 1e-12
        assert (out / "manifest.json").exists()

    def test_rerun_is_identical(self, tmp_path):
        """Test two runs with the same config and seed write the same bytes."""
        config = write_config(tmp_path, CANONICAL_MODEL)
        runner = CliRunner()
        for name in ("a", "b"):
            result = runner.invoke(cli, ["simulate", "--config", config, "--out", str(tmp_path / name)])
            assert result.exit_code == 0, result.output
        for name in ("paths_n2.csv", "paths_n4.csv", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_override(self, tmp_path):
        """Test --seed replaces the config seed in the manifest but not the hash."""
        config = write_config(tmp_path, CANONICAL_MODEL)
        runner = CliRunner()
        runner.invoke(cli, ["simulate", "--config", config, "--out", str(tmp_path / "a")])
        result = runner.invoke(cli, ["simulate", "--config", config, "--seed", "99", "--out", str(tmp_path / "b")])
        assert result.exit_code == 0, result.output
        first = json.loads((tmp_path / "a" / "manifest.json").read_text())
        second = json.loads((tmp_path / "b" / "manifest.json").read_text())
        assert second["seed"] == 99
        assert first["config_hash"] == second["config_hash"]

    def test_invalid_config(self, tmp_path):
        """Test a schema error exits with code 2."""
        config = write_config(tmp_path, dict(UNIT_MODEL, b=1))
        result = CliRunner().invoke(cli, ["simulate", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2


class TestPhi:
    """Test the phi command."""

    def test_canonical(self, tmp_path):
        """Test phi(2) = 0.678072 and the converging verdict."""
        config = write_config(tmp_path, CANONICAL_MODEL)
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["phi", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "ConvergesUniformly" in result.output
        report = json.loads((out / "phi_report.json").read_text())
        phi_2 = [point["value"] for point in report["closed_form"] if point["p"] == 2.0][0]
        assert phi_2 == pytest.approx(0.678072, abs=1e-6)
        assert report["verdict"]["kind"] == "ConvergesUniformly"
        assert report["seed"] == 3


class TestVerify:
    """Test the verify command."""

    def test_unit_weights_pass(self, tmp_path):
        """Test W = 1 passes every check."""
        config = write_config(tmp_path, UNIT_MODEL)
        result = CliRunner().invoke(cli, ["verify", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 0, result.output
        assert "All checks passed" in result.output

    def test_mis_normalized_fails(self, tmp_path):
        """Test W = 1.1 fails the martingale check and exits with code 3."""
        config = write_config(tmp_path, SCALED_MODEL)
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["verify", "--config", config, "--out", str(out)])
        assert result.exit_code == 3
        report = json.loads((out / "verify_report.json").read_text())
        martingale = [check for check in report["checks"] if check["name"] == "martingale"][0]
        assert not martingale["passed"]


class TestSpectrum:
    """Test the spectrum command."""

    def test_unit_weights(self, tmp_path):
        """Test F = t gives a regularity estimate of 1."""
        config = write_config(tmp_path, UNIT_MODEL, n_max=8)
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["spectrum", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "spectrum_report.json").read_text())
        assert report["gamma_regularity"] == pytest.approx(1.0)
        assert report["n_range"] == [4, 8]
        assert (out / "histogram_n8.csv").exists()

    def test_pointwise_holder(self, tmp_path):
        """Test the report carries the pointwise exponent 1 of F = t."""
        config = write_config(tmp_path, UNIT_MODEL, n_max=8, spectrum={"holder_points": [0.3, 0.0]})
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["spectrum", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "spectrum_report.json").read_text())
        assert [point["t"] for point in report["pointwise"]] == [0.3, 0.0]
        assert [point["exponent"] for point in report["pointwise"]] == pytest.approx([1.0, 1.0])

    @pytest.mark.parametrize("spectrum", [{"q_list": [0.5, 2.5]}, {"q_list": [-0.1]}, {"holder_points": [1.0]}])
    def test_out_of_range_options(self, tmp_path, spectrum):
        """Test orders outside [0, 2] and points outside [0, 1) are config errors."""
        config = write_config(tmp_path, UNIT_MODEL, n_max=8, spectrum=spectrum)
        result = CliRunner().invoke(cli, ["spectrum", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2


class TestSchema:
    """Test the schema command."""

    def test_writes_schemas(self, tmp_path):
        """Test one schema per model."""
        out = tmp_path / "schemas"
        result = CliRunner().invoke(cli, ["schema", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in out.iterdir()) == [
            "manifest.schema.json", "phi_report.schema.json", "run_config.schema.json",
            "spectrum_report.schema.json", "verify_report.schema.json"]
        schema = json.loads((out / "run_config.schema.json").read_text())
        assert "model" in schema["properties"]


def test_info(tmp_path):
    """Test info prints the verdict without sampling."""
    config = write_config(tmp_path, CANONICAL_MODEL)
    result = CliRunner().invoke(cli, ["info", "--config", config])
    assert result.exit_code == 0, result.output
    assert "ConvergesUniformly" in result.output


def shipped_schema(name: str) -> dict:
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


class TestShippedSchemas:
    """Test the schemas kept under schemas/ against the models and the written reports."""

    @pytest.mark.parametrize("name", sorted(SCHEMA_MODELS))
    def test_matches_model(self, name):
        """Test each shipped schema is valid and lists the model's fields."""
        shipped = shipped_schema(name)
        generated = SCHEMA_MODELS[name].model_json_schema()
        jsonschema.Draft202012Validator.check_schema(shipped)
        assert shipped["title"] == generated["title"]
        assert set(shipped["properties"]) == set(generated["properties"])
        assert set(shipped.get("required", [])) == set(generated.get("required", []))

    def test_config_validates(self, tmp_path):
        """Test a run config document validates against the shipped config schema."""
        config = write_config(tmp_path, CANONICAL_MODEL, spectrum={"q_list": [1.0, 2.0], "holder_points": [0.5]})
        jsonschema.validate(json.loads(Path(config).read_text()), shipped_schema("run_config"))

    @pytest.mark.parametrize("command, report, model", [
        ("phi", "phi_report", CANONICAL_MODEL),
        ("spectrum", "spectrum_report", CANONICAL_MODEL),
        ("verify", "verify_report", UNIT_MODEL),
    ])
    def test_reports_validate(self, tmp_path, command, report, model):
        """Test written reports and manifests validate against the shipped schemas."""
        config = write_config(tmp_path, model, n_max=6, simulate={"generations": [2]},
                              spectrum={"holder_points": [0.25]})
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, [command, "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        jsonschema.validate(json.loads((out / f"{report}.json").read_text()), shipped_schema(report))
        jsonschema.validate(json.loads((out / "manifest.json").read_text()), shipped_schema("manifest"))
