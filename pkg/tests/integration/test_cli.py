"""Integration tests for the gpderain command line."""

import json
import logging

import numpy as np
import pytest
from click.testing import CliRunner

from gpderain.cli.main import main
from gpderain.rainsynth import DatasetManifest, read_png

TINY_CONFIG = """
name: tiny_cli
model:
  base_channels: 4
  latent_channels: 8
  bottleneck_channels: 8
  res2_scale: 2
  crop: 16
train:
  epochs: 1
  batch: 2
  n_neighbors: 2
  bank_max_entries: 4
  lambda_p: 0.0
  sample_images: 0
synth:
  n_textures: 4
  image_size: 16
  source:
    name: source
    n_train: 4
    n_test: 2
  target:
    name: target
    n_train: 4
    n_test: 2
"""


def invoke(*args):
    return CliRunner().invoke(main, ["--log-level", "ERROR", *args])


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """Commands bind a handler to the runner's stderr; drop it after each test."""
    yield
    logging.getLogger("gpderain").handlers.clear()


@pytest.fixture
def config_file(temp_dir):
    path = temp_dir / "tiny.yaml"
    path.write_text(TINY_CONFIG)
    return path


@pytest.fixture
def data_dir(temp_dir, config_file):
    out = temp_dir / "data"
    result = invoke("synth", "--config", str(config_file), "--out", str(out))
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture
def run_dir(temp_dir, data_dir):
    out = temp_dir / "run"
    result = invoke(
        "train", "--config", str(data_dir / "resolved_config.json"), "--out", str(out)
    )
    assert result.exit_code == 0, result.output
    return out


@pytest.mark.integration
class TestCli:
    """End-to-end runs of each command."""

    def test_synth_writes_manifests(self, data_dir):
        """Test that synth lays out one manifest per domain and split."""
        for domain in ("source", "target"):
            for split in ("train", "test"):
                assert (data_dir / domain / split / "manifest.json").exists()
        assert (data_dir / "resolved_config.json").exists()

    def test_train_from_resolved_config(self, run_dir):
        """Test that train writes a checkpoint, a bank and a run log."""
        assert (run_dir / "checkpoint.arrow").exists()
        assert (run_dir / "bank.arrow").exists()
        assert (run_dir / "runlog.jsonl").exists()

    def test_train_flags_override_config(self, temp_dir, data_dir):
        """Test that --gp-mode off skips the bank."""
        out = temp_dir / "sup"
        result = invoke(
            "train",
            "--config",
            str(data_dir / "resolved_config.json"),
            "--out",
            str(out),
            "--gp-mode",
            "off",
        )
        assert result.exit_code == 0, result.output
        assert "gp_mode=off" in result.output
        assert not (out / "bank.arrow").exists()

    def test_train_missing_manifest_is_a_usage_error(self, temp_dir, config_file):
        """Test that a missing labeled manifest exits 2 and names the path."""
        broken = temp_dir / "broken.yaml"
        broken.write_text(
            f"extends: {config_file.name}\ndata:\n  labeled: {temp_dir / 'nope.json'}\n"
        )
        result = invoke("train", "--config", str(broken), "--out", str(temp_dir / "run"))
        assert result.exit_code == 2
        assert "nope.json" in result.output

    def test_eval_prints_table(self, temp_dir, data_dir, run_dir):
        """Test that eval prints a score row and writes the report."""
        result = invoke(
            "eval",
            "--checkpoint",
            str(run_dir / "checkpoint.arrow"),
            "--manifest",
            str(data_dir / "source" / "test" / "manifest.json"),
            "--out",
            str(temp_dir / "report"),
        )
        assert result.exit_code == 0, result.output
        assert "PSNR" in result.output
        assert "source" in result.output
        assert (temp_dir / "report" / "report.json").exists()

    def test_init_and_derain_identity(self, temp_dir, data_dir, config_file):
        """Test that an identity checkpoint returns the input image unchanged."""
        ckpt = temp_dir / "identity.arrow"
        result = invoke("init", "--config", str(config_file), "--out", str(ckpt), "--identity")
        assert result.exit_code == 0, result.output
        assert "identity" in result.output

        manifest = DatasetManifest.load(str(data_dir / "target" / "test" / "manifest.json"))
        image_in = manifest.resolve(manifest.records[0].rainy)
        out = temp_dir / "derained.png"
        result = invoke("derain", "--checkpoint", str(ckpt), "--in", image_in, "--out", str(out))
        assert result.exit_code == 0, result.output
        np.testing.assert_array_equal(read_png(str(out)), read_png(image_in))

    def test_gp_inspect_json(self, data_dir, run_dir):
        """Test that a labeled image retrieves itself from the bank the run wrote."""
        manifest = DatasetManifest.load(str(data_dir / "source" / "train" / "manifest.json"))
        result = invoke(
            "gp-inspect",
            "--checkpoint",
            str(run_dir / "checkpoint.arrow"),
            "--bank",
            str(run_dir / "bank.arrow"),
            "--in",
            manifest.resolve(manifest.records[0].rainy),
            "--nn",
            "2",
            "--json",
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output[result.output.index("{") :])
        assert report["mode"] == "per-feature-map"
        neighbors = report["neighbors"]
        assert len(neighbors) == 2
        assert neighbors[0]["image_id"] == manifest.records[0].id
        assert neighbors[0]["score"] == pytest.approx(1.0)
        eig_min, eig_max = report["sigma_eigenvalue_range"]
        assert 1.0 - 1e-6 <= eig_min <= eig_max

    def test_gp_inspect_mode_mismatch(self, data_dir, run_dir):
        """Test that asking for the other bank mode fails with exit 1."""
        manifest = DatasetManifest.load(str(data_dir / "target" / "train" / "manifest.json"))
        result = invoke(
            "gp-inspect",
            "--checkpoint",
            str(run_dir / "checkpoint.arrow"),
            "--bank",
            str(run_dir / "bank.arrow"),
            "--in",
            manifest.resolve(manifest.records[0].rainy),
            "--gp-mode",
            "syn2real",
        )
        assert result.exit_code == 1
        assert "GP inspection failed" in result.output


@pytest.mark.integration
class TestValidateCommand:
    """Tests for the validate command."""

    def test_valid_config(self, config_file):
        """Test that a valid config is reported with its name."""
        result = invoke("validate", "--config", str(config_file))
        assert result.exit_code == 0, result.output
        assert "✓ Config 'tiny_cli' is valid" in result.output
        assert "crop 16" in result.output

    def test_unknown_key(self, temp_dir):
        """Test that an unknown key exits 2."""
        path = temp_dir / "bad.yaml"
        path.write_text("train:\n  epochz: 3\n")
        result = invoke("validate", "--config", str(path))
        assert result.exit_code == 2
        assert "Config error" in result.output

    def test_missing_file_is_rejected_by_click(self, temp_dir):
        """Test that a nonexistent --config path is a usage error."""
        result = invoke("validate", "--config", str(temp_dir / "missing.yaml"))
        assert result.exit_code == 2
