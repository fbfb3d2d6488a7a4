"""Tests for run config loading and validation."""

import json
from pathlib import Path

import pytest

from gpderain.core.exceptions import ConfigError
from gpderain.models.loader import load_run_spec
from gpderain.models.run_spec import RunSpec
from gpderain.models.train_config import TrainConfig


@pytest.fixture
def config_dir(temp_dir):
    path = temp_dir / "configs"
    path.mkdir()
    return path


class TestRunSpecLoader:
    """Tests for load_run_spec."""

    def test_defaults_without_file(self):
        """Test that no path yields the default run."""
        spec = load_run_spec()
        assert spec.name == "gpderain"
        assert spec.train.gp_mode == "syn2real++"
        assert spec.synth.source.rain.orientation_deg == 70.0

    def test_load_yaml(self, config_dir):
        config = config_dir / "run.yaml"
        config.write_text(
            """
name: small
model:
  crop: 32
train:
  epochs: 3
  kernel: RQ
"""
        )
        spec = load_run_spec(str(config))
        assert spec.name == "small"
        assert spec.model.crop == 32
        assert spec.train.epochs == 3
        assert spec.train.kernel == "rq"

    def test_load_json(self, config_dir):
        config = config_dir / "run.json"
        config.write_text(json.dumps({"train": {"seed": 9}}))
        assert load_run_spec(str(config)).train.seed == 9

    def test_inheritance(self, config_dir):
        """Test that extends merges parent blocks under the child."""
        (config_dir / "base.yaml").write_text(
            """
name: base
train:
  lr: 0.001
  epochs: 10
synth:
  target:
    name: target
    rain:
      orientation_deg: 120
"""
        )
        (config_dir / "child.yaml").write_text(
            """
extends: base.yaml
name: child
train:
  epochs: 2
"""
        )
        spec = load_run_spec(str(config_dir / "child.yaml"))
        assert spec.name == "child"
        assert spec.train.lr == 0.001
        assert spec.train.epochs == 2
        assert spec.synth.target.rain.orientation_deg == 120
        assert spec.extends is None

    def test_inheritance_cycle(self, config_dir):
        (config_dir / "a.yaml").write_text("extends: b.yaml\n")
        (config_dir / "b.yaml").write_text("extends: a.yaml\n")
        with pytest.raises(ConfigError, match="Cycle"):
            load_run_spec(str(config_dir / "a.yaml"))

    def test_missing_parent(self, config_dir):
        (config_dir / "child.yaml").write_text("extends: nowhere.yaml\n")
        with pytest.raises(ConfigError, match="Parent config not found"):
            load_run_spec(str(config_dir / "child.yaml"))

    def test_missing_file(self, config_dir):
        with pytest.raises(ConfigError, match="not found"):
            load_run_spec(str(config_dir / "absent.yaml"))

    def test_invalid_yaml(self, config_dir):
        (config_dir / "bad.yaml").write_text("train: [unclosed\n")
        with pytest.raises(ConfigError, match="Invalid"):
            load_run_spec(str(config_dir / "bad.yaml"))

    def test_not_a_mapping(self, config_dir):
        (config_dir / "list.yaml").write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_run_spec(str(config_dir / "list.yaml"))

    def test_unknown_key(self, config_dir):
        """Test that typos fail validation instead of being ignored."""
        (config_dir / "typo.yaml").write_text("train:\n  learning_rate: 0.1\n")
        with pytest.raises(ConfigError, match="validation failed"):
            load_run_spec(str(config_dir / "typo.yaml"))

    def test_relative_paths_resolve_against_declaring_file(self, config_dir):
        nested = config_dir / "nested"
        nested.mkdir()
        (config_dir / "base.yaml").write_text(
            """
data:
  labeled: data/source/train/manifest.json
  eval:
    target: data/target/test/manifest.json
"""
        )
        (nested / "child.yaml").write_text("extends: ../base.yaml\n")
        spec = load_run_spec(str(nested / "child.yaml"))
        expected = (config_dir / "data" / "source" / "train" / "manifest.json").resolve()
        assert spec.data.labeled == str(expected)
        assert spec.data.eval["target"].startswith(str(config_dir.resolve()))

    def test_urls_left_alone(self, config_dir):
        (config_dir / "remote.yaml").write_text("data:\n  labeled: s3://bucket/manifest.json\n")
        assert load_run_spec(str(config_dir / "remote.yaml")).data.labeled == "s3://bucket/manifest.json"

    def test_overrides_win(self, config_dir):
        (config_dir / "run.yaml").write_text("train:\n  seed: 1\n  epochs: 4\n")
        spec = load_run_spec(str(config_dir / "run.yaml"), {"train": {"seed": 5}})
        assert spec.train.seed == 5
        assert spec.train.epochs == 4

    def test_invalid_override(self):
        with pytest.raises(ConfigError):
            load_run_spec(overrides={"train": {"gp_mode": "sideways"}})

    def test_snapshot_reloads_identically(self, config_dir):
        """Test that a resolved snapshot reproduces the run."""
        spec = load_run_spec(overrides={"train": {"kernel": "se", "seed": 4}, "name": "snap"})
        path = config_dir / "resolved.json"
        path.write_text(json.dumps(spec.snapshot()))
        assert load_run_spec(str(path)) == spec


SHIPPED_CONFIGS = Path(__file__).resolve().parents[2] / "configs"


class TestShippedConfigs:
    """The configs/ directory loads cleanly."""

    def test_desk(self):
        spec = load_run_spec(str(SHIPPED_CONFIGS / "desk.yaml"))
        assert spec.model.crop == 64
        assert spec.model.bottleneck_channels == 64
        assert spec.train.epochs == 15
        assert spec.synth.target.rain.density == 16.0

    def test_smoke_extends_desk(self):
        spec = load_run_spec(str(SHIPPED_CONFIGS / "smoke.yaml"))
        assert spec.name == "smoke"
        assert spec.model.crop == 32
        assert spec.synth.source.name == "source"
        assert spec.synth.source.rain.orientation_deg == 70.0
        assert spec.synth.source.n_train == 16


class TestTrainConfig:
    """Validation rules of TrainConfig."""

    def test_neighbours_exceed_bank(self):
        with pytest.raises(ValueError, match="exceeds bank_max_entries"):
            TrainConfig(n_neighbors=10, bank_max_entries=4)

    def test_neighbours_ignored_when_gp_off(self):
        assert TrainConfig(n_neighbors=10, bank_max_entries=4, gp_mode="off").gp_mode == "off"

    def test_loss_weights(self):
        weights = TrainConfig(lambda_p=0.1, lambda_unsup=0.01).loss_weights()
        assert (weights.lambda_p, weights.lambda_unsup) == (0.1, 0.01)

    def test_synth_domain_names_must_differ(self):
        with pytest.raises(ValueError, match="different names"):
            RunSpec.from_dict({"synth": {"target": {"name": "source"}}})
