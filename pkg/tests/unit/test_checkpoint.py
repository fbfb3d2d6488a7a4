"""Unit tests for tensor containers and checkpoints."""

import numpy as np
import pytest

from gpderain.core import storage
from gpderain.core.exceptions import CheckpointError, ShapeError
from gpderain.model.checkpoint import load_checkpoint, save_checkpoint
from gpderain.models.model_config import ModelConfig


@pytest.mark.unit
class TestTensorContainer:
    """Tests for write_tensors / read_tensors."""

    def test_float64_bit_exact(self, temp_dir, rng):
        values = {"a": rng.normal(size=(2, 3, 4)), "b": np.array([np.pi, -0.0, 1e-300])}
        path = str(temp_dir / "t.arrow")
        storage.write_tensors(path, values, kind="test", metadata={"note": "x"})
        loaded, metadata = storage.read_tensors(path, kind="test")
        assert list(loaded) == ["a", "b"]
        for name in values:
            assert loaded[name].tobytes() == values[name].tobytes()
        assert metadata == {"note": "x"}

    def test_wrong_kind(self, temp_dir):
        path = str(temp_dir / "t.arrow")
        storage.write_tensors(path, {"a": np.zeros(2)}, kind="bank")
        with pytest.raises(CheckpointError, match="Expected a checkpoint"):
            storage.read_tensors(path, kind="checkpoint")

    def test_not_a_container(self, temp_dir):
        path = temp_dir / "junk.arrow"
        path.write_bytes(b"not arrow at all")
        with pytest.raises(CheckpointError):
            storage.read_tensors(str(path), kind="checkpoint")

    def test_atomic_write_leaves_no_temp(self, temp_dir):
        storage.atomic_write_bytes(str(temp_dir / "sub" / "f.bin"), b"123")
        assert sorted(p.name for p in (temp_dir / "sub").iterdir()) == ["f.bin"]


@pytest.mark.unit
class TestCheckpoint:
    """Tests for save_checkpoint / load_checkpoint."""

    def test_round_trip(self, tiny_net, temp_dir, rng):
        path = str(temp_dir / "ckpt.arrow")
        save_checkpoint(path, tiny_net, extra={"epoch": 3})
        net, extra = load_checkpoint(path)
        assert extra == {"epoch": 3}
        assert net.config == tiny_net.config
        x = rng.uniform(size=(1, 3, 16, 16))
        np.testing.assert_array_equal(net.derain(x).data, tiny_net.derain(x).data)

    def test_config_mismatch_names_both_shapes(self, tiny_net, temp_dir):
        path = str(temp_dir / "ckpt.arrow")
        save_checkpoint(path, tiny_net)
        other = ModelConfig(
            base_channels=6, latent_channels=8, bottleneck_channels=8, res2_scale=2, crop=16
        )
        with pytest.raises(ShapeError) as exc_info:
            load_checkpoint(path, config=other)
        message = str(exc_info.value)
        assert "(4, 3, 3, 3)" in message and "(6, 3, 3, 3)" in message

    def test_missing_file(self, temp_dir):
        with pytest.raises(CheckpointError):
            load_checkpoint(str(temp_dir / "absent.arrow"))
