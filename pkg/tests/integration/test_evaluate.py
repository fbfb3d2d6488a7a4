"""Integration tests for evaluation and the Python API."""

from pathlib import Path

import numpy as np
import pytest

from gpderain import api
from gpderain.core import storage
from gpderain.core.exceptions import ConfigError, DataError, GPError, ShapeError
from gpderain.gp import rebuild_bank
from gpderain.model.network import DerainNet
from gpderain.models.rain_config import RainParams
from gpderain.objective import psnr
from gpderain.rainsynth import make_domain, read_png
from gpderain.training import CenterCropped, ManifestDataset, evaluate


@pytest.fixture
def identity_net(tiny_config):
    net = DerainNet(tiny_config)
    net.zero_residue()
    return net


@pytest.mark.integration
class TestEvaluate:
    """Tests for evaluate()."""

    def test_identity_scores_input_psnr(self, identity_net, tiny_domains):
        manifest = tiny_domains["source_test"]
        report = evaluate(identity_net, manifest)
        expected = [
            psnr(read_png(manifest.resolve(r.rainy)), read_png(manifest.resolve(r.clean)))
            for r in manifest.records
        ]
        assert report.psnr == pytest.approx(np.mean(expected))
        assert [row["image_id"] for row in report.rows] == [r.id for r in manifest.records]

    def test_rain_free_domain_hits_the_cap(self, identity_net, base_images, temp_dir):
        clean_only = make_domain(
            base_images, RainParams(density=0.0), 3, str(temp_dir / "dry"), True, image_size=16
        )
        report = evaluate(identity_net, clean_only)
        assert report.psnr == 100.0
        assert report.ssim == pytest.approx(1.0)

    def test_missing_records_are_skipped(self, identity_net, tiny_domains):
        manifest = tiny_domains["target_test"]
        Path(manifest.resolve(manifest.records[0].rainy)).unlink()
        report = evaluate(identity_net, manifest)
        assert len(report.rows) == 1
        assert report.skipped[0]["image_id"] == manifest.records[0].id
        assert report.summary()["skipped"] == 1

    def test_repeatable_and_worker_independent(self, tiny_net, tiny_domains):
        manifest = tiny_domains["source_test"]
        first = evaluate(tiny_net, manifest)
        assert evaluate(tiny_net, manifest).rows == first.rows
        assert evaluate(tiny_net, manifest, workers=2).rows == first.rows

    def test_writes_sample_triplets(self, tiny_net, tiny_domains, temp_dir):
        evaluate(tiny_net, tiny_domains["source_test"], sample_dir=str(temp_dir / "s"), samples=1)
        names = sorted(p.name for p in (temp_dir / "s").iterdir())
        assert len(names) == 3
        assert {n.rsplit("_", 1)[1] for n in names} == {"rainy.png", "derained.png", "clean.png"}

    def test_unlabeled_manifest_rejected(self, tiny_net, tiny_domains):
        with pytest.raises(DataError, match="no clean images"):
            evaluate(tiny_net, tiny_domains["target_train"])


@pytest.mark.integration
class TestApi:
    """Tests for the public API functions."""

    def test_synthesize_layout(self, temp_dir):
        run = api.from_config(
            overrides={
                "synth": {
                    "n_textures": 3,
                    "image_size": 16,
                    "source": {"name": "source", "n_train": 3, "n_test": 2},
                    "target": {"name": "target", "n_train": 3, "n_test": 2},
                }
            }
        )
        out = temp_dir / "data"
        paths = api.synthesize(run, str(out))
        assert sorted(paths) == ["source_test", "source_train", "target_test", "target_train"]
        assert paths["target_train"] == f"{out}/target/train/manifest.json"

        report = storage.read_json(str(out / api.SYNTH_REPORT_NAME))
        assert set(report) == {"source_train", "source_test", "target_test"}
        assert 0 < report["source_train"]["input_psnr"] < 100

        resolved = api.from_config(str(out / api.RESOLVED_CONFIG_NAME))
        assert resolved.data.labeled == str((out / "source" / "train" / "manifest.json").resolve())
        assert set(resolved.data.eval) == {"source", "target"}

    def test_synthesize_refuses_overlapping_output(self, temp_dir, base_images):
        from gpderain.rainsynth import write_png

        base = temp_dir / "base"
        write_png(str(base / "a.png"), base_images[0])
        run = api.from_config(overrides={"synth": {"base_images": str(base)}})
        with pytest.raises(ConfigError, match="overlaps"):
            api.synthesize(run, str(base / "out"))

    def test_train_missing_manifest(self, temp_dir):
        run = api.from_config(overrides={"data": {"labeled": str(temp_dir / "nope.json")}})
        with pytest.raises(ConfigError, match="nope.json"):
            api.train(run, str(temp_dir / "run"))

    def test_evaluate_checkpoint_writes_report(self, tiny_net, tiny_domains, temp_dir):
        from gpderain.model.checkpoint import save_checkpoint

        ckpt = str(temp_dir / "ckpt.arrow")
        save_checkpoint(ckpt, tiny_net)
        manifest_path = f"{tiny_domains['source_test'].root}/manifest.json"
        report = api.evaluate_checkpoint(ckpt, manifest_path, out_dir=str(temp_dir / "rep"), samples=1)
        saved = storage.read_json(str(temp_dir / "rep" / api.EVAL_REPORT_NAME))
        assert saved["summary"]["psnr"] == pytest.approx(report.psnr)
        assert (temp_dir / "rep" / "samples").is_dir()

    def test_derain_identity_is_pixel_exact(self, tiny_config, temp_dir, rng):
        from gpderain.rainsynth import quantize, write_png

        ckpt = str(temp_dir / "id.arrow")
        api.write_initial_checkpoint(tiny_config, ckpt, identity=True)
        image = quantize(rng.uniform(size=(3, 20, 27)))
        write_png(str(temp_dir / "in.png"), image)
        api.derain_image(ckpt, str(temp_dir / "in.png"), str(temp_dir / "out.png"))
        np.testing.assert_array_equal(read_png(str(temp_dir / "out.png")), image)

    @pytest.fixture
    def inspect_inputs(self, tiny_config, tiny_domains, temp_dir):
        ckpt = str(temp_dir / "init.arrow")
        net = api.write_initial_checkpoint(tiny_config, ckpt, seed=5)
        source = tiny_domains["source_train"]
        bank_path = str(temp_dir / "bank.arrow")
        bank = rebuild_bank(
            CenterCropped(ManifestDataset(source), 16), net, 4, seed=0, mode="whole-latent"
        )
        bank.export(bank_path)
        return ckpt, bank_path, source

    def test_inspect_self_match(self, inspect_inputs):
        ckpt, bank_path, source = inspect_inputs
        image = source.resolve(source.records[2].rainy)
        report = api.inspect_gp(ckpt, bank_path, image, gp_mode="syn2real", n_neighbors=3)
        assert report.neighbor_ids[0] == source.records[2].id
        assert report.scores[0] == pytest.approx(1.0)
        assert report.sigma_eig_min >= 1.0 - 1e-6
        assert len(report.alpha) == 3
        assert report.mu_reconstruction_error < 1e-8
        assert report.to_dict()["mode"] == "whole-latent"

    def test_inspect_caps_neighbours(self, inspect_inputs):
        ckpt, bank_path, source = inspect_inputs
        report = api.inspect_gp(ckpt, bank_path, source.resolve(source.records[0].rainy), n_neighbors=50)
        assert len(report.neighbor_ids) == 4

    def test_inspect_mode_mismatch(self, inspect_inputs):
        ckpt, bank_path, source = inspect_inputs
        with pytest.raises(GPError, match="whole-latent"):
            api.inspect_gp(ckpt, bank_path, source.resolve(source.records[0].rainy), gp_mode="syn2real++")

    def test_inspect_shape_mismatch(self, inspect_inputs, temp_dir):
        from gpderain.models.model_config import ModelConfig

        _, bank_path, source = inspect_inputs
        other = str(temp_dir / "other.arrow")
        api.write_initial_checkpoint(
            ModelConfig(base_channels=4, latent_channels=4, bottleneck_channels=4, res2_scale=2, crop=16),
            other,
        )
        with pytest.raises(ShapeError):
            api.inspect_gp(other, bank_path, source.resolve(source.records[0].rainy))
