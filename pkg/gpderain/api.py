"""Public Python API for the gpderain package.

These are the entry points the CLI calls: synthesize domains, train,
evaluate, derain a single image, inspect the GP pathway and write initial
checkpoints.
"""

from __future__ import annotations

import logging
import posixpath
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from gpderain.core import storage
from gpderain.core.exceptions import ConfigError, GPError, ShapeError
from gpderain.core.metrics import RunLog
from gpderain.gp.bank import FeatureBank, bank_mode_for
from gpderain.gp.posterior import pseudo_label
from gpderain.model.checkpoint import load_checkpoint, save_checkpoint
from gpderain.model.network import DerainNet, init_params
from gpderain.models.loader import load_run_spec
from gpderain.models.model_config import ModelConfig
from gpderain.models.run_spec import RunSpec
from gpderain.objective.losses import unsup_loss
from gpderain.objective.metrics import psnr
from gpderain.rainsynth.domain import MANIFEST_NAME, make_domain
from gpderain.rainsynth.imageio import read_png, write_png
from gpderain.rainsynth.manifest import DatasetManifest
from gpderain.rainsynth.render import estimate_streak_angle
from gpderain.rainsynth.textures import load_base_images, procedural_textures
from gpderain.tensor import no_grad, ops
from gpderain.training.data import center_crop
from gpderain.training.evaluate import EvalReport, evaluate
from gpderain.training.inference import tiled_derain
from gpderain.training.trainer import Trainer

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved_config.json"
SYNTH_REPORT_NAME = "synth_report.json"
EVAL_REPORT_NAME = "report.json"


def from_config(path: Optional[str] = None, overrides: Optional[dict[str, Any]] = None) -> RunSpec:
    """Load a run config with inheritance and flag overrides.

    Raises:
        ConfigError: If the file is missing, cyclic or invalid
    """
    return load_run_spec(path, overrides=overrides)


def write_resolved_config(run: RunSpec, out_dir: str) -> str:
    """Write the resolved config snapshot into out_dir and return its path."""
    path = posixpath.join(str(out_dir), RESOLVED_CONFIG_NAME)
    storage.write_json(path, run.snapshot())
    return path


def load_manifest(path: Optional[str], role: str) -> DatasetManifest:
    """Load a manifest that a command needs as input.

    Raises:
        ConfigError: If no path is configured or the file does not exist
        DataError: If the file is not a valid manifest
    """
    if not path:
        raise ConfigError(f"no {role} manifest configured", context={"role": role})
    if not storage.exists(path):
        raise ConfigError(f"{role} manifest not found: {path}", context={"path": str(path)})
    return DatasetManifest.load(path)


def _overlaps(a: str, b: str) -> bool:
    a_path, b_path = Path(a).resolve(), Path(b).resolve()
    return a_path == b_path or a_path in b_path.parents or b_path in a_path.parents


def _domain_stats(manifest: DatasetManifest, limit: int = 16) -> dict[str, Any]:
    """Mean input PSNR over all records plus a streak angle from the first residues."""
    scores, residues = [], []
    for i, record in enumerate(manifest.records):
        rainy = read_png(manifest.resolve(record.rainy))
        clean = read_png(manifest.resolve(record.clean))
        scores.append(psnr(rainy, clean))
        if i < limit:
            residues.append((rainy - clean).mean(axis=0))
    stats: dict[str, Any] = {
        "records": len(manifest),
        "input_psnr": float(np.mean(scores)) if scores else float("nan"),
        "orientation_deg": manifest.params.orientation_deg,
        "density": manifest.params.density,
    }
    if residues and any(np.any(r) for r in residues):
        stats["estimated_angle_deg"] = estimate_streak_angle(np.concatenate(residues, axis=1))
    return stats


def synthesize(run: RunSpec, out_dir: str) -> dict[str, str]:
    """Render the source and target domains of a run config.

    Writes four manifests under out_dir: <source>/train and <source>/test
    (labeled), <target>/train (unlabeled) and <target>/test (labeled, for
    scoring only). Also writes a synth report with the mean input PSNR of
    every labeled split and a resolved config whose data block points at the
    new manifests, so it can be passed straight to `train`.

    Args:
        run: Resolved run config (its synth block is used)
        out_dir: Output directory

    Returns:
        Manifest paths keyed by "<domain>_<split>"

    Raises:
        ConfigError: If out_dir overlaps the base image directory
        DataError: If base images cannot be read or files cannot be written
    """
    synth = run.synth
    if synth.base_images and _overlaps(out_dir, synth.base_images):
        raise ConfigError(
            "output directory overlaps the base image directory",
            context={"out": str(out_dir), "base_images": synth.base_images},
        )

    if synth.base_images:
        base = load_base_images(synth.base_images)
    else:
        base = procedural_textures(synth.n_textures, synth.image_size, synth.texture_seed)

    plan = [
        (synth.source, "train", True, synth.source.n_train),
        (synth.source, "test", True, synth.source.n_test),
        (synth.target, "train", False, synth.target.n_train),
        (synth.target, "test", True, synth.target.n_test),
    ]
    storage.makedirs(out_dir)
    paths: dict[str, str] = {}
    relative: dict[str, str] = {}
    report: dict[str, Any] = {}
    for domain, split, labeled, n in plan:
        split_dir = posixpath.join(str(out_dir), domain.name, split)
        manifest = make_domain(
            base,
            domain.rain,
            n,
            split_dir,
            labeled=labeled,
            domain=domain.name,
            split=split,
            image_size=synth.image_size,
            workers=synth.workers,
        )
        key = f"{domain.name}_{split}"
        paths[key] = posixpath.join(split_dir, MANIFEST_NAME)
        relative[key] = posixpath.join(domain.name, split, MANIFEST_NAME)
        if labeled:
            report[key] = _domain_stats(manifest)

    storage.write_json(posixpath.join(str(out_dir), SYNTH_REPORT_NAME), report)
    resolved = run.model_copy(deep=True)
    resolved.data.labeled = relative[f"{synth.source.name}_train"]
    resolved.data.unlabeled = relative[f"{synth.target.name}_train"]
    resolved.data.eval = {
        synth.source.name: relative[f"{synth.source.name}_test"],
        synth.target.name: relative[f"{synth.target.name}_test"],
    }
    write_resolved_config(resolved, out_dir)

    logger.info("Synthesis finished", extra={"out": str(out_dir), "manifests": len(paths)})
    return paths


def train(
    run: RunSpec, out_dir: str, init_from: Optional[str] = None
) -> tuple[DerainNet, RunLog]:
    """Train per a resolved run config.

    Writes resolved_config.json, checkpoint.arrow, bank.arrow (GP modes),
    runlog.jsonl and epoch sample triplets into out_dir.

    Args:
        run: Resolved run config
        out_dir: Output directory
        init_from: Optional checkpoint to start from instead of a seeded init

    Raises:
        ConfigError: If a configured manifest is missing
        GPDerainError: On any training failure (the last checkpoint is kept)
    """
    labeled = load_manifest(run.data.labeled, "labeled")
    unlabeled = None
    if run.train.gp_mode != "off":
        unlabeled = load_manifest(run.data.unlabeled, "unlabeled")
    eval_sets = {name: load_manifest(path, f"{name} eval") for name, path in run.data.eval.items()}

    net = None
    if init_from is not None:
        net, _ = load_checkpoint(init_from, config=run.model)

    storage.makedirs(out_dir)
    write_resolved_config(run, out_dir)
    trainer = Trainer(run.model, run.train, out_dir, run_name=run.name, net=net)
    return trainer.train(labeled, unlabeled, eval_sets)


def evaluate_checkpoint(
    checkpoint: str,
    manifest_path: str,
    out_dir: Optional[str] = None,
    model: Optional[ModelConfig] = None,
    samples: int = 0,
    workers: int = 1,
) -> EvalReport:
    """Score a checkpoint on a labeled manifest and write report.json.

    Args:
        checkpoint: Checkpoint file
        manifest_path: Labeled manifest
        out_dir: Where report.json and sample triplets go
        model: Model config to build; its shapes must match the checkpoint
        samples: Sample triplets to write
        workers: Images evaluated in parallel

    Raises:
        ShapeError: If `model` disagrees with the checkpoint
    """
    net, _ = load_checkpoint(checkpoint, config=model)
    manifest = load_manifest(manifest_path, "evaluation")
    sample_dir = posixpath.join(str(out_dir), "samples") if out_dir and samples else None
    report = evaluate(net, manifest, workers=workers, sample_dir=sample_dir, samples=samples)
    if out_dir is not None:
        report.save(posixpath.join(str(out_dir), EVAL_REPORT_NAME))
    return report


def derain_image(checkpoint: str, image_in: str, image_out: str) -> np.ndarray:
    """Derain one PNG of any size and write the clamped result.

    Raises:
        DataError: If the input is unreadable
    """
    net, _ = load_checkpoint(checkpoint)
    rainy = read_png(image_in)
    derained = ops.clamp(tiled_derain(net, rainy), 0.0, 1.0).data
    write_png(image_out, derained)
    logger.info("Image derained", extra={"input": str(image_in), "output": str(image_out)})
    return derained


@dataclass
class InspectReport:
    """GP pathway for one image against a bank dump."""

    mode: str
    kernel: dict[str, Any]
    neighbor_ids: list[str]
    scores: list[float]
    sigma_eig_min: float
    sigma_eig_max: float
    unsup_loss: float
    noise: float
    alpha: Optional[list[float]] = None
    mu_reconstruction_error: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        data = {
            "mode": self.mode,
            "kernel": self.kernel,
            "neighbors": [
                {"image_id": i, "score": s} for i, s in zip(self.neighbor_ids, self.scores)
            ],
            "sigma_eigenvalue_range": [self.sigma_eig_min, self.sigma_eig_max],
            "unsup_loss": self.unsup_loss,
            "noise": self.noise,
        }
        if self.alpha is not None:
            data["alpha"] = self.alpha
            data["mu_reconstruction_error"] = self.mu_reconstruction_error
        return data


def inspect_gp(
    checkpoint: str,
    bank_path: str,
    image_in: str,
    gp_mode: Optional[str] = None,
    n_neighbors: int = 32,
    sigma_eps2: float = 1.0,
) -> InspectReport:
    """Run retrieval, posterior and unsup loss for one image.

    The image is center-cropped (or reflect-padded) to the checkpoint's crop.
    In whole-latent mode the combination weights are reported together with
    the max deviation between their weighted sum of neighbours and mu.

    Args:
        checkpoint: Checkpoint file
        bank_path: Bank dump written by training
        image_in: Rainy PNG
        gp_mode: Expected mode ("syn2real" or "syn2real++"); must match the dump
        n_neighbors: N_n, capped at the bank size
        sigma_eps2: Noise variance

    Raises:
        GPError: On a mode mismatch between the dump and the request
        ShapeError: If the bank latents do not match the checkpoint's latent shape
    """
    net, _ = load_checkpoint(checkpoint)
    bank = FeatureBank.load(bank_path)
    if gp_mode is not None and bank_mode_for(gp_mode) != bank.mode:
        raise GPError(
            f"bank dump is {bank.mode} but {gp_mode} was requested",
            context={"bank_mode": bank.mode, "requested": gp_mode, "path": str(bank_path)},
        )
    expected = (net.config.latent_rows, net.config.latent_dim)
    if (bank.rows, bank.cols) != expected:
        raise ShapeError(
            f"bank latents ({bank.rows}, {bank.cols}) do not match checkpoint latents {expected}",
            context={"bank": (bank.rows, bank.cols), "checkpoint": expected},
        )

    image = center_crop(read_png(image_in), net.config.crop)
    with no_grad():
        z_u = net.latent(image[None])[0]
        post = pseudo_label(z_u, bank, min(n_neighbors, len(bank)), sigma_eps2=sigma_eps2)
        loss = unsup_loss(z_u, post).item()

    eigenvalues = post.sigma_eigenvalues()
    report = InspectReport(
        mode=post.mode,
        kernel=bank.kernel.model_dump(),
        neighbor_ids=post.neighbor_ids,
        scores=[float(s) for s in post.scores],
        sigma_eig_min=float(eigenvalues.min()),
        sigma_eig_max=float(eigenvalues.max()),
        unsup_loss=float(loss),
        noise=post.noise,
    )
    if post.mode == "whole-latent":
        weights = post.alpha[0]
        flat = bank.latents[post.neighbor_indices].reshape(len(weights), -1)
        report.alpha = [float(a) for a in weights]
        report.mu_reconstruction_error = float(np.max(np.abs(weights @ flat - post.mu[0])))
    return report


def write_initial_checkpoint(
    model: ModelConfig, path: str, seed: int = 0, identity: bool = False
) -> DerainNet:
    """Write a seeded initial checkpoint, or the zero-residue identity when `identity`."""
    net = init_params(model, seed)
    if identity:
        net.zero_residue()
    save_checkpoint(path, net, extra={"identity": identity, "seed": seed})
    return net
