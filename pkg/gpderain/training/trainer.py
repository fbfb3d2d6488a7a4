"""Alternating labeled / unlabeled training loop."""

from __future__ import annotations

import logging
import math
import posixpath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gpderain.core import storage
from gpderain.core.exceptions import GPDerainError, TrainingError
from gpderain.core.metrics import RunLog
from gpderain.gp.bank import FeatureBank, bank_mode_for, rebuild_bank
from gpderain.gp.kernels import KernelSpec, get_kernel
from gpderain.gp.posterior import pseudo_label
from gpderain.model.checkpoint import save_checkpoint
from gpderain.model.network import DerainNet, init_params
from gpderain.models.model_config import ModelConfig
from gpderain.models.train_config import TrainConfig
from gpderain.objective.losses import sup_loss, unsup_loss
from gpderain.rainsynth.manifest import DatasetManifest
from gpderain.tensor import backward, new_tape, ops
from gpderain.training.data import CenterCropped, ManifestDataset
from gpderain.training.evaluate import evaluate
from gpderain.training.optim import Adam

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.arrow"
BANK_NAME = "bank.arrow"
RUNLOG_NAME = "runlog.jsonl"


@dataclass(frozen=True)
class _Seeds:
    """Independent streams derived from the run seed."""

    init: int
    labeled: np.random.Generator
    unlabeled: np.random.Generator
    bank: int

    @classmethod
    def from_seed(cls, seed: int) -> "_Seeds":
        children = np.random.SeedSequence(seed).spawn(4)
        return cls(
            init=int(children[0].generate_state(1, dtype=np.uint64)[0]),
            labeled=np.random.default_rng(children[1]),
            unlabeled=np.random.default_rng(children[2]),
            bank=int(children[3].generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)),
        )


def labeled_step(
    net: DerainNet,
    optimizer: Adam,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    lr: float,
    batch_ids: Optional[list[str]] = None,
) -> float:
    """One supervised step: derain, sup_loss, backward, Adam update of all parameters.

    Raises:
        TrainingError: If the loss is not finite; the batch ids are in the context
    """
    new_tape()
    net.zero_grad()
    loss = sup_loss(net.derain(x), y, config.loss_weights(), extractor_seed=config.seed)
    value = loss.item()
    if not math.isfinite(value):
        new_tape()
        raise TrainingError(
            "non-finite supervised loss", context={"loss": value, "batch_ids": batch_ids or []}
        )
    backward(loss)
    optimizer.step(net.parameters(), lr)
    return value


def unlabeled_step(
    net: DerainNet,
    optimizer: Adam,
    x_u: np.ndarray,
    bank: Optional[FeatureBank],
    config: TrainConfig,
    lr: float,
    batch_ids: Optional[list[str]] = None,
) -> float:
    """One GP-supervised encoder step on unlabeled images.

    Each image is encoded, given a pseudo label from its nearest bank
    entries, and scored by `unsup_loss`. The gradient of lambda_unsup times
    the batch mean reaches encoder parameters only; the decoder is never
    touched.

    Returns:
        Batch mean of the unscaled unsup losses (0.0 when gp_mode is "off")

    Raises:
        GPError: If the bank is missing or smaller than n_neighbors
        TrainingError: If the loss is not finite
    """
    if config.gp_mode == "off":
        return 0.0
    if bank is None:
        raise TrainingError("unlabeled step needs a feature bank built this epoch")

    new_tape()
    net.zero_grad()
    latents = net.latent(x_u)
    losses = []
    for i in range(latents.shape[0]):
        z_i = latents[i]
        post = pseudo_label(z_i, bank, config.n_neighbors, sigma_eps2=config.sigma_eps2)
        losses.append(unsup_loss(z_i, post))

    mean = losses[0]
    for term in losses[1:]:
        mean = mean + term
    mean = ops.scale(mean, 1.0 / len(losses))
    value = mean.item()
    if not math.isfinite(value):
        new_tape()
        raise TrainingError(
            "non-finite unsupervised loss", context={"loss": value, "batch_ids": batch_ids or []}
        )
    if config.lambda_unsup > 0:
        backward(ops.scale(mean, config.lambda_unsup))
        optimizer.step(net.encoder_parameters(), lr)
    else:
        new_tape()
    return value


class Trainer:
    """Owns the network, optimizer and run log of one training run.

    Args:
        model_config: Network shape
        train_config: Optimizer, schedule and GP settings
        out_dir: Directory for checkpoint, bank dump, run log and samples
        run_name: Name stamped on logs and the run log
        net: Start from this network instead of a seeded init
    """

    def __init__(
        self,
        model_config: ModelConfig,
        train_config: TrainConfig,
        out_dir: str,
        run_name: str = "gpderain",
        net: Optional[DerainNet] = None,
    ):
        self.model_config = model_config
        self.config = train_config
        self.out_dir = str(out_dir)
        self.seeds = _Seeds.from_seed(train_config.seed)
        self.net = net if net is not None else init_params(model_config, self.seeds.init)
        self.optimizer = Adam(train_config.beta1, train_config.beta2, train_config.eps)
        self.runlog = RunLog(run_name, path=self._path(RUNLOG_NAME))
        self.bank: Optional[FeatureBank] = None
        if train_config.gp_mode != "off":
            get_kernel(KernelSpec(kind=train_config.kernel))

    def _path(self, name: str) -> str:
        return posixpath.join(self.out_dir, name)

    def train(
        self,
        labeled: DatasetManifest,
        unlabeled: Optional[DatasetManifest] = None,
        eval_sets: Optional[dict[str, DatasetManifest]] = None,
    ) -> tuple[DerainNet, RunLog]:
        """Run all epochs.

        Per epoch: interleave labeled and unlabeled steps, evaluate, write the
        checkpoint, then rebuild the bank with the saved encoder and write it
        next to the checkpoint. That bank serves the following epoch. A failure
        aborts the run; the checkpoint and bank of the last finished epoch stay
        in place and match each other.
        """
        storage.makedirs(self.out_dir)
        self.runlog.truncate()
        self.bank = None
        labeled_ds = ManifestDataset(labeled, require_clean=True)
        unlabeled_ds = None
        if self.config.gp_mode != "off" and unlabeled is not None:
            unlabeled_ds = ManifestDataset(unlabeled)
        eval_sets = eval_sets or {}

        logger.info(
            "Starting training",
            extra={
                "run_name": self.runlog.run_name,
                "epochs": self.config.epochs,
                "gp_mode": self.config.gp_mode,
                "labeled": len(labeled_ds),
                "unlabeled": len(unlabeled_ds) if unlabeled_ds else 0,
            },
        )
        unlabeled_batches = (
            unlabeled_ds.endless_batches(
                self.seeds.unlabeled, self.config.batch, self.model_config.crop
            )
            if unlabeled_ds is not None
            else None
        )

        for epoch in range(self.config.epochs):
            try:
                self._run_epoch(epoch, labeled_ds, unlabeled_batches, eval_sets)
            except GPDerainError as e:
                self.runlog.record_error(e, context={"epoch": epoch})
                logger.error(
                    f"Training aborted: {e}", extra={"epoch": epoch, "run_name": self.runlog.run_name}
                )
                raise
        return self.net, self.runlog

    def _run_epoch(self, epoch, labeled_ds, unlabeled_batches, eval_sets) -> None:
        lr = self.config.lr_at(epoch)
        record = self.runlog.start_epoch(epoch, lr)

        if unlabeled_batches is not None:
            if self.bank is None or self.bank.built_at_epoch != epoch:
                self.bank = self._rebuild_bank(labeled_ds, epoch)
            record.bank_size = len(self.bank)
            if self.bank.kernel.kind != "lin":
                record.length_scale = self.bank.kernel.length_scale

        crop = self.model_config.crop
        for step, (ids, x, y) in enumerate(
            labeled_ds.batches(self.seeds.labeled, self.config.batch, crop)
        ):
            record.sup_losses.append(
                labeled_step(self.net, self.optimizer, x, y, self.config, lr, batch_ids=ids)
            )
            if unlabeled_batches is None:
                continue
            for _ in range(self.config.unlabeled_ratio):
                u_ids, x_u, _ = next(unlabeled_batches)
                record.unsup_losses.append(
                    unlabeled_step(
                        self.net, self.optimizer, x_u, self.bank, self.config, lr, batch_ids=u_ids
                    )
                )
            logger.debug(
                "Step finished",
                extra={"epoch": epoch, "step": step, "sup_loss": record.sup_losses[-1]},
            )

        sample_root = posixpath.join(self.out_dir, "samples", f"epoch{epoch:03d}")
        for domain, manifest in sorted(eval_sets.items()):
            report = evaluate(
                self.net,
                manifest,
                workers=self.config.workers,
                sample_dir=sample_root if self.config.sample_images else None,
                samples=self.config.sample_images,
            )
            record.eval[domain] = {"psnr": report.psnr, "ssim": report.ssim}

        save_checkpoint(
            self._path(CHECKPOINT_NAME),
            self.net,
            extra={"epoch": epoch, "run_name": self.runlog.run_name},
        )
        if unlabeled_batches is not None:
            self.bank = self._rebuild_bank(labeled_ds, epoch + 1)
            self.bank.export(self._path(BANK_NAME))
        self.runlog.finish_epoch(record)
        logger.info(self.runlog.get_summary(), extra={"epoch": epoch})

    def _rebuild_bank(self, labeled_ds: ManifestDataset, epoch: int) -> FeatureBank:
        """Encode the bank subset for `epoch` with the current encoder."""
        return rebuild_bank(
            CenterCropped(labeled_ds, self.model_config.crop),
            self.net,
            max_entries=self.config.bank_max_entries,
            seed=self.seeds.bank + epoch,
            mode=bank_mode_for(self.config.gp_mode),
            kernel=self.config.kernel,
            rq_alpha=self.config.rq_alpha,
            epoch=epoch,
        )


def train(
    model_config: ModelConfig,
    train_config: TrainConfig,
    labeled: DatasetManifest,
    unlabeled: Optional[DatasetManifest],
    eval_sets: Optional[dict[str, DatasetManifest]],
    out_dir: str,
    run_name: str = "gpderain",
    net: Optional[DerainNet] = None,
) -> tuple[DerainNet, RunLog]:
    """Train a network and return it with its run log."""
    trainer = Trainer(model_config, train_config, out_dir, run_name=run_name, net=net)
    return trainer.train(labeled, unlabeled, eval_sets)
