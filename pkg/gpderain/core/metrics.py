"""Run log collection for training runs."""

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from gpderain.core import storage


@dataclass
class EpochRecord:
    """Everything recorded about one training epoch."""

    epoch: int
    lr: float
    sup_losses: list[float] = field(default_factory=list)
    unsup_losses: list[float] = field(default_factory=list)
    eval: dict[str, dict[str, float]] = field(default_factory=dict)
    length_scale: Optional[float] = None
    bank_size: int = 0
    wall_time: float = 0.0

    @property
    def sup_loss(self) -> float:
        return sum(self.sup_losses) / len(self.sup_losses) if self.sup_losses else 0.0

    @property
    def unsup_loss(self) -> float:
        if not self.unsup_losses:
            return 0.0
        return sum(self.unsup_losses) / len(self.unsup_losses)

    def to_dict(self) -> dict[str, Any]:
        """Export the record with its epoch means."""
        data = asdict(self)
        data["sup_loss"] = self.sup_loss
        data["unsup_loss"] = self.unsup_loss
        return data


@dataclass
class RunLog:
    """Append-only log of epoch records for one training run.

    When `path` is set, each finished epoch is appended to it as one JSON line.
    """

    run_name: str
    path: Optional[str] = None
    start_time: float = field(default_factory=time.time)
    records: list[EpochRecord] = field(default_factory=list)
    error_details: list[dict[str, Any]] = field(default_factory=list)

    def start_epoch(self, epoch: int, lr: float) -> EpochRecord:
        """Open a new epoch record.

        Args:
            epoch: Zero-based epoch index
            lr: Learning rate in effect for this epoch

        Returns:
            The record to fill during the epoch
        """
        record = EpochRecord(epoch=epoch, lr=lr)
        record.wall_time = time.time()
        self.records.append(record)
        return record

    def truncate(self) -> None:
        """Start the JSON-lines file over, dropping rows of an earlier run."""
        if self.path is not None:
            storage.atomic_write_bytes(self.path, b"")

    def finish_epoch(self, record: EpochRecord) -> None:
        """Close an epoch record and serialize it."""
        record.wall_time = time.time() - record.wall_time
        if self.path is not None:
            storage.append_jsonl(self.path, record.to_dict())

    def record_error(self, error: Exception, context: dict[str, Any] | None = None) -> None:
        """Record an error that aborted the run.

        Args:
            error: The exception that occurred
            context: Additional context about the error
        """
        detail = {"error_type": type(error).__name__, "error_message": str(error)}
        if context:
            detail["context"] = context
        self.error_details.append(detail)

    def loss_sequence(self) -> list[tuple[list[float], list[float]]]:
        """Return the per-epoch (sup, unsup) step-loss sequences."""
        return [(r.sup_losses, r.unsup_losses) for r in self.records]

    def to_dict(self) -> dict[str, Any]:
        """Export the whole run log."""
        return {
            "run_name": self.run_name,
            "epochs": [r.to_dict() for r in self.records],
            "errors": self.error_details,
        }

    def get_summary(self) -> str:
        """Get a one-line summary of the latest epoch."""
        if not self.records:
            return f"Run: {self.run_name} | no epochs"
        last = self.records[-1]
        parts = [
            f"Run: {self.run_name}",
            f"Epoch: {last.epoch}",
            f"Sup: {last.sup_loss:.4f}",
            f"Unsup: {last.unsup_loss:.4f}",
        ]
        for domain, scores in sorted(last.eval.items()):
            parts.append(f"{domain}: {scores['psnr']:.2f}dB/{scores['ssim']:.4f}")
        parts.append(f"Time: {last.wall_time:.1f}s")
        return " | ".join(parts)


def read_runlog(path: str) -> list[dict[str, Any]]:
    """Read a JSON-lines run log back into epoch dicts."""
    text = storage.read_bytes(path).decode("utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]
