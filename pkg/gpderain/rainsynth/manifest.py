"""Dataset manifests: JSON lists of rendered records."""

from __future__ import annotations

import posixpath
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from gpderain.core import storage
from gpderain.core.exceptions import CheckpointError, DataError
from gpderain.models.rain_config import RainParams

MANIFEST_VERSION = 1


class ManifestRecord(BaseModel):
    """One image pair. Paths are relative to the manifest's directory."""

    model_config = ConfigDict(extra="forbid")

    id: str
    rainy: str
    clean: Optional[str] = None
    seed: int


class DatasetManifest(BaseModel):
    """Records of one domain split, plus the rain parameters that made them."""

    model_config = ConfigDict(extra="forbid")

    version: int = MANIFEST_VERSION
    domain: str
    split: Literal["train", "test"] = "train"
    labeled: bool = True
    params: RainParams
    records: list[ManifestRecord] = Field(default_factory=list)
    root: str = Field(default="", exclude=True, description="Directory of the manifest file")

    @model_validator(mode="after")
    def validate_records(self) -> "DatasetManifest":
        for record in self.records:
            if self.labeled and record.clean is None:
                raise ValueError(f"labeled record {record.id} has no clean path")
            if not self.labeled and record.clean is not None:
                raise ValueError(f"unlabeled record {record.id} carries a clean path")
        return self

    def __len__(self) -> int:
        return len(self.records)

    def resolve(self, relative: str) -> str:
        """Absolute path (or URL) of a record path."""
        if "://" in relative or relative.startswith("/") or not self.root:
            return relative
        return posixpath.join(self.root, relative)

    def missing_files(self) -> list[str]:
        """Record paths that do not exist."""
        missing = []
        for record in self.records:
            for rel in (record.rainy, record.clean):
                if rel is not None and not storage.exists(self.resolve(rel)):
                    missing.append(rel)
        return missing

    def save(self, path: str) -> None:
        storage.write_json(path, self.model_dump(mode="json", exclude_none=True))

    @classmethod
    def load(cls, path: str, check_files: bool = False) -> "DatasetManifest":
        """Read a manifest.

        Args:
            path: Manifest JSON file
            check_files: Fail if any referenced image is missing

        Raises:
            DataError: If the manifest is missing, invalid, of another
                version, or (with check_files) references missing files
        """
        try:
            data = storage.read_json(path)
        except CheckpointError as e:
            raise DataError(f"Cannot read manifest {path}", context={"path": str(path)}) from e
        if not isinstance(data, dict) or data.get("version") != MANIFEST_VERSION:
            raise DataError(
                f"Unsupported manifest version in {path}",
                context={"path": str(path), "expected": MANIFEST_VERSION},
            )
        try:
            manifest = cls(**data)
        except ValidationError as e:
            raise DataError(f"Invalid manifest {path}: {e}", context={"path": str(path)}) from e
        manifest.root = posixpath.dirname(str(path))
        if check_files:
            missing = manifest.missing_files()
            if missing:
                raise DataError(
                    f"Manifest {path} references {len(missing)} missing files",
                    context={"path": str(path), "first_missing": missing[0]},
                )
        return manifest
