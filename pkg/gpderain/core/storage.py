"""Artifact storage: atomic JSON / Arrow IPC writes through fsspec.

Checkpoints, bank dumps, manifests, run logs and config snapshots all go
through this module so they share one write discipline: write to a temporary
sibling, then move it over the target.
"""

import json
from typing import Any

import fsspec
import numpy as np
import pyarrow as pa

from gpderain.core.exceptions import CheckpointError

CONTAINER_FORMAT = "gpderain"
CONTAINER_VERSION = 1

_TENSOR_SCHEMA = pa.schema(
    [
        pa.field("name", pa.string()),
        pa.field("shape", pa.list_(pa.int64())),
        pa.field("values", pa.list_(pa.float64())),
    ]
)


def _fs_and_path(path: str) -> tuple[fsspec.AbstractFileSystem, str]:
    fs, _, paths = fsspec.get_fs_token_paths(str(path))
    return fs, paths[0]


def exists(path: str) -> bool:
    """Return True if the path exists on its filesystem."""
    fs, resolved = _fs_and_path(path)
    return fs.exists(resolved)


def makedirs(path: str) -> None:
    """Create a directory (and parents) if it does not exist."""
    fs, resolved = _fs_and_path(path)
    fs.makedirs(resolved, exist_ok=True)


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Write bytes to path using a temporary file and a move.

    Args:
        path: Target path (local path or fsspec URL)
        payload: Bytes to write

    Raises:
        CheckpointError: If writing fails
    """
    fs, resolved = _fs_and_path(path)
    temp = f"{resolved}.tmp"
    try:
        parent = resolved.rsplit("/", 1)[0] if "/" in resolved else ""
        if parent:
            fs.makedirs(parent, exist_ok=True)
        with fs.open(temp, "wb") as f:
            f.write(payload)
        fs.mv(temp, resolved)
    except OSError as e:
        if fs.exists(temp):
            fs.rm(temp)
        raise CheckpointError(
            f"Failed to write {path}: {e}", context={"path": str(path)}
        ) from e


def read_bytes(path: str) -> bytes:
    """Read a whole file.

    Raises:
        CheckpointError: If the file is missing or unreadable
    """
    fs, resolved = _fs_and_path(path)
    try:
        with fs.open(resolved, "rb") as f:
            return f.read()
    except (FileNotFoundError, OSError) as e:
        raise CheckpointError(
            f"Failed to read {path}: {e}", context={"path": str(path)}
        ) from e


def write_json(path: str, data: Any) -> None:
    """Atomically write a JSON document (sorted keys, stable output)."""
    try:
        text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
    except (TypeError, ValueError) as e:
        raise CheckpointError(
            f"Failed to serialize {path}: {e}", context={"path": str(path)}
        ) from e
    atomic_write_bytes(path, (text + "\n").encode("utf-8"))


def read_json(path: str) -> Any:
    """Read a JSON document.

    Raises:
        CheckpointError: If the file is missing or not valid JSON
    """
    raw = read_bytes(path)
    try:
        return json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CheckpointError(
            f"Failed to parse {path}: {e}", context={"path": str(path)}
        ) from e


def append_jsonl(path: str, row: dict[str, Any]) -> None:
    """Append one JSON row to a JSON-lines file."""
    fs, resolved = _fs_and_path(path)
    line = json.dumps(row, sort_keys=True) + "\n"
    try:
        with fs.open(resolved, "ab") as f:
            f.write(line.encode("utf-8"))
    except OSError as e:
        raise CheckpointError(
            f"Failed to append to {path}: {e}", context={"path": str(path)}
        ) from e


def write_tensors(
    path: str,
    tensors: dict[str, np.ndarray],
    kind: str,
    metadata: dict[str, Any] | None = None,
) -> None:
    """Write named float64 arrays to an Arrow IPC container.

    Args:
        path: Target path
        tensors: Mapping of name -> array, written in insertion order
        kind: Container kind ("checkpoint", "bank", ...) checked on read
        metadata: JSON-serializable metadata stored in the schema
    """
    names = list(tensors)
    arrays = [np.ascontiguousarray(tensors[n], dtype=np.float64) for n in names]
    table = pa.Table.from_pydict(
        {
            "name": names,
            "shape": [list(a.shape) for a in arrays],
            "values": [a.ravel().tolist() for a in arrays],
        },
        schema=_TENSOR_SCHEMA,
    )
    header = {
        "format": CONTAINER_FORMAT,
        "format_version": CONTAINER_VERSION,
        "kind": kind,
        "metadata": metadata or {},
    }
    table = table.replace_schema_metadata({"gpderain": json.dumps(header, sort_keys=True)})

    sink = pa.BufferOutputStream()
    with pa.ipc.new_file(sink, table.schema) as writer:
        writer.write_table(table)
    atomic_write_bytes(path, sink.getvalue().to_pybytes())


def read_tensors(path: str, kind: str) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    """Read a container written by `write_tensors`.

    Args:
        path: Container path
        kind: Expected container kind

    Returns:
        (tensors, metadata)

    Raises:
        CheckpointError: If the file is not a gpderain container of that kind/version
    """
    raw = read_bytes(path)
    try:
        table = pa.ipc.open_file(pa.py_buffer(raw)).read_all()
    except pa.ArrowInvalid as e:
        raise CheckpointError(
            f"Not an Arrow container: {path}", context={"path": str(path)}
        ) from e

    schema_meta = table.schema.metadata or {}
    header_raw = schema_meta.get(b"gpderain")
    if header_raw is None:
        raise CheckpointError(
            f"Missing gpderain header in {path}", context={"path": str(path)}
        )
    header = json.loads(header_raw.decode("utf-8"))
    if header.get("format_version") != CONTAINER_VERSION:
        raise CheckpointError(
            f"Unsupported container version {header.get('format_version')}",
            context={"path": str(path), "expected": CONTAINER_VERSION},
        )
    if header.get("kind") != kind:
        raise CheckpointError(
            f"Expected a {kind} container, found {header.get('kind')}",
            context={"path": str(path)},
        )

    columns = table.to_pydict()
    tensors = {
        name: np.asarray(values, dtype=np.float64).reshape(shape)
        for name, shape, values in zip(
            columns["name"], columns["shape"], columns["values"]
        )
    }
    return tensors, header.get("metadata", {})


def list_files(directory: str, suffix: str) -> list[str]:
    """Sorted paths of files in a directory with the given suffix (non-recursive)."""
    fs, resolved = _fs_and_path(directory)
    if not fs.isdir(resolved):
        return []
    protocol = fs.protocol if isinstance(fs.protocol, str) else fs.protocol[0]
    found = [
        p for p in fs.ls(resolved, detail=False) if p.lower().endswith(suffix.lower())
    ]
    if protocol in ("file", "local"):
        return sorted(found)
    return sorted(f"{protocol}://{p}" for p in found)
