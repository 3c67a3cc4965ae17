from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from constants import BASIS_ORDERING, CSV_FLOAT_FORMAT
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="IO")

PathLike = Union[str, Path]


def _to_jsonable(value: Any) -> Any:
    """Recursively converts numpy and complex values into JSON-native types."""
    if isinstance(value, Mapping):
        return {str(key): _to_jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return _to_jsonable(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(item) for item in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return _to_jsonable(value.model_dump(mode="json"))
    return value


def write_csv(path: PathLike, columns: Mapping[str, ArrayLike]) -> Path:
    """Writes equally long columns as a CSV table.

    Floats are written with 17 significant digits so every double survives a
    text round-trip; complex columns must be split into real parts by the caller.

    Args:
        path (PathLike): Destination file.
        columns (Mapping[str, ArrayLike]): Header name to 1-D column values, in order.

    Returns:
        Path: The written file path.

    Raises:
        ValueError: If the columns differ in length or a column is complex.
    """
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    lengths = {array.shape[0] for array in arrays}
    if len(lengths) > 1:
        raise ValueError(f"CSV columns differ in length: {dict(zip(names, [a.shape[0] for a in arrays]))}")
    if any(np.iscomplexobj(array) for array in arrays):
        raise ValueError("complex columns must be split into real and imaginary parts")

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(names) + "\n")
        for row in zip(*arrays):
            handle.write(",".join(_format_cell(cell) for cell in row) + "\n")
    logger.debug(f"Wrote {path}")
    return path


def _format_cell(cell: Any) -> str:
    if isinstance(cell, (float, np.floating)):
        return CSV_FLOAT_FORMAT % float(cell)
    if isinstance(cell, (bool, np.bool_)):
        return "true" if cell else "false"
    return str(cell)


def read_csv(path: PathLike) -> Dict[str, NDArray]:
    """Reads a numeric CSV written by ``write_csv`` back into float columns."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, index] for index, name in enumerate(header)}


def write_json(path: PathLike, payload: Any) -> Path:
    """Writes a JSON document with sorted keys; complex numbers become ``[re, im]``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_to_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def save_matrix(
    path: PathLike,
    data: ArrayLike,
    S: float,
    ordering: str = BASIS_ORDERING,
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Persists an operator, state or stack of density matrices.

    The ``.npz`` archive carries the array together with its spin magnitude and
    basis-ordering convention; a JSON sidecar repeats the metadata so the
    container can be inspected without numpy.

    Args:
        path (PathLike): Destination, ``.npz`` is appended when missing.
        data (ArrayLike): The complex or real array.
        S (float): Spin magnitude per species.
        ordering (str): Basis-ordering convention label.
        extra (Optional[Mapping[str, Any]]): Additional metadata for the sidecar, e.g. times.

    Returns:
        Path: Path of the written archive.
    """
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(".npz")
    path.parent.mkdir(parents=True, exist_ok=True)
    array = np.asarray(data)
    np.savez(path, data=array, S=np.float64(S), ordering=np.str_(ordering), shape=np.asarray(array.shape))

    metadata: Dict[str, Any] = {
        "S": float(S),
        "ordering": ordering,
        "shape": list(array.shape),
        "dtype": str(array.dtype),
    }
    if extra:
        metadata.update(extra)
    write_json(path.with_suffix(".json"), metadata)
    return path


def load_matrix(path: PathLike) -> Dict[str, Any]:
    """Loads a container written by ``save_matrix``.

    Returns:
        Dict[str, Any]: ``data`` array plus ``S``, ``ordering`` and ``shape``.
    """
    with np.load(Path(path), allow_pickle=False) as archive:
        return {
            "data": archive["data"],
            "S": float(archive["S"]),
            "ordering": str(archive["ordering"]),
            "shape": tuple(int(n) for n in archive["shape"]),
        }


def sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def list_files(directory: PathLike, exclude: Iterable[str] = ()) -> List[Path]:
    """Sorted regular files below ``directory``, excluding the given names."""
    directory = Path(directory)
    excluded = set(exclude)
    return sorted(p for p in directory.rglob("*") if p.is_file() and p.name not in excluded)


def split_complex(name: str, values: Sequence[complex]) -> Dict[str, NDArray]:
    array = np.asarray(values)
    return {f"{name}_re": array.real, f"{name}_im": array.imag}
