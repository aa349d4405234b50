"""Deterministic text and image writers."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

CSV_FMT = "%.17g"


def write_csv(path, header: list[str], columns) -> Path:
    """Write equal-length columns as comma-separated text, 17 significant digits."""
    path = Path(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt=CSV_FMT, delimiter=",", header=",".join(header),
               comments="")
    return path


def write_matrix_csv(path, matrix, header: list[str] | None = None) -> Path:
    path = Path(path)
    np.savetxt(path, np.atleast_2d(np.asarray(matrix, dtype=float)), fmt=CSV_FMT,
               delimiter=",", header=",".join(header) if header else "", comments="")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def write_pgm(path, values, comment: str = "") -> Path:
    """Binary 8-bit graymap; values in [0, 1] map to 0..255, row 0 on top."""
    path = Path(path)
    arr = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    pix = np.rint(arr * 255.0).astype(np.uint8)
    rows, cols = pix.shape
    head = b"P5\n"
    if comment:
        head += b"# " + comment.encode("ascii") + b"\n"
    head += f"{cols} {rows}\n255\n".encode("ascii")
    path.write_bytes(head + pix.tobytes())
    return path


def read_pgm(path) -> tuple[np.ndarray, str]:
    raw = Path(path).read_bytes()
    lines = []
    pos = 0
    comment = ""
    while len(lines) < 3:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            comment = line[1:].strip()
            continue
        lines.append(line)
    if lines[0] != "P5":
        raise ValueError("not a binary graymap")
    cols, rows = map(int, lines[1].split())
    pix = np.frombuffer(raw[pos:pos + rows * cols], dtype=np.uint8).reshape(rows, cols)
    return pix, comment


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()
