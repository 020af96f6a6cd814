"""CSV and JSON artifacts.

Every float is written with 17 significant digits, enough for any binary64
value to read back bitwise.  Files are written to a temporary sibling and
renamed into place, so readers never see a half-written artifact.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .solution import PiecewiseSolution

CSV_HEADER = "r,phi,phi_prime,phi_second"


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def solution_csv_text(sol: PiecewiseSolution) -> str:
    cols = (sol.knots, sol.phi, sol.phi_prime, sol.phi_second)
    lines = [CSV_HEADER]
    lines.extend(",".join(format_float(v) for v in row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


def write_solution_csv(sol: PiecewiseSolution, path) -> Path:
    return atomic_write_text(path, solution_csv_text(sol))


def read_solution_csv(path, n: int, method_tag: str = "reference") -> PiecewiseSolution:
    """Load a dump written by :func:`write_solution_csv`."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, 4)
    return PiecewiseSolution(
        knots=data[:, 0], phi=data[:, 1], phi_prime=data[:, 2], phi_second=data[:, 3],
        n=n, method_tag=method_tag,
    )


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Path):
        return json.dumps(str(obj), ensure_ascii=False)
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items())
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if len(seq) == 0:
            return "[]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in seq) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats; non-finite floats become null."""
    return _encode(obj, indent, 0) + "\n"


def report_document(report: dict, command: list[str] | None = None) -> dict:
    """Wrap a report with a metadata block; only the metadata carries a timestamp."""
    return {
        "report": report,
        "metadata": {
            "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "command": list(command) if command is not None else None,
        },
    }


def write_report_json(report: dict, path, command: list[str] | None = None) -> Path:
    return atomic_write_text(path, dumps(report_document(report, command)))


def read_report_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
