"""CSV and JSON input/output."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import RunConfig, ValidationError, config_from_dict
from .diagnostics import FIELDS, DiagnosticsRecord


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_records_csv(records: Sequence[DiagnosticsRecord], path: str | Path | None = None, stream=None) -> None:
    """One row per record, 17 significant digits, LF line endings."""
    lines = [",".join(FIELDS)]
    lines.extend(",".join(_fmt(v) for v in r.as_row()) for r in records)
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def write_ode_csv(traj, path: str | Path | None, tau_inf: float, f_inf: float, stream=None) -> None:
    lines = ["t,tau,f,perturbation"]
    pert = traj.perturbation(tau_inf, f_inf)
    lines.extend(
        f"{_fmt(t)},{_fmt(a)},{_fmt(b)},{_fmt(c)}" for t, a, b, c in zip(traj.t, traj.tau, traj.f, pert)
    )
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def read_csv_columns(path: str | Path) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(x) for x in row] for row in reader if row]
        data = np.array(rows, dtype=float).reshape(-1, len(header))
    except (OSError, StopIteration, ValueError) as exc:
        raise ValidationError(f"cannot read CSV {path}: {exc!r}") from exc
    return {name: data[:, k] for k, name in enumerate(header)}


def select_column(columns: dict[str, np.ndarray], name: str) -> np.ndarray:
    """Column lookup; ``a+b`` sums columns."""
    parts = name.split("+")
    missing = [p for p in parts if p not in columns]
    if missing:
        raise KeyError(f"unknown column(s) {missing}; available: {sorted(columns)}")
    return np.sum([columns[p] for p in parts], axis=0)


def load_config(path: str | Path, scale: str = "desk") -> RunConfig:
    """Read and validate a JSON run configuration."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from exc
    return config_from_dict(data, scale=scale)
