"""File formats: kernel JSON, signal CSV, results CSV, experiment config JSON."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .kernel import RecoveryKernel
from .recovery import RecoveryResult, SignalWindow
from .signal_lab import GeneratorConfig

__all__ = [
    "read_kernel",
    "write_kernel",
    "read_signal_csv",
    "write_signal_csv",
    "write_results_csv",
    "read_config",
]


def write_kernel(kernel: RecoveryKernel, path, include_taps: bool = True) -> None:
    Path(path).write_text(json.dumps(kernel.to_dict(include_taps), indent=1))


def read_kernel(path) -> RecoveryKernel:
    return RecoveryKernel.from_dict(json.loads(Path(path).read_text()))


def read_signal_csv(path) -> tuple[SignalWindow, dict[int, float]]:
    """Read ``t,value,observed`` rows into a window plus any values given at missing rows.

    Times must be consecutive integers.  Values at rows with ``observed=0``
    are never used for recovery; they are returned separately as ground
    truth for reporting.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing_cols = {"t", "value", "observed"} - set(reader.fieldnames or ())
        if missing_cols:
            raise ValueError(f"signal CSV lacks columns {sorted(missing_cols)}")
        for row in reader:
            value = row["value"].strip()
            rows.append((int(row["t"]), float(value) if value else math.nan,
                         int(row["observed"]) == 1))
    if not rows:
        raise ValueError("signal CSV is empty")
    rows.sort()
    times = [r[0] for r in rows]
    if times != list(range(times[0], times[0] + len(times))):
        raise ValueError("signal CSV times must be consecutive integers")
    values = np.array([r[1] for r in rows])
    missing = np.array([not r[2] for r in rows])
    truth = {t: v for t, v, obs in rows if not obs and not math.isnan(v)}
    window = SignalWindow(times[0], np.where(missing, np.nan, values), missing)
    return window, truth


def write_signal_csv(window: SignalWindow, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value", "observed"])
        for t, v, m in zip(window.times, window.samples, window.missing):
            writer.writerow([int(t), "" if math.isnan(v) else repr(float(v)), 0 if m else 1])


def write_results_csv(result: RecoveryResult, path, truth: dict[int, float] | None = None) -> None:
    truth = truth or {}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "estimate", "truth", "abs_error"])
        for t, est in zip(result.times, result.estimates):
            if t in truth:
                writer.writerow([t, repr(float(est)), repr(truth[t]), repr(abs(float(est) - truth[t]))])
            else:
                writer.writerow([t, repr(float(est)), "", ""])


def read_config(path) -> dict:
    """Experiment config JSON: ``missing``, ``n`` and any :class:`GeneratorConfig` field, plus ``sigma``."""
    data = json.loads(Path(path).read_text())
    allowed = set(GeneratorConfig.__dataclass_fields__) | {"missing", "n", "sigma"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data
