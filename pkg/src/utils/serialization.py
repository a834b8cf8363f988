#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
File formats of the toy-waves harness.

Fields are stored as CSV (k, re, im) or as little-endian complex128 binary,
both preceded by a `spectral-field v1 K=<K>` header. Trajectories are CSV
with a JSON sidecar. Floats are written with 17 significant digits so that
equal runs give byte-identical files.
"""

import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np

from ..core.commutator_lab import CommutatorReport
from ..core.errors import InvalidFieldError
from ..core.integrator import TrajectoryRecord
from ..core.model import CutoffChi
from ..core.spectral_field import SpectralField

logger = logging.getLogger(__name__)

FIELD_HEADER = "spectral-field v1 K="
FLOAT_FORMAT = "%.17g"


def _parse_header(line: str) -> int:
    line = line.strip().lstrip("#").strip()
    if not line.startswith(FIELD_HEADER):
        raise InvalidFieldError(f"missing '{FIELD_HEADER}<K>' header, got {line!r}")
    try:
        return int(line[len(FIELD_HEADER):])
    except ValueError:
        raise InvalidFieldError(f"malformed header {line!r}") from None


def write_field_csv(path: str, field: SpectralField):
    """Write a field as `k,re,im` rows under a header line."""
    k = field.wavenumbers
    table = np.column_stack([k, field.coefficients.real, field.coefficients.imag])
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {FIELD_HEADER}{field.max_wavenumber}\n")
        f.write("k,re,im\n")
        np.savetxt(f, table, fmt=("%d", FLOAT_FORMAT, FLOAT_FORMAT), delimiter=",")


def read_field_csv(path: str) -> SpectralField:
    with open(path, "r", encoding="utf-8") as f:
        K = _parse_header(f.readline())
        table = np.loadtxt(f, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[0] != 2 * K + 1:
        raise InvalidFieldError(f"expected {2 * K + 1} rows for K={K}, found {table.shape[0]}")
    return SpectralField(table[:, 1] + 1j * table[:, 2]).check_finite()


def write_field_binary(path: str, field: SpectralField):
    """Header line followed by 2K+1 little-endian complex128 values."""
    with open(path, "wb") as f:
        f.write(f"{FIELD_HEADER}{field.max_wavenumber}\n".encode("ascii"))
        f.write(field.coefficients.astype("<c16").tobytes())


def read_field_binary(path: str) -> SpectralField:
    with open(path, "rb") as f:
        K = _parse_header(f.readline().decode("ascii"))
        payload = f.read()
    coeffs = np.frombuffer(payload, dtype="<c16")
    if coeffs.size != 2 * K + 1:
        raise InvalidFieldError(f"expected {2 * K + 1} coefficients for K={K}, found {coeffs.size}")
    return SpectralField(coeffs).check_finite()


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset, tuple)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json(path: str, payload: Dict):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_jsonable)
        f.write("\n")


def read_json(path: str) -> Dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_table_csv(path: str, header, rows: np.ndarray, formats=FLOAT_FORMAT):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        if len(rows):
            np.savetxt(f, np.asarray(rows), fmt=formats, delimiter=",")


def write_trajectory(directory: str, name: str, record: TrajectoryRecord,
                     sidecar: Optional[Dict] = None) -> str:
    """
    Write `<name>.csv` and its `<name>.json` sidecar.

    Args:
        directory: Output directory.
        name: Base file name.
        record: The trajectory.
        sidecar: Params, seed and scheme to store next to the termination.

    Returns:
        Path of the CSV file.
    """
    csv_path = os.path.join(directory, f"{name}.csv")
    write_table_csv(csv_path, record.header, record.table())
    payload = dict(sidecar or {})
    payload["termination"] = str(record.termination)
    payload["samples"] = len(record.times)
    write_json(os.path.join(directory, f"{name}.json"), payload)
    logger.debug("wrote trajectory %s", csv_path)
    return csv_path


def write_report(directory: str, name: str, report: CommutatorReport) -> str:
    """
    Write a CommutatorReport as `<name>.json`, a per-level `<name>.csv` and
    the individual ratios in `<name>_samples.csv` (level, sample, ratio).
    """
    write_json(os.path.join(directory, f"{name}.json"), report.to_dict())
    levels = sorted(report.max_ratios)
    diagnostics = sorted(report.diagnostics)
    header = [report.level_name, "max_ratio"] + diagnostics
    rows = [[level, report.max_ratios[level]] + [report.diagnostics[d][level] for d in diagnostics]
            for level in levels]
    csv_path = os.path.join(directory, f"{name}.csv")
    write_table_csv(csv_path, header, np.asarray(rows, dtype=float),
                    ["%d"] + [FLOAT_FORMAT] * (len(header) - 1))

    samples = [[level, index, ratio]
               for level in sorted(report.samples)
               for index, ratio in enumerate(report.samples[level])]
    write_table_csv(os.path.join(directory, f"{name}_samples.csv"),
                    [report.level_name, "sample", "ratio"],
                    np.asarray(samples, dtype=float).reshape(-1, 3), ["%d", "%d", FLOAT_FORMAT])
    return csv_path


def read_report_samples(path: str) -> Dict[int, np.ndarray]:
    """Per-level ratios from a `<name>_samples.csv`, in sample order."""
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    samples: Dict[int, np.ndarray] = {}
    for level in np.unique(table[:, 0]).astype(int):
        rows = table[table[:, 0] == level]
        samples[int(level)] = rows[np.argsort(rows[:, 1]), 2]
    return samples


def cutoff_to_dict(cutoff: CutoffChi) -> Dict:
    """Geometry plus the coefficients as [re, im] pairs."""
    payload = cutoff.to_dict()
    payload["coefficients"] = [[c.real, c.imag] for c in cutoff.field.coefficients.tolist()]
    return payload


def write_cutoff(path: str, cutoff: CutoffChi):
    write_json(path, cutoff_to_dict(cutoff))


def read_cutoff(path: str) -> CutoffChi:
    payload = read_json(path)
    coeffs = np.array([complex(re, im) for re, im in payload["coefficients"]])
    return CutoffChi(
        SpectralField(coeffs).check_finite(),
        a=payload.get("a"),
        b=payload.get("b"),
        delta=payload.get("delta"),
        amplitude=payload.get("amplitude", 1.0),
        level=payload.get("level"),
    )
