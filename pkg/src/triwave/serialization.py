"""Pulse files, gate-sequence documents and self-describing CSV tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .gate_decomposer import GateSequenceReport, TwoLevelRotation, report_to_dict
from .open_system import DEFAULT_AMP_BOUND, PulseEnvelope

__all__ = [
    "write_pulse",
    "read_pulse",
    "sidecar_path",
    "write_table",
    "read_table",
    "report_from_dict",
    "write_report",
    "read_report",
    "digest",
]

PULSE_HEADER = ["t_ns", "eps_re", "eps_im"]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_suffix(".json")


def write_pulse(path: str | Path, pulse: PulseEnvelope, meta: dict | None = None) -> Path:
    """Write ``t_ns,eps_re,eps_im`` rows plus a JSON sidecar with metadata."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PULSE_HEADER)
        for t, e in zip(pulse.times, pulse.samples):
            w.writerow([_fmt(t), _fmt(e.real), _fmt(e.imag)])
    side = {
        "slice_ns": pulse.slice_ns,
        "T_ns": pulse.duration,
        "n_slices": pulse.n_slices,
        "amp_bound": pulse.amp_bound,
    }
    side.update(meta or {})
    sidecar_path(path).write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def read_pulse(path: str | Path) -> tuple[PulseEnvelope, dict]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != PULSE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(PULSE_HEADER)}")
    data = np.array(rows[1:], dtype=float).reshape(-1, 3)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    if "slice_ns" in meta:
        slice_ns = float(meta["slice_ns"])
    elif data.shape[0] > 1:
        slice_ns = float(data[1, 0] - data[0, 0])
    else:
        raise ValueError(f"{path}: cannot infer slice duration without sidecar")
    bound = float(meta.get("amp_bound", DEFAULT_AMP_BOUND))
    return PulseEnvelope(slice_ns, data[:, 1] + 1j * data[:, 2], bound), meta


def write_table(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence], meta: dict | None = None
) -> Path:
    """CSV whose first line is ``# triwave <version> key=value ...``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    items = " ".join(f"{k}={_fmt(v) if not isinstance(v, (list, tuple)) else ';'.join(map(_fmt, v))}"
                     for k, v in (meta or {}).items())
    buf.write(f"# triwave {__version__} {items}".rstrip() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    path.write_text(buf.getvalue())
    return path


def read_table(path: str | Path) -> tuple[list[str], list[list[str]], str]:
    """Header, raw string rows and the metadata comment line."""
    lines = Path(path).read_text().splitlines()
    comment = lines[0] if lines and lines[0].startswith("#") else ""
    body = lines[1:] if comment else lines
    rows = list(csv.reader(body))
    return rows[0], rows[1:], comment


def report_from_dict(doc: dict) -> GateSequenceReport:
    def cplx(p):
        return complex(p[0], p[1])

    dim = int(doc["dim"])
    rots = tuple(
        TwoLevelRotation(dim, int(r["i"]), int(r["j"]), np.array([[cplx(x) for x in row] for row in r["block"]]))
        for r in doc["rotations"]
    )
    phases = np.array([cplx(z) for z in doc["phases"]])
    return GateSequenceReport(dim, rots, phases, float(doc.get("reconstruction_error", 0.0)))


def write_report(path: str | Path, report: GateSequenceReport, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"triwave": __version__, **(meta or {}), **report_to_dict(report)}
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def read_report(path: str | Path) -> GateSequenceReport:
    return report_from_dict(json.loads(Path(path).read_text()))


def digest(*parts) -> str:
    """Stable short hash of arrays, mappings and scalars."""
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(str(p.dtype).encode())
            h.update(str(p.shape).encode())
            h.update(np.ascontiguousarray(p).tobytes())
        elif isinstance(p, dict):
            h.update(json.dumps(p, sort_keys=True).encode())
        else:
            h.update(repr(p).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]
