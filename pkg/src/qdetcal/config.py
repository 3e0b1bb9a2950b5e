"""Probe/detector spec strings, eta grids, and sweep configuration files.

Sweep files are JSON with a ``schema_version`` field::

    {
      "schema_version": 1,
      "detector": "onoff",
      "delta": 0.05,
      "curves": [{"probe": "fock:1", "repetitions": 5}, {"probe": "fock:5"}],
      "eta_grid": {"start": 0.01, "stop": 0.1, "count": 10, "scale": "linear"},
      "out": "sweep.csv",
      "format": "csv"
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import CurveSpec
from .core import (
    Coherent,
    DetectorModel,
    Fock,
    FockMixture,
    HeraldedSinglePhoton,
    Homodyne,
    KOutcome,
    OnOff,
    ProbeState,
    check_delta,
)
from .errors import DomainError

SCHEMA_VERSION = 1
ETA_GRID_MIN = 1e-4
ETA_GRID_MAX = 1.0 - 1e-6


def parse_probe(text: str, base_dir: Path | None = None) -> ProbeState:
    """``fock:N``, ``coherent:NBAR``, ``heralded:XI`` or ``mixture:FILE``."""
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise DomainError(f"probe spec {text!r} must look like KIND:VALUE")
    kind = kind.strip().lower()
    try:
        if kind == "fock":
            n = float(arg)
            if n != int(n):
                raise DomainError(f"Fock photon number must be an integer, got {arg!r}")
            return Fock(int(n))
        if kind == "coherent":
            return Coherent(float(arg))
        if kind == "heralded":
            return HeraldedSinglePhoton(float(arg))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad number in probe spec {text!r}") from None
    if kind == "mixture":
        path = Path(arg)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_mixture(path)
    raise DomainError(f"unknown probe kind {kind!r}")


def load_mixture(path: Path) -> FockMixture:
    """Mixture file: ``{"weights": {"0": 0.5, "1": 0.5}}`` or ``{"weights": [[0, 0.5], [1, 0.5]]}``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    weights = doc["weights"] if isinstance(doc, dict) else doc
    if isinstance(weights, dict):
        pairs = [(int(j), float(w)) for j, w in weights.items()]
    else:
        pairs = [(int(j), float(w)) for j, w in weights]
    return FockMixture(tuple(pairs))


def parse_detector(text: str, delta: float = 0.0) -> DetectorModel:
    """``onoff``, ``koutcome:K`` or ``homodyne``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "onoff":
        return OnOff(check_delta(delta))
    if delta:
        raise DomainError("dark counts are only modelled for the on/off detector")
    if kind == "koutcome":
        try:
            return KOutcome(int(arg))
        except ValueError:
            raise DomainError(f"koutcome needs an integer K, got {arg!r}") from None
    if kind == "homodyne":
        return Homodyne()
    raise DomainError(f"unknown detector {text!r}")


def parse_eta_grid(text: str, scale: str = "linear") -> np.ndarray:
    """``START:STOP:COUNT``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"eta grid {text!r} must be START:STOP:COUNT")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"bad eta grid {text!r}") from None
    return make_eta_grid(start, stop, count, scale)


def make_eta_grid(start: float, stop: float, count: int, scale: str = "linear") -> np.ndarray:
    if count < 1:
        raise DomainError("eta grid needs at least one point")
    if not ETA_GRID_MIN <= start <= stop <= ETA_GRID_MAX:
        raise DomainError(f"eta grid must lie inside [{ETA_GRID_MIN}, 1 - 1e-6]")
    if scale == "linear":
        return np.linspace(start, stop, count)
    if scale == "log":
        return np.geomspace(start, stop, count)
    raise DomainError(f"unknown grid scale {scale!r}")


@dataclass(frozen=True)
class SweepSpec:
    detector: DetectorModel
    curves: tuple[CurveSpec, ...]
    eta_grid: tuple[float, ...]
    out: Path | None = None
    format: str = "csv"
    check_energy: bool = True

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "SweepSpec":
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise DomainError(f"unsupported sweep schema_version {version!r}; expected {SCHEMA_VERSION}")
        detector = parse_detector(str(doc["detector"]), float(doc.get("delta", 0.0)))
        curves = []
        for entry in doc["curves"]:
            if isinstance(entry, str):
                entry = {"probe": entry}
            reps = Fraction(str(entry.get("repetitions", 1)))
            if reps <= 0:
                raise DomainError("repetitions must be positive")
            reps = int(reps) if reps.denominator == 1 else reps
            probe = parse_probe(str(entry["probe"]), base_dir)
            curves.append(CurveSpec(probe, detector, reps, str(entry.get("label", ""))))
        g = doc["eta_grid"]
        grid = make_eta_grid(float(g["start"]), float(g["stop"]), int(g["count"]), str(g.get("scale", "linear")))
        fmt = str(doc.get("format", "csv"))
        if fmt not in ("csv", "json"):
            raise DomainError(f"unknown output format {fmt!r}")
        out = doc.get("out")
        if out is not None:
            out = Path(out)
            if base_dir is not None and not out.is_absolute():
                out = base_dir / out
        return cls(detector, tuple(curves), tuple(float(e) for e in grid), out, fmt, bool(doc.get("check_energy", True)))

    @classmethod
    def load(cls, path: str | Path) -> "SweepSpec":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent)

