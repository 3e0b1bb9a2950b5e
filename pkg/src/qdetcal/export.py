"""Deterministic CSV and JSON serialization of Fisher curves."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

from .analysis import ComparisonCurve
from .core import FisherResult

CSV_HEADER = ("eta", "curve_label", "fisher_value", "method", "error_estimate", "divergent")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_rows(curves: Sequence[ComparisonCurve]) -> Iterable[tuple[float, str, FisherResult]]:
    for curve in curves:
        for eta, result in zip(curve.eta_grid, curve.values):
            yield eta, curve.label, result


def curves_to_csv(curves: Sequence[ComparisonCurve]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for eta, label, r in curve_rows(curves):
        writer.writerow(
            [
                fmt(eta),
                label,
                "" if r.divergent else fmt(r.value),
                r.method.value,
                fmt(r.error_estimate),
                "true" if r.divergent else "false",
            ]
        )
    return buf.getvalue()


def read_curves_csv(text: str) -> list[dict]:
    """Parse CSV written by :func:`curves_to_csv` back into row dicts."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
    rows = []
    for row in reader:
        divergent = row["divergent"] == "true"
        rows.append(
            {
                "eta": float(row["eta"]),
                "curve_label": row["curve_label"],
                "result": FisherResult.from_dict(
                    {
                        "value": None if divergent else float(row["fisher_value"]),
                        "method": row["method"],
                        "error_estimate": float(row["error_estimate"]),
                        "divergent": divergent,
                    }
                ),
            }
        )
    return rows


def curves_to_json(curves: Sequence[ComparisonCurve]) -> str:
    doc = {
        "curves": [
            {
                "label": c.label,
                "probe": c.probe.label(),
                "detector": c.detector.label(),
                "repetitions": str(c.repetitions_per_unit_energy),
                "eta": list(c.eta_grid),
                "values": [v.to_dict() for v in c.values],
            }
            for c in curves
        ]
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
