"""Deterministic report serialization (JSON and a one-row CSV summary)."""
from __future__ import annotations

import csv
import io
import json
import math

from .runner import RunReport

CSV_HEADER = ("scenario", "chsh_value", "violates_eq1", "tv_distance", "chi_square", "trials", "seed")


def _clean(obj):
    # JSON has no NaN/Inf; none should reach here, so fail loudly if one does
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite number in report: {obj}")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def report_json(r: RunReport) -> str:
    # float repr is the shortest string that round-trips exactly (up to 17 digits)
    return json.dumps(_clean(r.to_dict()), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def headline(r: RunReport) -> dict:
    """The numbers in the CSV row.

    ``tv_distance`` and ``chi_square`` come from the sampled run when there
    is one. Without sampling, ``tv_distance`` is the analytic local-model vs
    quantum distance where the scenario defines one, and empty otherwise.
    """
    mc = r.monte_carlo
    tv = mc["tv_distance"] if mc else r.analytic.get("tv_distance_lhv_vs_quantum")
    return {
        "scenario": r.config["scenario"],
        "chsh_value": r.analytic["chsh_value"],
        "violates_eq1": "true" if r.analytic["violates_eq1"] else "false",
        "tv_distance": tv,
        "chi_square": mc["chi_square"] if mc else None,
        "trials": r.config["trials"],
        "seed": r.config["seed"],
    }


def report_csv(r: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    row = headline(r)
    writer.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                     for k in CSV_HEADER])
    return buf.getvalue()


def emit_report(r: RunReport, format: str = "json") -> bytes:
    if format == "json":
        return report_json(r).encode("utf-8")
    if format == "csv-summary":
        return report_csv(r).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
