"""CSV and JSON report writers. Floats are written with 17 significant digits
so every value round-trips exactly and reruns produce identical bytes."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

BASE_COLUMNS = ("seed", "round", "expert", "loss")


@dataclass(frozen=True)
class ReportRow:
    seed: int
    round: int
    expert: int
    loss: float
    regrets: tuple
    bound: float


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(x, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        seq = list(x.tolist() if isinstance(x, np.ndarray) else x)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_json_value(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _json_value(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # JSON has no inf/nan; write them as strings
        return fmt_float(x) if math.isfinite(x) else json.dumps(fmt_float(x))
    if x is None:
        return "null"
    return json.dumps(str(x))


def dumps_json(obj, indent=2):
    return _json_value(obj, indent, 0) + "\n"


def write_csv(path, rows, comparator_labels):
    header = list(BASE_COLUMNS) + [f"regret[{lab}]" for lab in comparator_labels] + ["bound"]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                if len(r.regrets) != len(comparator_labels):
                    raise ValueError(f"row has {len(r.regrets)} regrets, expected {len(comparator_labels)}")
                w.writerow(
                    [r.seed, r.round, r.expert, fmt_float(r.loss)]
                    + [fmt_float(v) for v in r.regrets]
                    + [fmt_float(r.bound)]
                )
    except OSError as exc:
        raise OSError(f"cannot write report {path!r}: {exc}") from exc
    return path


def write_json(path, summary):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_json(summary))
    except OSError as exc:
        raise OSError(f"cannot write summary {path!r}: {exc}") from exc
    return path


def emit_report(rows, summary, out_dir, stem="report", comparator_labels=None):
    """Write ``<stem>.csv`` and ``<stem>.json`` under ``out_dir``; returns both paths."""
    if comparator_labels is None:
        comparator_labels = summary.get("comparators", [])
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir!r}: {exc}") from exc
    csv_path = write_csv(os.path.join(out_dir, f"{stem}.csv"), rows, comparator_labels)
    json_path = write_json(os.path.join(out_dir, f"{stem}.json"), summary)
    return csv_path, json_path
