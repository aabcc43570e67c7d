"""Report files: per-clip JSON, dataset summary CSV/JSON, rank and
experiment tables.

Everything here is byte-deterministic for fixed inputs: keys are sorted,
floats go through repr, CSV rows end in a bare newline on every platform.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

from .metrics import MetricScore


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(rows: Sequence[Sequence], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerows(rows)


def clip_report(
    model: str,
    dataset: str,
    condition: str,
    clip_id: str,
    width: int,
    height: int,
    frames: int,
    n_positives: int,
    scores: Mapping[str, MetricScore],
    skipped: Mapping[str, str],
) -> dict:
    return {
        "model": model,
        "dataset": dataset,
        "condition": condition,
        "clip_id": clip_id,
        "width": width,
        "height": height,
        "frames": frames,
        "n_positives": n_positives,
        "scores": {
            name: {"value": s.value, "n_positives": s.n_positives}
            for name, s in scores.items()
        },
        "skipped": dict(skipped),
    }


def summary_report(
    model: str,
    dataset: str,
    condition: str,
    metric_summary: Mapping[str, Mapping[str, float | int]],
    skipped_clips: Mapping[str, str],
) -> dict:
    return {
        "model": model,
        "dataset": dataset,
        "condition": condition,
        "metrics": {k: dict(v) for k, v in metric_summary.items()},
        "skipped_clips": dict(skipped_clips),
    }


def summary_csv_rows(
    metric_summary: Mapping[str, Mapping[str, float | int]],
) -> list[list]:
    rows: list[list] = [
        ["metric", "n_clips", "total_weight", "regular_mean", "weighted_mean"]
    ]
    for name in sorted(metric_summary):
        entry = metric_summary[name]
        rows.append(
            [
                name,
                entry["n_clips"],
                entry["total_weight"],
                repr(float(entry["regular_mean"])),
                repr(float(entry["weighted_mean"])),
            ]
        )
    return rows


def experiment_csv_rows(results: Sequence[Mapping]) -> list[list]:
    rows: list[list] = [
        [
            "condition",
            "metric",
            "n_clips",
            "regular_mean_error",
            "regular_sd",
            "weighted_mean_error",
            "weighted_sd",
            "ks_d_plus",
            "ks_p",
        ]
    ]
    for r in results:
        rows.append(
            [
                r["condition"],
                r["metric"],
                r["n_clips"],
                repr(r["regular_mean_error"]),
                repr(r["regular_sd"]),
                repr(r["weighted_mean_error"]),
                repr(r["weighted_sd"]),
                repr(r["ks_d_plus"]),
                repr(r["ks_p"]),
            ]
        )
    return rows


def rank_csv_rows(
    group_names: Sequence[str],
    group_ranks: Mapping[str, Mapping[str, float]],
    overall: Mapping[str, float],
) -> list[list]:
    rows: list[list] = [["model", *group_names, "overall_mean_rank"]]
    for model in sorted(overall, key=lambda m: (overall[m], m)):
        row: list = [model]
        for g in group_names:
            r = group_ranks[g].get(model)
            row.append("" if r is None else repr(float(r)))
        row.append(repr(float(overall[model])))
        rows.append(row)
    return rows
