"""Report emission: results CSV, per-run ROC TSV, plain-text summary.

Row order is deterministic (config lexicographic, then model) and floats
are written with six decimals, so identical inputs produce byte-identical
files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .evaluation import MetricsReport

__all__ = [
    "ExperimentRow",
    "CONFIG_COLUMNS",
    "CSV_COLUMNS",
    "sort_rows",
    "run_id",
    "write_csv",
    "write_roc_tsv",
    "write_summary",
]

CONFIG_COLUMNS = (
    "self_center",
    "tfidf",
    "selector",
    "selector_k",
    "sentiment",
    "use_words",
    "account_measures",
    "synonyms",
)

METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1", "auc")

CSV_COLUMNS = CONFIG_COLUMNS + ("model", "status") + METRIC_COLUMNS + ("message",)


@dataclass(frozen=True)
class ExperimentRow:
    config: dict[str, str]
    model: str
    status: str = "ok"
    message: str = ""
    report: MetricsReport | None = field(default=None, compare=False)

    def sort_key(self):
        return tuple(self.config[c] for c in CONFIG_COLUMNS) + (self.model,)


def sort_rows(rows) -> list[ExperimentRow]:
    return sorted(rows, key=ExperimentRow.sort_key)


def run_id(index: int, model: str) -> str:
    return f"run{index:04d}_{model}"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_csv(rows, path) -> list[ExperimentRow]:
    """Write the results table; returns the rows in written order."""
    rows = sort_rows(rows)
    if not rows:
        raise ValueError("refusing to write an empty report")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            cells = [row.config[c] for c in CONFIG_COLUMNS]
            cells += [row.model, row.status]
            if row.report is not None:
                r = row.report
                cells += [_fmt(r.accuracy), _fmt(r.precision), _fmt(r.recall), _fmt(r.f1), _fmt(r.auc)]
            else:
                cells += [""] * len(METRIC_COLUMNS)
            cells.append(row.message)
            writer.writerow(cells)
    return rows


def write_roc_tsv(points, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write("fp_rate\ttp_rate\n")
        for x, y in points:
            fh.write(f"{_fmt(x)}\t{_fmt(y)}\n")


def best_rows_per_model(rows) -> dict[str, ExperimentRow]:
    """Best ok-row per model by F1; ties go to higher accuracy, then config."""
    best: dict[str, ExperimentRow] = {}
    for row in sort_rows(rows):
        if row.status != "ok" or row.report is None:
            continue
        current = best.get(row.model)
        if current is None:
            best[row.model] = row
            continue
        better = (row.report.f1, row.report.accuracy) > (
            current.report.f1,
            current.report.accuracy,
        )
        # sort_rows already walks configs lexicographically, so on full ties
        # the earlier (smaller) config wins by staying put
        if better:
            best[row.model] = row
    return best


def write_summary(rows, path) -> None:
    rows = sort_rows(rows)
    best = best_rows_per_model(rows)
    n_ok = sum(1 for r in rows if r.status == "ok")
    lines = [
        f"runs: {len(rows)} ({n_ok} ok, {len(rows) - n_ok} failed)",
        "",
        "best configuration per model (by F1, ties by accuracy then config):",
    ]
    for model in sorted(best):
        row = best[model]
        r = row.report
        config = " ".join(f"{c}={row.config[c]}" for c in CONFIG_COLUMNS)
        lines.append(
            f"  {model}: f1={_fmt(r.f1)} accuracy={_fmt(r.accuracy)} "
            f"precision={_fmt(r.precision)} recall={_fmt(r.recall)} "
            f"auc={_fmt(r.auc)}"
        )
        lines.append(f"      {config}")
    errors = [r for r in rows if r.status != "ok"]
    if errors:
        lines.append("")
        lines.append("failed runs:")
        for row in errors:
            config = " ".join(f"{c}={row.config[c]}" for c in CONFIG_COLUMNS)
            lines.append(f"  {row.model}: {row.message}")
            lines.append(f"      {config}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
