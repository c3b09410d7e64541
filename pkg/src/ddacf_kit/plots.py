"""Figure rendering for report output.

Renders an F1-by-configuration bar chart and the best ROC curve per model
next to the delimited report files.  Uses the Agg backend so runs are
headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import CONFIG_COLUMNS, best_rows_per_model, sort_rows

MAX_CONFIG_BARS = 24


def _config_key(row) -> tuple:
    return tuple(row.config[c] for c in CONFIG_COLUMNS)


def render_f1_bars(rows, path) -> None:
    """Grouped F1 bars: configurations on x, one bar per model."""
    rows = [r for r in sort_rows(rows) if r.status == "ok" and r.report is not None]
    if not rows:
        return
    configs = []
    for row in rows:
        key = _config_key(row)
        if key not in configs:
            configs.append(key)
    models = sorted({r.model for r in rows})
    f1 = {(_config_key(r), r.model): r.report.f1 for r in rows}
    if len(configs) > MAX_CONFIG_BARS:
        configs = sorted(
            configs,
            key=lambda c: -max(f1.get((c, m), 0.0) for m in models),
        )[:MAX_CONFIG_BARS]
        configs.sort()

    width = 0.8 / len(models)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.55 * len(configs) * len(models)), 4.0))
    for mi, model in enumerate(models):
        xs = [ci + mi * width for ci in range(len(configs))]
        ys = [f1.get((c, model), 0.0) for c in configs]
        ax.bar(xs, ys, width=width, label=model)
    ax.set_xticks([ci + 0.4 - width / 2 for ci in range(len(configs))])
    ax.set_xticklabels([f"C{ci:02d}" for ci in range(len(configs))], rotation=0, fontsize=8)
    ax.set_xlabel("configuration")
    ax.set_ylabel("F1")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    ax.set_title("F1 by configuration and model")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_roc_curves(rows, path) -> None:
    """ROC curve of the best run per model, AUC in the legend."""
    best = best_rows_per_model(rows)
    if not best:
        return
    fig, ax = plt.subplots(figsize=(5.0, 4.5))
    plotted = False
    for model in sorted(best):
        report = best[model].report
        if not report.roc_points:
            continue
        plotted = True
        xs = [p[0] for p in report.roc_points]
        ys = [p[1] for p in report.roc_points]
        ax.plot(xs, ys, label=f"{model} (AUC {report.auc:.3f})")
    if not plotted:
        plt.close(fig)
        return
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
    ax.set_xlabel("FP rate")
    ax.set_ylabel("TP rate")
    ax.set_title("ROC, best configuration per model")
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report_figures(rows, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    f1_path = outdir / "f1_by_config.png"
    roc_path = outdir / "roc_curves.png"
    render_f1_bars(rows, f1_path)
    if f1_path.exists():
        written.append(f1_path)
    render_roc_curves(rows, roc_path)
    if roc_path.exists():
        written.append(roc_path)
    return written
