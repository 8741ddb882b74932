"""Figures for the metrics report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import COLUMNS, HEADERS, MetricsTable, pct  # noqa: E402
from .report import VERIFIED  # noqa: E402

COLORS = {"CorrectBugLocalised": "#2a9d8f", "OtherBugsLocalised": "#e9c46a",
          "TranspiledFixedCode": "#8ab17d", "CompilationError": "#e76f51"}


def _label(g) -> str:
    desc = "" if g.description else " (no desc)"
    return f"{g.model}{desc}"


def plot_localisation(table: MetricsTable, out_dir) -> list[Path]:
    """One stacked bar chart per (benchmark, mutation kind)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    keys = sorted({(g.benchmark, g.mutation) for g in table.localisation()})
    for bench, kind in keys:
        gs = [g for g in table.localisation() if (g.benchmark, g.mutation) == (bench, kind)]
        fig, ax = plt.subplots(figsize=(1.6 + 1.2 * len(gs), 3.6))
        bottom = [0.0] * len(gs)
        xs = range(len(gs))
        for c in COLUMNS:
            vals = [g.percentages()[c] for g in gs]
            ax.bar(xs, vals, bottom=bottom, color=COLORS[c], label=HEADERS[c].lstrip("% "))
            bottom = [b + v for b, v in zip(bottom, vals)]
        ax.set_xticks(list(xs))
        ax.set_xticklabels([_label(g) for g in gs], rotation=20, ha="right")
        ax.set_ylim(0, 100)
        ax.set_ylabel("% of problems")
        ax.set_title(f"{bench or 'benchmark'}: {kind}")
        ax.legend(fontsize=7, loc="upper right")
        fig.tight_layout()
        path = out_dir / f"localisation_{bench or 'benchmark'}_{kind}.png"
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        paths.append(path)
    return paths


def plot_verification(table: MetricsTable, out_dir) -> Path | None:
    gs = table.verification()
    if not gs:
        return None
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(1.6 + 1.2 * len(gs), 3.4))
    vals = [pct(g.count(VERIFIED), g.n) for g in gs]
    ax.bar(range(len(gs)), vals, color="#264653")
    ax.set_xticks(list(range(len(gs))))
    ax.set_xticklabels([f"{_label(g)}\n{g.benchmark}" for g in gs], rotation=20, ha="right")
    ax.set_ylim(0, 100)
    ax.set_ylabel("% verified")
    ax.set_title("Verification success")
    fig.tight_layout()
    path = out_dir / "verification.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def write_report(table: MetricsTable, out_dir) -> list[Path]:
    """Delimited metrics, text tables (both denominators) and figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (("metrics.csv", table.to_csv()),
                       ("tables.txt", table.render()),
                       ("tables_folded.txt", table.render(fold_give_ups=True))):
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    written += plot_localisation(table, out_dir)
    v = plot_verification(table, out_dir)
    if v is not None:
        written.append(v)
    return written
