"""Figures for experiment reports.  Uses the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "savefig.bbox": "tight",
}

COLORS = {"SBI": "#7f7f7f", "PPDG": "#1f77b4"}


def faults_identified_figure(report):
    """Grouped bars of top-k hits per program, one bar per technique."""
    aggs = [a for a in report.aggregates if a["program"] != "ALL"]
    names = [a["program"] for a in aggs]
    x = range(len(names))
    width = 0.38
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(6.0, 0.55 * len(names) + 2), 3.6))
        ax.bar(list(x), [a["killed"] for a in aggs], width * 2, color="#e8e8e8",
               label="killed mutants", zorder=0)
        ax.bar([i - width / 2 for i in x], [a["sbi_hits"] for a in aggs], width, color=COLORS["SBI"], label="SBI")
        ax.bar([i + width / 2 for i in x], [a["ppdg_hits"] for a in aggs], width, color=COLORS["PPDG"], label="PPDG")
        ax.set_xticks(list(x))
        ax.set_xticklabels(names, rotation=45, ha="right")
        ax.set_ylabel(f"faults in top {report.top_k}")
        ax.set_title("Faults identified per program")
        ax.legend(frameon=False)
        fig.tight_layout()
    return fig


def exam_curve_figure(report):
    """Fraction of killed mutants located versus fraction of statements examined."""
    killed = [r for r in report.rows if r["class"] == "KILLED"]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        for technique, key in (("SBI", "sbi_exam"), ("PPDG", "ppdg_exam")):
            scores = sorted(float(r[key]) for r in killed)
            n = len(scores)
            ys = [(i + 1) / n for i in range(n)] if n else []
            ax.step(scores, ys, where="post", color=COLORS[technique], label=technique)
        ax.set_xlim(0, 1.1)
        ax.set_ylim(0, 1.0)
        ax.set_xlabel("exam score (fraction of statements examined)")
        ax.set_ylabel("fraction of faults located")
        ax.set_title("Exam score distribution")
        ax.legend(frameon=False, loc="lower right")
        fig.tight_layout()
    return fig


def render_report_figures(report, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in (("faults_identified.png", faults_identified_figure), ("exam_scores.png", exam_curve_figure)):
        fig = build(report)
        path = out / name
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written
