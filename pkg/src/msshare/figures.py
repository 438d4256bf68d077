"""Render verification verdicts as heatmap figures (PNG, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import to_rgb

from .verify import DecodabilityReport, SecurityReport

_PASS_COLOR = "#2e7d32"
_FAIL_COLOR = "#c62828"


def render_verification_figures(
    decodability: DecodabilityReport,
    security: SecurityReport | None,
    out_dir: Path,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [render_decodability_heatmap(decodability, out_dir / "decodability.png")]
    if security is not None:
        paths.append(render_security_heatmap(security, out_dir / "security_rank.png"))
    return paths


def render_decodability_heatmap(report: DecodabilityReport, path: Path) -> Path:
    clauses = sorted({c.clause for c in report.checks})
    messages = sorted({c.message for c in report.checks})
    grid = np.zeros((len(clauses), len(messages)))
    for check in report.checks:
        grid[clauses.index(check.clause), messages.index(check.message)] = 1.0 if check.ok else 0.0
    return _heatmap(
        grid,
        row_labels=[f"A{i}" for i in clauses],
        col_labels=[f"M{m}" for m in messages],
        cell_text=[["ok" if v else "FAIL" for v in row] for row in grid],
        title="Decodability: every clause spans every message",
        path=path,
    )


def render_security_heatmap(report: SecurityReport, path: Path) -> Path:
    subsets = []
    for check in report.checks:
        if check.subset not in subsets:
            subsets.append(check.subset)
    messages = sorted({c.message for c in report.checks})
    grid = np.zeros((len(subsets), len(messages)))
    text = [["" for _ in messages] for _ in subsets]
    for check in report.checks:
        row, col = subsets.index(check.subset), messages.index(check.message)
        grid[row, col] = 1.0 if check.secure else 0.0
        text[row][col] = f"{check.rank}/{check.rank_conditioned}"
    return _heatmap(
        grid,
        row_labels=[",".join(f"P{p}" for p in s) for s in subsets],
        col_labels=[f"M{m}" for m in messages],
        cell_text=text,
        title=f"Individual security (rank certificates, {report.subset_mode} subsets)",
        path=path,
    )


def _heatmap(grid, row_labels, col_labels, cell_text, title, path: Path) -> Path:
    rows, cols = grid.shape
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * cols, 1.2 + 0.55 * rows))
    colors = np.where(grid[..., None] > 0.5, to_rgb(_PASS_COLOR), to_rgb(_FAIL_COLOR))
    ax.imshow(colors, aspect="auto")
    ax.set_xticks(range(cols), col_labels)
    ax.set_yticks(range(rows), row_labels)
    for i in range(rows):
        for j in range(cols):
            ax.text(j, i, cell_text[i][j], ha="center", va="center",
                    color="white", fontsize=8)
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
