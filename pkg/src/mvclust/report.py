"""Report emission: schema-stable CSV, markdown mirrors, label files, the
co-association dump, and matplotlib figures rendered next to the delimited
output.

Metric columns are fixed-point with 4 decimals; wall_time_s is the only
column excluded from golden comparisons.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .bench import BenchmarkReport, MvecRow, PerProblemRow
from .core import FeatureIOError
from .ensemble import CoAssociationMatrix, MvecResult

BENCHMARK_COLUMNS = (
    "condition", "algorithm", "config", "nmi_mean", "purity_mean",
    "n_problems", "km_repeats", "wall_time_s",
)
MVEC_COLUMNS = (
    "condition", "algorithm", "config", "nmi", "purity",
    "nmi_single_mean", "purity_single_mean", "n_partitions", "wall_time_s",
)
PER_PROBLEM_COLUMNS = ("condition", "algorithm", "problem", "nmi", "purity")


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


# ---------------------------------------------------------------------------
# labels


def write_labels(path, labels) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def read_labels(path) -> np.ndarray:
    lines = [s for s in Path(path).read_text().splitlines() if s.strip()]
    if not lines:
        raise ValueError(f"{path}: empty labels file")
    try:
        return np.array([int(s) for s in lines], dtype=np.int64)
    except ValueError as e:
        raise FeatureIOError(f"{path}: unparseable label line") from e


# ---------------------------------------------------------------------------
# benchmark reports


def _benchmark_cells(report: BenchmarkReport) -> list[list[str]]:
    return [
        [
            row.condition, row.algorithm, row.config,
            _fmt(row.nmi_mean), _fmt(row.purity_mean),
            str(row.n_problems), str(row.km_repeats), _fmt(row.wall_time_s),
        ]
        for row in report.rows
    ]


def write_benchmark_csv(report: BenchmarkReport, path) -> None:
    lines = [",".join(BENCHMARK_COLUMNS)]
    lines += [",".join(cells) for cells in _benchmark_cells(report)]
    Path(path).write_text("\n".join(lines) + "\n")


def _markdown_table(columns, rows) -> str:
    lines = ["| " + " | ".join(columns) + " |"]
    lines.append("|" + "|".join(" --- " for _ in columns) + "|")
    lines += ["| " + " | ".join(cells) + " |" for cells in rows]
    return "\n".join(lines) + "\n"


def write_benchmark_markdown(report: BenchmarkReport, path) -> None:
    Path(path).write_text(_markdown_table(BENCHMARK_COLUMNS, _benchmark_cells(report)))


def write_per_problem_csv(rows: list[PerProblemRow], path) -> None:
    lines = [",".join(PER_PROBLEM_COLUMNS)]
    lines += [
        f"{r.condition},{r.algorithm},{r.problem},{r.nmi:.4f},{r.purity:.4f}"
        for r in rows
    ]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# mvec reports


def _mvec_cells(rows: list[MvecRow]) -> list[list[str]]:
    return [
        [
            r.condition, r.algorithm, r.config,
            _fmt(r.nmi), _fmt(r.purity),
            _fmt(r.nmi_single_mean), _fmt(r.purity_single_mean),
            str(r.n_partitions), _fmt(r.wall_time_s),
        ]
        for r in rows
    ]


def write_mvec_csv(rows: list[MvecRow], path) -> None:
    lines = [",".join(MVEC_COLUMNS)]
    lines += [",".join(cells) for cells in _mvec_cells(rows)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_mvec_markdown(rows: list[MvecRow], path) -> None:
    # consensus score with the single-view mean as the parenthesized reminder
    columns = ("condition", "algorithm", "config", "nmi (single)", "purity (single)", "n_partitions")
    cells = []
    for r in rows:
        cells.append([
            r.condition, r.algorithm, r.config,
            f"{_fmt(r.nmi)} ({_fmt(r.nmi_single_mean)})",
            f"{_fmt(r.purity)} ({_fmt(r.purity_single_mean)})",
            str(r.n_partitions),
        ])
    Path(path).write_text(_markdown_table(columns, cells))


# ---------------------------------------------------------------------------
# co-association dump


def write_coassociation_csv(ca: CoAssociationMatrix, path) -> None:
    """n x n fraction values, with the partition count on a '# N=<N>' first line."""
    lines = [f"# N={ca.n_partitions}"]
    values = ca.values
    lines += [",".join(repr(float(v)) for v in row) for row in values]
    Path(path).write_text("\n".join(lines) + "\n")


def read_coassociation_csv(path) -> CoAssociationMatrix:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# N="):
        raise FeatureIOError(f"{path}: missing '# N=' line")
    n_partitions = int(text[0][4:])
    values = np.array([[float(v) for v in line.split(",")] for line in text[1:] if line.strip()])
    counts = np.rint(values * n_partitions).astype(np.int64)
    return CoAssociationMatrix(counts, n_partitions)


# ---------------------------------------------------------------------------
# figures


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_benchmark_figures(report: BenchmarkReport, outdir) -> list[Path]:
    """Grouped bars of mean NMI and purity per condition, one file per metric."""
    plt = _plt()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    conditions = list(dict.fromkeys(r.condition for r in report.rows))
    algorithms = list(dict.fromkeys(r.algorithm for r in report.rows))
    written = []
    for metric, attr in (("nmi", "nmi_mean"), ("purity", "purity_mean")):
        fig, ax = plt.subplots(figsize=(1.2 + 1.1 * len(conditions), 3.2))
        width = 0.8 / max(len(algorithms), 1)
        xs = np.arange(len(conditions))
        for a_ix, alg in enumerate(algorithms):
            vals = []
            for cond in conditions:
                match = [r for r in report.rows if r.condition == cond and r.algorithm == alg]
                vals.append(getattr(match[0], attr) if match else np.nan)
            ax.bar(xs + a_ix * width, vals, width, label=alg)
        ax.set_xticks(xs + width * (len(algorithms) - 1) / 2)
        ax.set_xticklabels(conditions, rotation=30, ha="right")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel(f"mean {metric}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        target = outdir / f"benchmark_{metric}.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)
    return written


def render_mvec_figures(result: MvecResult, row: MvecRow, outdir) -> list[Path]:
    """Co-association heatmap plus consensus-vs-single-view score bars."""
    plt = _plt()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(result.coassociation.values, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xlabel("object")
    ax.set_ylabel("object")
    fig.colorbar(im, ax=ax, label="co-occurrence fraction")
    fig.tight_layout()
    target = outdir / "mvec_coassociation.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    written.append(target)

    if row.nmi is not None:
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        xs = np.arange(2)
        ax.bar(xs - 0.175, [row.nmi, row.purity], 0.35, label="consensus")
        ax.bar(xs + 0.175, [row.nmi_single_mean, row.purity_single_mean], 0.35,
               label="single-view mean")
        ax.set_xticks(xs)
        ax.set_xticklabels(["nmi", "purity"])
        ax.set_ylim(0, 1.05)
        ax.legend(fontsize=8)
        fig.tight_layout()
        target = outdir / "mvec_scores.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)
    return written
