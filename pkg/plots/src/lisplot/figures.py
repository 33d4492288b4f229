"""Turn simulator CSV artifacts into figures.

The CSVs are the only interface to the simulator: '#'-prefixed manifest
lines (including the experiment tag), one header row, numeric rows. Each
experiment maps to one figure kind; rendering never modifies the input.
"""

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")  # batch tool, no display

import matplotlib.pyplot as plt
import numpy as np


class PlotError(ValueError):
    """Unreadable input or a CSV that does not match its experiment schema."""


SCHEMAS = {
    "rate_vs_pilot": ["p_tr_dbw", "K", "t_p", "rate_mean", "rate_stderr",
                      "genie_mean", "genie_stderr"],
    "heatmap": ["K", "t_p", "rate_mean"],
    "bound_vs_k": ["m", "K", "bound", "genie_mean", "exact_mean", "exact_stderr"],
    "kstar_vs_tc": ["axis_value", "kstar_thm1", "kstar_thm2",
                    "kstar_numeric_exact_rate"],
    "kstar_vs_p": ["axis_value", "kstar_thm1", "kstar_thm2",
                   "kstar_numeric_exact_rate"],
    "table1": ["p_dbw", "kstar", "r_tilde", "r_mc"],
}

FIGURE_KIND = {name: ("heatmap" if name == "heatmap" else "lines")
               for name in SCHEMAS}

AXIS_LABELS = {
    "rate_vs_pilot": ("pilot length T_p (symbols)", "rate (b/s/Hz)"),
    "heatmap": ("surface elements K", "pilot length T_p (symbols)"),
    "bound_vs_k": ("surface elements K", "rate (b/s/Hz)"),
    "kstar_vs_tc": ("coherence block length T_c (symbols)", "optimal K"),
    "kstar_vs_p": ("transmit power (dBW)", "optimal K"),
    "table1": ("transmit power (dBW)", "rate (b/s/Hz)"),
}

FIG_SIZE = (6.4, 4.8)
DPI = 110


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    figure_kind: str            # lines | heatmap
    out_image: str              # .png or .svg
    x_label: str | None = None  # default derived from the experiment
    y_label: str | None = None


@dataclass(frozen=True)
class CsvTable:
    experiment: str
    manifest: dict
    columns: list
    rows: np.ndarray

    def col(self, name):
        if name not in self.columns:
            raise PlotError(f"CSV is missing column {name!r} "
                            f"(experiment {self.experiment})")
        return self.rows[:, self.columns.index(name)]


def read_table(path) -> CsvTable:
    manifest = {}
    experiment = None
    columns = None
    rows = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "experiment=" in body:
                    experiment = body.split("experiment=", 1)[1].split()[0]
                elif " = " in body:
                    key, val = body.split(" = ", 1)
                    manifest[key.strip()] = val.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError as exc:
                raise PlotError(f"non-numeric data row in {path}: {line!r}") from exc
    if experiment is None:
        raise PlotError(f"{path} has no manifest experiment tag")
    if experiment not in SCHEMAS:
        raise PlotError(f"unknown experiment {experiment!r} in {path}")
    if columns is None or not rows:
        raise PlotError(f"{path} has no data rows")
    width = len(columns)
    if any(len(r) != width for r in rows):
        raise PlotError(f"{path} has ragged rows")
    return CsvTable(experiment=experiment, manifest=manifest,
                    columns=columns, rows=np.asarray(rows, dtype=float))


def _check_schema(table: CsvTable):
    for name in SCHEMAS[table.experiment]:
        if name not in table.columns:
            raise PlotError(f"CSV is missing column {name!r} "
                            f"(experiment {table.experiment})")


def _series_label(axis_names, values):
    return ", ".join(f"{n}={v:g}" for n, v in zip(axis_names, values))


def _draw_lines(ax, table: CsvTable):
    exp = table.experiment
    if exp == "rate_vs_pilot":
        keys = np.stack([table.col("p_tr_dbw"), table.col("K")], axis=1)
        for key in np.unique(keys, axis=0):
            sel = np.all(keys == key, axis=1)
            tp = table.col("t_p")[sel]
            order = np.argsort(tp)
            label = _series_label(("P_tr", "K"), key)
            ax.plot(tp[order], table.col("rate_mean")[sel][order],
                    marker="o", label=f"estimated ({label})")
            ax.plot(tp[order], table.col("genie_mean")[sel][order],
                    linestyle="--", label=f"genie ({label})")
    elif exp == "bound_vs_k":
        ms = table.col("m")
        for m in np.unique(ms):
            sel = ms == m
            k = table.col("K")[sel]
            order = np.argsort(k)
            ax.plot(k[order], table.col("bound")[sel][order],
                    label=f"bound (m={m:g})")
            ax.plot(k[order], table.col("genie_mean")[sel][order],
                    linestyle="--", label=f"genie (m={m:g})")
            ax.plot(k[order], table.col("exact_mean")[sel][order],
                    linestyle=":", marker="o", label=f"exact (m={m:g})")
    elif exp in ("kstar_vs_tc", "kstar_vs_p"):
        x = table.col("axis_value")
        order = np.argsort(x)
        ax.plot(x[order], table.col("kstar_thm1")[order], marker="o",
                label="exact root")
        ax.plot(x[order], table.col("kstar_thm2")[order], marker="s",
                linestyle="--", label="closed form")
        ax.plot(x[order], table.col("kstar_numeric_exact_rate")[order],
                marker="^", linestyle=":", label="numeric argmax")
    elif exp == "table1":
        x = table.col("p_dbw")
        order = np.argsort(x)
        ax.plot(x[order], table.col("r_tilde")[order], marker="o", label="bound")
        ax.plot(x[order], table.col("r_mc")[order], marker="s", linestyle="--",
                label="simulated")
    else:
        raise PlotError(f"experiment {exp!r} has no line layout")
    ax.legend(fontsize=8)
    ax.grid(True, linestyle=":", linewidth=0.6)


def _draw_heatmap(fig, ax, table: CsvTable):
    ks = np.unique(table.col("K"))
    tps = np.unique(table.col("t_p"))
    grid = np.full((tps.size, ks.size), np.nan)
    k_index = {v: i for i, v in enumerate(ks)}
    tp_index = {v: i for i, v in enumerate(tps)}
    for k, tp, rate in zip(table.col("K"), table.col("t_p"), table.col("rate_mean")):
        grid[tp_index[tp], k_index[k]] = rate
    mesh = ax.pcolormesh(ks, tps, np.ma.masked_invalid(grid), shading="nearest")
    fig.colorbar(mesh, ax=ax, label="rate (b/s/Hz)")
    return mesh


def render(spec: FigureSpec):
    """Render one CSV to spec.out_image and return the matplotlib figure.

    Raises PlotError when the CSV is empty, does not carry the expected
    columns, or its experiment does not match the requested figure kind.
    """
    if spec.figure_kind not in ("lines", "heatmap"):
        raise PlotError(f"unknown figure kind {spec.figure_kind!r}")
    table = read_table(spec.csv_path)
    if FIGURE_KIND[table.experiment] != spec.figure_kind:
        raise PlotError(
            f"experiment {table.experiment!r} renders as "
            f"{FIGURE_KIND[table.experiment]!r}, not {spec.figure_kind!r}")
    _check_schema(table)
    fig, ax = plt.subplots(figsize=FIG_SIZE, dpi=DPI)
    if spec.figure_kind == "heatmap":
        _draw_heatmap(fig, ax, table)
    else:
        _draw_lines(ax, table)
    xlabel, ylabel = AXIS_LABELS[table.experiment]
    ax.set_xlabel(spec.x_label or xlabel)
    ax.set_ylabel(spec.y_label or ylabel)
    ax.set_title(table.experiment)
    fig.tight_layout()
    fig.savefig(spec.out_image)
    return fig
