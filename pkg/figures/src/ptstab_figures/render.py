"""Render ptstab output files into multi-panel figures.

Five recipes mirror the library's figure-of-record presets:

* fig1  eigenvalue loci of the coupled-stiffness system (balanced and
        unbalanced damping) plus growth-rate cross-sections
* fig2  stability-boundary conoid in (k1, X, Y) with its top view
* fig3  gyroscopic damping sweeps, imaginary and real parts
* fig4  gyroscopic stability boundary in (kappa, X, Y) with top view
* fig5  loss-plane threshold surface (umbrella), amplitude cross-sections
        and constant-amplitude contours with tangent lines

Recipes consume the documented CSV/JSON schemas only and never recompute
thresholds; branch identity and special segments come from the branch
column emitted by the producer.  Rendering is read-only and
deterministic: no timestamps are embedded, so identical inputs yield
byte-identical images.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(ValueError):
    """An input file does not match the documented column layout."""


class RenderError(RuntimeError):
    """Inputs parsed but cannot produce a meaningful figure."""


SWEEP_VALUE_COLUMNS = [f"{part}_lambda{i}" for i in range(1, 5) for part in ("re", "im")]

RECIPE_INPUTS: dict[str, tuple[str, ...]] = {
    "fig1": ("fig1a.csv", "fig1b.csv"),
    "fig2": ("fig2.csv",),
    "fig3": ("fig3a.csv", "fig3c.csv"),
    "fig4": ("fig4.csv",),
    "fig5": ("fig5a.csv", "fig5b.csv", "fig5-slopes.json"),
}

PANEL_TITLES: dict[str, tuple[str, ...]] = {
    "fig1": ("(a) balanced loci", "(b) unbalanced loci", "(c) growth rates, Y < 0", "(d) growth rates, Y > 0"),
    "fig2": ("(a) boundary surface", "(b) top view"),
    "fig3": ("(a) Im, balanced", "(b) Re, balanced", "(c) Im, detuned", "(d) Re, detuned"),
    "fig4": ("(a) boundary surface", "(b) top view"),
    "fig5": ("(a) threshold surface", "(b) amplitude cross-sections", "(c) loss-plane contours"),
}

BRANCH_COLORS = {0: "#1f77b4", 1: "#ff7f0e", 2: "#d62728", 3: "#2ca02c"}


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    inputs: tuple[Path, ...]
    layout: tuple[int, int]
    panel_titles: tuple[str, ...]


def recipe_for(figure_id: str, in_dir: Path) -> FigureRecipe:
    if figure_id not in RECIPE_INPUTS:
        raise SchemaError(f"unknown recipe {figure_id!r}; expected one of {sorted(RECIPE_INPUTS)}")
    inputs = tuple(in_dir / name for name in RECIPE_INPUTS[figure_id])
    for path in inputs:
        if not path.is_file():
            raise SchemaError(f"missing input file {path}")
    layouts = {"fig1": (2, 2), "fig2": (1, 2), "fig3": (2, 2), "fig4": (1, 2), "fig5": (1, 3)}
    return FigureRecipe(figure_id, inputs, layouts[figure_id], PANEL_TITLES[figure_id])


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------


def _read_csv(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path} is empty")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row has {len(cells)} cells, header has {len(header)}")
        rows.append(dict(zip(header, cells)))
    return header, rows


def _require_columns(path: Path, header: Sequence[str], needed: Sequence[str]) -> None:
    for col in needed:
        if col not in header:
            raise SchemaError(f"missing column {col!r} in {path}")


def _load_sweep(path: Path) -> tuple[str, np.ndarray, np.ndarray]:
    """Returns (axis name, axis values, complex roots array of shape (n, 4))."""
    header, rows = _read_csv(path)
    axis = header[0]
    _require_columns(path, header, SWEEP_VALUE_COLUMNS + ["classification", "status"])
    xs, vals = [], []
    for row in rows:
        if row["status"] != "ok":
            continue
        xs.append(float(row[axis]))
        vals.append(
            [
                complex(float(row[f"re_lambda{i}"]), float(row[f"im_lambda{i}"]))
                for i in range(1, 5)
            ]
        )
    if not xs:
        raise RenderError(f"no usable rows in {path}")
    return axis, np.array(xs), np.array(vals)


def _load_mesh(path: Path, columns: Sequence[str]) -> list[dict[str, float | str]]:
    header, rows = _read_csv(path)
    _require_columns(path, header, list(columns) + ["branch", "stable_side", "status"])
    out: list[dict[str, float | str]] = []
    for row in rows:
        if row["status"] != "ok":
            continue
        rec: dict[str, float | str] = {c: float(row[c]) for c in columns}
        rec["branch"] = int(row["branch"])
        rec["stable_side"] = row["stable_side"]
        out.append(rec)
    if not out:
        raise RenderError(f"empty input mesh in {path}")
    return out


def _load_threshold_report(path: Path) -> dict[str, float]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    if "data" not in doc:
        raise SchemaError(f"missing column 'data' in {path}")
    out = {}
    for row in doc["data"]:
        if "name" not in row or "value" not in row:
            raise SchemaError(f"missing column 'name'/'value' in {path}")
        out[str(row["name"])] = float(row["value"])
    return out


# ---------------------------------------------------------------------------
# panels
# ---------------------------------------------------------------------------


def _plot_loci_3d(ax, xs: np.ndarray, vals: np.ndarray, axis: str) -> None:
    for i in range(4):
        ax.plot(vals[:, i].real, xs, vals[:, i].imag, lw=0.9, color=BRANCH_COLORS[i % 4])
    ax.set_xlabel("Re $\\lambda$")
    ax.set_ylabel(axis)
    ax.set_zlabel("Im $\\lambda$")


def _render_fig1(recipe: FigureRecipe, fig) -> None:
    axis_a, ys_a, vals_a = _load_sweep(recipe.inputs[0])
    axis_b, ys_b, vals_b = _load_sweep(recipe.inputs[1])
    ax1 = fig.add_subplot(2, 2, 1, projection="3d")
    _plot_loci_3d(ax1, ys_a, vals_a, axis_a)
    ax2 = fig.add_subplot(2, 2, 2, projection="3d")
    _plot_loci_3d(ax2, ys_b, vals_b, axis_b)
    for panel, (lo, hi) in ((3, (-1.2, 0.0)), (4, (0.0, 1.2))):
        ax = fig.add_subplot(2, 2, panel)
        mask = (ys_b >= lo) & (ys_b <= hi)
        for i in range(4):
            ax.plot(ys_b[mask], vals_b[mask, i].real, lw=1.0, color="#d62728")
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_xlabel(axis_b)
        ax.set_ylabel("Re $\\lambda$")


def _render_fig3(recipe: FigureRecipe, fig) -> None:
    panels = []
    for path in recipe.inputs:
        axis, xs, vals = _load_sweep(path)
        panels.append((axis, xs, vals.imag))
        panels.append((axis, xs, vals.real))
    labels = ("Im $\\lambda$", "Re $\\lambda$", "Im $\\lambda$", "Re $\\lambda$")
    for idx, ((axis, xs, parts), label) in enumerate(zip(panels, labels), start=1):
        ax = fig.add_subplot(2, 2, idx)
        for i in range(4):
            ax.plot(xs, parts[:, i], lw=0.9, color=BRANCH_COLORS[i % 4])
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_xlabel(axis)
        ax.set_ylabel(label)


def _render_fig2(recipe: FigureRecipe, fig) -> None:
    mesh = _load_mesh(recipe.inputs[0], ("X", "Y", "k1_critical"))
    sheet_rows = [r for r in mesh if r["branch"] in (0, 1)]
    segment = [r for r in mesh if r["branch"] == 2]
    if not sheet_rows:
        raise RenderError(f"no boundary sheets in {recipe.inputs[0]}")
    ax1 = fig.add_subplot(1, 2, 1, projection="3d")
    rulings: dict[tuple[int, float], list[tuple[float, float]]] = {}
    for r in sheet_rows:
        rulings.setdefault((int(r["branch"]), float(r["Y"])), []).append(
            (float(r["X"]), float(r["k1_critical"]))
        )
    for (branch, y), pts in sorted(rulings.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        k1s = [p[1] for p in pts]
        ax1.plot(k1s, xs, [y] * len(pts), lw=0.5, color=BRANCH_COLORS[branch])
    if segment:
        seg = sorted((float(r["Y"]), float(r["k1_critical"])) for r in segment)
        ax1.plot([p[1] for p in seg], [0.0] * len(seg), [p[0] for p in seg],
                 lw=2.5, color=BRANCH_COLORS[2])
    ax1.set_xlabel("$k_1$")
    ax1.set_ylabel("X")
    ax1.set_zlabel("Y")
    ax2 = fig.add_subplot(1, 2, 2)
    for (branch, _y), pts in sorted(rulings.items()):
        pts.sort()
        ax2.plot([p[1] for p in pts], [p[0] for p in pts], lw=0.4,
                 color=BRANCH_COLORS[branch], alpha=0.6)
    if segment:
        ax2.plot([seg[0][1]], [0.0], marker="o", color=BRANCH_COLORS[2], ms=6)
    ax2.set_xlabel("$k_1$")
    ax2.set_ylabel("X")


def _render_fig4(recipe: FigureRecipe, fig) -> None:
    mesh = _load_mesh(recipe.inputs[0], ("kappa", "X", "Y_critical"))
    ax1 = fig.add_subplot(1, 2, 1, projection="3d")
    lines: dict[tuple[float, int], list[tuple[float, float]]] = {}
    for r in mesh:
        lines.setdefault((float(r["kappa"]), int(r["branch"])), []).append(
            (float(r["X"]), float(r["Y_critical"]))
        )
    for (kappa, branch), pts in sorted(lines.items()):
        pts.sort()
        ax1.plot([kappa] * len(pts), [p[0] for p in pts], [p[1] for p in pts],
                 lw=0.7, color=BRANCH_COLORS[branch % 4])
    pt_column = sorted(
        float(r["Y_critical"]) for r in mesh if r["kappa"] == 0.0 and r["X"] == 0.0
    )
    if len(pt_column) >= 2:
        ax1.plot([0.0, 0.0], [0.0, 0.0], [pt_column[0], pt_column[-1]],
                 lw=2.5, color=BRANCH_COLORS[2])
        ax1.scatter([0.0, 0.0], [0.0, 0.0], [pt_column[0], pt_column[-1]],
                    color="k", s=14, depthshade=False)
    ax1.set_xlabel("$\\kappa$")
    ax1.set_ylabel("X")
    ax1.set_zlabel("Y")
    ax2 = fig.add_subplot(1, 2, 2)
    xs = sorted({float(r["X"]) for r in mesh})
    cmap = plt.get_cmap("viridis")
    span = max(xs) - min(xs) or 1.0
    for x in xs:
        pts = sorted((float(r["kappa"]), float(r["Y_critical"])) for r in mesh if r["X"] == x)
        color = cmap((x - min(xs)) / span)
        ax2.plot([p[0] for p in pts], [p[1] for p in pts], ".", ms=2.5, color=color)
    if len(pt_column) >= 2:
        ax2.plot([0.0, 0.0], [pt_column[0], pt_column[-1]], lw=2.5, color=BRANCH_COLORS[2])
    ax2.set_xlabel("$\\kappa$")
    ax2.set_ylabel("Y")


def _pivot_mesh(mesh, x_name, y_name, z_name, branch):
    xs = sorted({float(r[x_name]) for r in mesh})
    ys = sorted({float(r[y_name]) for r in mesh})
    grid = np.full((len(xs), len(ys)), np.nan)
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    for r in mesh:
        if int(r["branch"]) != branch:
            continue
        grid[xi[float(r[x_name])], yi[float(r[y_name])]] = float(r[z_name])
    return np.array(xs), np.array(ys), grid


def _render_fig5(recipe: FigureRecipe, fig) -> None:
    mesh = _load_mesh(recipe.inputs[0], ("a", "c", "u0_critical"))
    sections = _load_mesh(recipe.inputs[1], ("a", "c", "u0_critical"))
    report = _load_threshold_report(recipe.inputs[2])
    for key in ("u0_ideal", "level_below", "level_above", "slope_plus", "slope_minus"):
        if key not in report:
            raise SchemaError(f"missing column {key!r} in {recipe.inputs[2]}")

    ax1 = fig.add_subplot(1, 3, 1, projection="3d")
    grids = {}
    for branch in (0, 1):
        a_vals, c_vals, grid = _pivot_mesh(mesh, "a", "c", "u0_critical", branch)
        grids[branch] = (a_vals, c_vals, grid)
        if np.all(np.isnan(grid)):
            continue
        color = BRANCH_COLORS[branch]
        for i, a in enumerate(a_vals):
            ax1.plot([a] * len(c_vals), c_vals, grid[i, :], lw=0.5, color=color)
        for j, c in enumerate(c_vals):
            ax1.plot(a_vals, [c] * len(a_vals), grid[:, j], lw=0.5, color=color)
    # the sheets meet along the zero-dispersive-loss edge at the ideal amplitude
    edge = sorted((float(r["c"]), float(r["u0_critical"])) for r in mesh if r["a"] == 0.0)
    if edge:
        ax1.plot([0.0] * len(edge), [p[0] for p in edge], [p[1] for p in edge],
                 lw=2.5, color=BRANCH_COLORS[2])
    ax1.set_xlabel("a")
    ax1.set_ylabel("c")
    ax1.set_zlabel("$|u_0|$")

    ax2 = fig.add_subplot(1, 3, 2)
    a_levels = sorted({float(r["a"]) for r in sections})
    section_colors = {a_levels[0]: "#2ca02c"}
    if len(a_levels) > 1:
        section_colors[a_levels[-1]] = "#d62728"
    for a in a_levels:
        for branch in (0, 1):
            pts = sorted(
                (float(r["c"]), float(r["u0_critical"]))
                for r in sections
                if float(r["a"]) == a and int(r["branch"]) == branch
            )
            if not pts:
                continue
            style = "-" if branch == 0 else "--"
            ax2.plot([p[0] for p in pts], [p[1] for p in pts], style,
                     lw=1.2, color=section_colors.get(a, "0.4"))
    ax2.axhline(report["u0_ideal"], color="0.7", lw=0.6)
    ax2.set_xlabel("c")
    ax2.set_ylabel("$|u_0|$")

    ax3 = fig.add_subplot(1, 3, 3)
    levels = {
        report["level_below"]: "k",
        report["u0_ideal"]: "#2ca02c",
        report["level_above"]: "#d62728",
    }
    for branch, (a_vals, c_vals, grid) in grids.items():
        if np.all(np.isnan(grid)) or len(a_vals) < 2 or len(c_vals) < 2:
            continue
        masked = np.ma.masked_invalid(grid)
        for level, color in levels.items():
            if masked.count() == 0:
                continue
            lo, hi = float(masked.min()), float(masked.max())
            if not (lo <= level <= hi):
                continue
            ax3.contour(a_vals, c_vals, masked.T, levels=[level], colors=[color], linewidths=1.2)
    a_max = max(float(r["a"]) for r in mesh)
    c_max = max(float(r["c"]) for r in mesh)
    a_line = np.linspace(0.0, a_max, 50)
    for slope in (report["slope_plus"], report["slope_minus"]):
        ax3.plot(a_line, slope * a_line, color="#1f77b4", lw=1.0)
    ax3.set_xlim(0.0, a_max)
    ax3.set_ylim(0.0, c_max)
    ax3.set_xlabel("a")
    ax3.set_ylabel("c")


_RENDERERS = {
    "fig1": _render_fig1,
    "fig2": _render_fig2,
    "fig3": _render_fig3,
    "fig4": _render_fig4,
    "fig5": _render_fig5,
}

_FIG_SIZES = {"fig1": (10, 8), "fig2": (10, 4.5), "fig3": (10, 7), "fig4": (10, 4.5), "fig5": (13, 4.2)}


def render(recipe: FigureRecipe, out_dir: Path, dpi: int = 110) -> Path:
    """Render one recipe to <out_dir>/<figure_id>.png and return the path.

    Raises SchemaError or RenderError before any file is created when the
    inputs cannot be plotted; timestamps are suppressed so re-rendering
    identical inputs is byte-identical.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    fig = plt.figure(figsize=_FIG_SIZES[recipe.figure_id])
    try:
        _RENDERERS[recipe.figure_id](recipe, fig)
        for ax, title in zip(fig.axes, recipe.panel_titles):
            ax.set_title(title, fontsize=10)
        fig.tight_layout()
        out_path = out_dir / f"{recipe.figure_id}.png"
        fig.savefig(out_path, dpi=dpi, metadata={"Software": None})
    finally:
        plt.close(fig)
    return out_path


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figs",
        description="Render ptstab CSV/JSON outputs into stability figures.",
    )
    parser.add_argument("--recipe", required=True, choices=sorted(RECIPE_INPUTS))
    parser.add_argument("--in", dest="in_dir", required=True, help="directory with the input files")
    parser.add_argument("--out", dest="out_dir", required=True, help="directory for the image")
    parser.add_argument("--dpi", type=int, default=110)
    ns = parser.parse_args(argv)
    try:
        recipe = recipe_for(ns.recipe, Path(ns.in_dir))
        out_path = render(recipe, Path(ns.out_dir), dpi=ns.dpi)
    except (SchemaError, RenderError) as exc:
        print(f"render-figs: {exc}", file=sys.stderr)
        return 1
    print(out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
