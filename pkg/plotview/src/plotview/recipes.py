"""Figure recipes over simulation CSV bundles.

Four figure kinds, all reading only the documented CSV contract:

    density_profiles            per-class final profiles, one panel per class,
                                one curve per input bundle
    density_overlay_by_parameter  total-density profiles from several bundles
                                overlaid in one panel
    functional_vs_p             J(p) curves from a penetration sweep table,
                                one curve per tau_h
    tv_vs_time                  total-variation history per input bundle

Inputs are bundle directories (holding snapshots.csv / diagnostics.csv) or
direct CSV paths.  Rendering is deterministic: fixed style, fixed SVG hash
salt, no timestamps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotview"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FIGURE_KINDS = (
    "density_profiles",
    "density_overlay_by_parameter",
    "functional_vs_p",
    "tv_vs_time",
)


class MissingColumn(Exception):
    """A recipe references a column the CSV does not carry."""


class EmptyInput(Exception):
    """An input table has no data rows."""


@dataclass(frozen=True)
class RecipeInput:
    path: Path
    label: str


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    inputs: tuple[RecipeInput, ...]
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.inputs:
            raise EmptyInput("recipe lists no inputs")


def recipe_from_dict(doc: dict) -> FigureRecipe:
    inputs = []
    for item in doc.get("inputs", []):
        if isinstance(item, str):
            inputs.append(RecipeInput(path=Path(item), label=Path(item).name))
        else:
            inputs.append(
                RecipeInput(path=Path(item["path"]), label=str(item.get("label", item["path"])))
            )
    return FigureRecipe(
        kind=doc.get("kind", ""),
        inputs=tuple(inputs),
        options=dict(doc.get("options", {})),
    )


def _read_table(path: Path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInput(f"{path}: no header row") from None
        rows = list(reader)
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    table = {}
    for k, name in enumerate(header):
        column = [row[k] for row in rows]
        try:
            table[name] = np.asarray([float(v) for v in column])
        except ValueError:
            table[name] = np.asarray(column)
    return table


def _resolve_csv(path: Path, filename: str) -> Path:
    return path / filename if path.is_dir() else path


def _require(table: dict, names, where) -> None:
    missing = [n for n in names if n not in table]
    if missing:
        raise MissingColumn(f"{where}: missing column(s) {missing}")


def _class_columns(table: dict) -> list[str]:
    return sorted(
        (name for name in table if name.startswith("rho_")),
        key=lambda s: int(s.split("_")[1]),
    )


def _snapshot_slice(table: dict, when) -> np.ndarray:
    times = np.unique(table["t"])
    target = times[-1] if when is None else times[np.argmin(np.abs(times - float(when)))]
    return table["t"] == target


def _render_density_profiles(recipe: FigureRecipe):
    tables = [
        (_read_table(_resolve_csv(item.path, "snapshots.csv")), item.label)
        for item in recipe.inputs
    ]
    classes = _class_columns(tables[0][0])
    for table, label in tables:
        _require(table, ["t", "x"] + classes, label)
    fig, axes = plt.subplots(
        1, len(classes), figsize=(5.0 * len(classes), 3.6), sharey=True, squeeze=False
    )
    when = recipe.options.get("time")
    for k, col in enumerate(classes):
        ax = axes[0, k]
        for table, label in tables:
            mask = _snapshot_slice(table, when)
            ax.plot(table["x"][mask], table[col][mask], label=label)
        ax.set_xlabel("x")
        ax.set_title(col.replace("rho_", "class "))
        ax.grid(True, alpha=0.3)
    axes[0, 0].set_ylabel("density")
    axes[0, -1].legend(loc="best", fontsize=8)
    return fig


def _render_density_overlay(recipe: FigureRecipe):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    when = recipe.options.get("time")
    for item in recipe.inputs:
        table = _read_table(_resolve_csv(item.path, "snapshots.csv"))
        _require(table, ("t", "x", "r"), item.label)
        mask = _snapshot_slice(table, when)
        ax.plot(table["x"][mask], table["r"][mask], label=item.label)
    ax.set_xlabel("x")
    ax.set_ylabel("total density")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return fig


def _render_functional_vs_p(recipe: FigureRecipe):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for item in recipe.inputs:
        table = _read_table(_resolve_csv(item.path, "sweep.csv"))
        _require(table, ("p", "j_functional"), item.label)
        tau_col = table.get("tau_h")
        if tau_col is None:
            groups = [(None, np.ones(len(table["p"]), dtype=bool))]
        else:
            groups = [(tau, tau_col == tau) for tau in np.unique(tau_col)]
        for tau, mask in groups:
            order = np.argsort(table["p"][mask], kind="stable")
            label = item.label if tau is None else f"{item.label}, tau_h = {tau:g}"
            ax.plot(table["p"][mask][order], table["j_functional"][mask][order],
                    marker="o", ms=3, label=label)
    ax.set_xlabel("autonomous share p")
    ax.set_ylabel("J(p)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return fig


def _render_tv_vs_time(recipe: FigureRecipe):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for item in recipe.inputs:
        table = _read_table(_resolve_csv(item.path, "diagnostics.csv"))
        _require(table, ("t", "tv_r"), item.label)
        ax.plot(table["t"], table["tv_r"], label=item.label)
    ax.set_xlabel("t")
    ax.set_ylabel("TV of total density")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return fig


_RENDERERS = {
    "density_profiles": _render_density_profiles,
    "density_overlay_by_parameter": _render_density_overlay,
    "functional_vs_p": _render_functional_vs_p,
    "tv_vs_time": _render_tv_vs_time,
}


def render(recipe: FigureRecipe, out_path) -> Path:
    """Render the recipe and write the image; returns the output path."""
    out_path = Path(out_path)
    fig = _RENDERERS[recipe.kind](recipe)
    title = recipe.options.get("title")
    if title:
        fig.suptitle(str(title))
    fig.tight_layout()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out_path.suffix == ".svg" else None
    fig.savefig(out_path, dpi=int(recipe.options.get("dpi", 150)), metadata=metadata)
    plt.close(fig)
    return out_path
