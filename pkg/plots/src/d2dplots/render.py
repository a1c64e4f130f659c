"""Aggregate sweep CSVs and render one line-with-band figure per spec.

Rendering is a pure view of the CSV: per (series, x) mean and standard
deviation, nothing else. Output is deterministic for identical input files
(fixed SVG hash salt, no date metadata).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reader import read_sweep_csv  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "d2dplots"


@dataclass(frozen=True)
class FigureSpec:
    name: str
    csv: str                      # path relative to the data directory
    x_field: str = "axis_value"
    y_field: str = "sum_throughput_bps"
    series_field: str = "policy"
    xlabel: str = ""
    ylabel: str = "sum throughput (bits/s)"
    title: str = ""
    output: str = ""              # stem; defaults to the figure name

    def output_stem(self) -> str:
        return self.output or self.name


def load_figure_specs(path: str) -> list[FigureSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    return [FigureSpec(**entry) for entry in entries]


@dataclass
class SeriesStats:
    x: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    @property
    def argmax_x(self) -> float:
        return float(self.x[int(np.argmax(self.mean))])


@dataclass
class RenderResult:
    png_path: str
    svg_path: str
    series: dict = field(default_factory=dict)  # series name -> SeriesStats

    def argmax_x(self, series_name: str) -> float:
        return self.series[series_name].argmax_x


def aggregate(columns: dict, spec: FigureSpec) -> dict:
    for name in (spec.x_field, spec.y_field, spec.series_field):
        if name not in columns:
            raise ValueError(f"column {name!r} not in CSV header "
                             f"{sorted(columns)}")
    series = {}
    for s, x, y in zip(columns[spec.series_field], columns[spec.x_field],
                       columns[spec.y_field]):
        series.setdefault(s, {}).setdefault(x, []).append(y)
    out = {}
    for s, buckets in series.items():
        xs = np.array(sorted(buckets))
        mean = np.array([np.mean(buckets[x]) for x in xs])
        std = np.array([np.std(buckets[x]) for x in xs])
        out[s] = SeriesStats(xs, mean, std)
    return out


def render(spec: FigureSpec, data_dir: str, out_dir: str) -> RenderResult:
    """Render one figure (PNG and SVG) from its sweep CSV."""
    columns = read_sweep_csv(os.path.join(data_dir, spec.csv))
    series = aggregate(columns, spec)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(series):
        stats = series[name]
        line, = ax.plot(stats.x, stats.mean, marker="o", label=name)
        ax.fill_between(stats.x, stats.mean - stats.std, stats.mean + stats.std,
                        alpha=0.2, color=line.get_color())
    ax.set_xlabel(spec.xlabel or spec.x_field)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()

    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, spec.output_stem())
    png_path, svg_path = stem + ".png", stem + ".svg"
    fig.savefig(png_path)
    fig.savefig(svg_path, metadata={"Date": None})
    plt.close(fig)
    return RenderResult(png_path, svg_path, series)


def render_all(specs: list[FigureSpec], data_dir: str, out_dir: str) -> dict:
    return {spec.name: render(spec, data_dir, out_dir) for spec in specs}
