"""Figure rendering for emitted data.

Turns histogram CSVs, limit-law grids, and experiment records into PNG
figures saved next to the delimited output.  Everything here consumes
the already-persisted files; nothing in the computational paths depends
on this module.
"""
from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError
from .limit_laws import DensityGrid, semicircle_grid


def read_histogram_csv(path):
    lefts, rights, counts, densities = [], [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            lefts.append(float(row["bin_left"]))
            rights.append(float(row["bin_right"]))
            counts.append(int(row["count"]))
            densities.append(float(row["density"]))
    if not lefts:
        raise ConfigError(f"histogram file {path} is empty")
    return (np.asarray(lefts), np.asarray(rights),
            np.asarray(counts), np.asarray(densities))


def render_histogram(hist_csv, out_png, overlay: DensityGrid = None,
                     title: str = "") -> str:
    """Bar plot of an ESD histogram with an optional limit-law overlay."""
    lefts, rights, _, densities = read_histogram_csv(hist_csv)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(lefts, densities, width=rights - lefts, align="edge",
           color="#7fb3d5", edgecolor="white", linewidth=0.3,
           label="empirical")
    if overlay is not None:
        lo, hi = lefts[0] - 0.5, rights[-1] + 0.5
        mask = (overlay.x >= lo) & (overlay.x <= hi)
        ax.plot(overlay.x[mask], overlay.pdf[mask], "k-", linewidth=1.4,
                label="limit law")
        ax.legend(frameon=False)
    ax.set_xlabel("normalized eigenvalue")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_grid(grid_csv, out_png, title: str = "") -> str:
    """Density and CDF curves of a limit-law grid CSV."""
    grid = DensityGrid.from_csv(grid_csv)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(grid.x, grid.pdf, "-", color="#1f618d")
    ax1.set_xlabel("x")
    ax1.set_ylabel("pdf")
    ax2.plot(grid.x, grid.cdf, "-", color="#1f618d")
    ax2.set_xlabel("x")
    ax2.set_ylabel("cdf")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png


def render_record(record_path, out_dir) -> list:
    """One trend figure per statistic in an experiment record: median
    against n with the interquartile band."""
    with open(record_path) as fh:
        record = json.load(fh)
    os.makedirs(out_dir, exist_ok=True)
    by_stat = {}
    for row in record["rows"]:
        by_stat.setdefault(row["statistic"], {}).setdefault(row["n"], []).append(
            row["value"])
    written = []
    for stat, by_n in sorted(by_stat.items()):
        ns = sorted(by_n)
        med = [float(np.median(by_n[n])) for n in ns]
        q1 = [float(np.percentile(by_n[n], 25)) for n in ns]
        q3 = [float(np.percentile(by_n[n], 75)) for n in ns]
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.fill_between(ns, q1, q3, alpha=0.25, color="#7fb3d5",
                        label="interquartile range")
        ax.plot(ns, med, "o-", color="#1f618d", label="median")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel(stat)
        ax.set_title(record["config"]["name"])
        ax.legend(frameon=False)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{record['config']['name']}_{stat}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def overlay_for(name: str) -> DensityGrid:
    """The limit-law grid matching an experiment / normalization name."""
    if name in ("semicircle", "thm3_semicircle", "cor2_dilute", "adjacency"):
        return semicircle_grid()
    if name in ("semicircle-normal", "thm2_gamma_m", "laplacian"):
        from .lab import default_limit_grid
        return default_limit_grid()
    raise ConfigError(f"no limit-law overlay named {name!r}")
