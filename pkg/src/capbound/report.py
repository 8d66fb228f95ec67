"""Report rendering: delimited exports plus matplotlib figures on disk.

This is the one place that draws. The data subcommands stay plot-free; the
``report`` subcommand calls into here to produce a small bundle of CSV/JSON
artifacts with a PNG next to each.
"""
from __future__ import annotations

import os
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import region_geometry as rg
from .gaussian_engine import GaussianParams, closed_form_bounds
from .gdof_analyzer import (
    GdofParams,
    RegimeLabel,
    RegimePoint,
    gdof_region,
    regime_map,
    regime_map_csv,
    regime_map_summary,
)
from .util import json_dumps, write_text_atomic

_LABEL_COLORS = {
    RegimeLabel.BOTH_ACTIVE: "#d1605e",
    RegimeLabel.ONLY_R1_PLUS_2R2_ACTIVE: "#5778a4",
    RegimeLabel.OUT_OF_SCOPE: "#cccccc",
}


def region_figure(hs: rg.HalfspaceSet, poly: rg.RatePolytope, path: str, title: str,
                  xlabel: str = "R1 [bits]", ylabel: str = "R2 [bits]") -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    if len(poly.vertices) >= 3:
        ring = list(poly.vertices) + [poly.vertices[0]]
        xs, ys = zip(*ring)
        ax.fill(xs, ys, alpha=0.25, color="#5778a4")
        ax.plot(xs, ys, color="#5778a4", lw=1.5)
    lim_x = max((v[0] for v in poly.vertices), default=1.0) * 1.15 + 1e-9
    lim_y = max((v[1] for v in poly.vertices), default=1.0) * 1.15 + 1e-9
    for k, (a1, a2, b) in enumerate(hs.constraints):
        label = hs.label(k)
        if a2 == 0.0:
            ax.axvline(b / a1, lw=0.6, ls=":", color="gray")
            ax.annotate(label, (b / a1, lim_y * 0.02), fontsize=6, rotation=90)
        else:
            xs = np.array([0.0, lim_x])
            ax.plot(xs, (b - a1 * xs) / a2, lw=0.6, ls=":", color="gray")
            y0 = min(max(b / a2, 0.0), lim_y * 0.97)
            ax.annotate(label, (lim_x * 0.01, y0), fontsize=6)
    ax.set_xlim(0.0, lim_x)
    ax.set_ylim(0.0, lim_y)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def regime_map_figure(rows: Sequence[RegimePoint], path: str) -> None:
    alphas = sorted({r.alpha for r in rows})
    betas = sorted({r.beta for r in rows})
    ai = {a: k for k, a in enumerate(alphas)}
    bi = {b: k for k, b in enumerate(betas)}
    img = np.zeros((len(betas), len(alphas), 3))
    hatch = np.zeros((len(betas), len(alphas)), dtype=bool)
    for r in rows:
        color = _LABEL_COLORS.get(r.label, "#cccccc")
        rgb = tuple(int(color[i : i + 2], 16) / 255.0 for i in (1, 3, 5))
        img[bi[r.beta], ai[r.alpha]] = rgb
        hatch[bi[r.beta], ai[r.alpha]] = r.classical
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    ax.imshow(
        img,
        origin="lower",
        extent=(min(alphas), max(alphas), min(betas), max(betas)),
        aspect="auto",
        interpolation="nearest",
    )
    ys, xs = np.nonzero(hatch)
    if len(xs):
        ax.plot(
            [alphas[x] for x in xs],
            [betas[y] for y in ys],
            ".",
            color="black",
            ms=1.0,
            alpha=0.5,
        )
    ax.set_xlabel("interference exponent alpha")
    ax.set_ylabel("cooperation exponent beta")
    ax.set_title("active weighted bounds (dots: classical-equivalent region)", fontsize=9)
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=_LABEL_COLORS[RegimeLabel.BOTH_ACTIVE]),
        plt.Rectangle((0, 0), 1, 1, color=_LABEL_COLORS[RegimeLabel.ONLY_R1_PLUS_2R2_ACTIVE]),
    ]
    ax.legend(handles, ["both active", "only R1+2R2 active"], fontsize=7, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(
    params: GaussianParams,
    out_dir: str,
    gdof_params: Optional[GdofParams] = None,
    map_steps: int = 49,
    raw: bool = False,
) -> list[str]:
    """Produce the report bundle; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    def emit(name: str, text: str) -> None:
        path = os.path.join(out_dir, name)
        write_text_atomic(path, text)
        written.append(path)

    bs = closed_form_bounds(params)
    hs = rg.from_bound_set(bs)
    poly = rg.vertices(hs)
    doc = {
        "params": {
            "s1": params.s1, "s2": params.s2, "i1": params.i1,
            "i2": params.i2, "c": params.c,
            "theta1": params.theta1, "theta2": params.theta2,
        },
        "bounds": bs.as_dict(),
        "region": rg.polytope_json_obj(hs, poly),
    }
    emit("bounds.json", json_dumps(doc, raw))
    emit("region_vertices.csv", rg.vertices_csv(poly, raw))
    fig_path = os.path.join(out_dir, "region.png")
    region_figure(hs, poly, fig_path, "closed-form outer bound region")
    written.append(fig_path)

    if gdof_params is not None:
        g_hs = gdof_region(gdof_params)
        g_poly = rg.vertices(g_hs)
        emit("gdof_region.json", json_dumps(rg.polytope_json_obj(g_hs, g_poly), raw))
        emit("gdof_vertices.csv", rg.vertices_csv(g_poly, raw))
        g_fig = os.path.join(out_dir, "gdof_region.png")
        region_figure(
            g_hs, g_poly, g_fig,
            f"gDoF region at alpha={gdof_params.alpha:g}, beta={gdof_params.beta:g}",
            xlabel="d1", ylabel="d2",
        )
        written.append(g_fig)

    if map_steps > 0:
        grid = [k / (map_steps + 1) for k in range(1, map_steps + 1)]
        rows = regime_map(grid, grid)
        emit("regime_map.csv", regime_map_csv(rows, raw))
        emit("regime_map_summary.json", json_dumps(regime_map_summary(rows), raw))
        map_fig = os.path.join(out_dir, "regime_map.png")
        regime_map_figure(rows, map_fig)
        written.append(map_fig)
    return written
