"""Experiment result emission: CSV tables, JSON summaries, SVG scatter plots.

All writers are deterministic: no timestamps, fixed key ordering, fixed
float formatting. The scatter plot is hand-assembled SVG so report
generation needs no plotting dependency.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from cropmeta.experiments.pseudoreal import PseudoRealResult
from cropmeta.experiments.transfer import TransferResult


def write_transfer_csv(result: TransferResult, path: str | Path) -> None:
    """One row per seed x model x fine-tune size."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("seed,model,finetune_size,rmse,pearson_r,n\n")
        for row in result.rows:
            r = "" if row.pearson_r is None else repr(row.pearson_r)
            fh.write(f"{row.seed},{row.model},{row.finetune_size},"
                     f"{repr(row.rmse)},{r},{row.n}\n")


def write_transfer_json(result: TransferResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_pseudo_real_csv(result: PseudoRealResult, path: str | Path) -> None:
    """One row per model (x seed for the network models)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model,seed,rmse,pearson_r,bias,n\n")
        for row in result.rows:
            seed = "" if row.seed is None else str(row.seed)
            r = "" if row.pearson_r is None else repr(row.pearson_r)
            fh.write(f"{row.model},{seed},{repr(row.rmse)},{r},"
                     f"{repr(row.bias)},{row.n}\n")


def write_pseudo_real_json(result: PseudoRealResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _nice_ceiling(value: float) -> float:
    if value <= 0.0:
        return 1.0
    step = 10.0 ** np.floor(np.log10(value))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if value <= step * mult:
            return float(step * mult)
    return float(step * 10.0)


def svg_scatter(predictions, observations, path: str | Path,
                title: str = "predicted vs observed") -> None:
    """Square scatter plot with a 1:1 line, axes in fresh tonne/ha."""
    p = np.asarray(predictions, dtype=np.float64)
    o = np.asarray(observations, dtype=np.float64)
    size, margin = 480, 56
    inner = size - 2 * margin
    top = _nice_ceiling(float(max(p.max(), o.max(), 1.0)) * 1.05)

    def sx(v: float) -> float:
        return margin + inner * v / top

    def sy(v: float) -> float:
        return size - margin - inner * v / top

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{size / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect x="{margin}" y="{margin}" width="{inner}" height="{inner}" '
        f'fill="none" stroke="black" stroke-width="1"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(0):.1f}" x2="{sx(top):.1f}" y2="{sy(top):.1f}" '
        f'stroke="grey" stroke-dasharray="5,4"/>',
    ]
    n_ticks = 5
    for i in range(n_ticks + 1):
        v = top * i / n_ticks
        x, y = sx(v), sy(v)
        parts.append(f'<line x1="{x:.1f}" y1="{size - margin}" x2="{x:.1f}" '
                     f'y2="{size - margin + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{size - margin + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{v:g}</text>')
        parts.append(f'<line x1="{margin - 5}" y1="{y:.1f}" x2="{margin}" '
                     f'y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{margin - 8}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{v:g}</text>')
    parts.append(
        f'<text x="{size / 2:.1f}" y="{size - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">observed yield (t/ha)</text>')
    parts.append(
        f'<text x="16" y="{size / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {size / 2:.1f})">predicted yield (t/ha)</text>')
    for pv, ov in zip(p, o):
        parts.append(f'<circle cx="{sx(ov):.2f}" cy="{sy(pv):.2f}" r="2.5" '
                     f'fill="steelblue" fill-opacity="0.55"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
