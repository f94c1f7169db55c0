"""Histogram and curve data for the z-value and exaggeration figures.

CSV is the primary output; the SVG writer draws a bare chart with axis
labels and nothing else.  Both are byte-deterministic for fixed input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DomainError
from ..selection import ExaggerationCurve


def fmt(x) -> str:
    """Fixed 10-significant-digit formatting used for every numeric output."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".10g")


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def out_of_range(self) -> int:
        return self.total - int(self.counts.sum())


def histogram(zs, mode="signed", bin_width=0.5, value_range=(-10.0, 10.0)) -> Histogram:
    """Left-closed bins of width ``bin_width`` over ``value_range``.

    ``zs`` holds ZRecords or plain numbers.  Values outside the range count
    toward ``total`` only.  The last edge is ``hi`` even when the width does
    not divide the range evenly.
    """
    lo, hi = map(float, value_range)
    if not bin_width > 0:
        raise DomainError(f"bin_width must be positive, got {bin_width}", code="bad_bins")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got ({lo}, {hi})", code="bad_bins")
    if mode not in ("signed", "absolute"):
        raise DomainError(f"mode must be signed or absolute, got {mode!r}", code="usage")
    vals = np.array([getattr(z, "z", z) for z in zs], dtype=float)
    if mode == "absolute":
        vals = np.abs(vals)
    n_bins = int(math.ceil((hi - lo) / bin_width - 1e-9))
    edges = lo + bin_width * np.arange(n_bins + 1)
    edges[-1] = hi
    inside = vals[(vals >= lo) & (vals < hi)]
    idx = np.minimum(((inside - lo) // bin_width).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return Histogram(bin_edges=edges, counts=counts, total=len(vals))


def _rows(data):
    if isinstance(data, Histogram):
        header = ("bin_lo", "bin_hi", "count")
        rows = zip(data.bin_edges[:-1], data.bin_edges[1:], data.counts)
    elif isinstance(data, ExaggerationCurve):
        header = ("snr", "power", "exaggeration")
        rows = zip(data.snr, data.power, data.exaggeration)
    else:
        raise DomainError(f"cannot emit {type(data).__name__}", code="usage")
    return header, [tuple(fmt(v) for v in r) for r in rows]


def to_csv(data) -> str:
    header, rows = _rows(data)
    return "".join(",".join(r) + "\n" for r in [header, *rows])


def write_zrecords_csv(records, path):
    lines = ["source_id,z,abs_z,from_midpoint\n"]
    for r in records:
        sid = r.source_id
        if any(ch in sid for ch in ',"\n\r'):
            sid = '"' + sid.replace('"', '""') + '"'
        lines.append(f"{sid},{fmt(r.z)},{fmt(r.abs_z)},{fmt(r.from_midpoint)}\n")
    Path(path).write_text("".join(lines), encoding="utf-8", newline="")


_W, _H, _PAD = 640, 400, 56


def _scale(v, lo, hi, a, b):
    return a + (v - lo) / (hi - lo) * (b - a) if hi > lo else (a + b) / 2


def to_svg(data) -> str:
    if isinstance(data, Histogram):
        if data.total == 0 or data.counts.sum() == 0:
            raise DomainError("nothing to draw: histogram is empty", code="empty")
        xlabel, ylabel = "z", "count"
        y_lo = 0.0
        x0, x1 = float(data.bin_edges[0]), float(data.bin_edges[-1])
        y1 = float(data.counts.max())
        marks = []
        for lo, hi, n in zip(data.bin_edges[:-1], data.bin_edges[1:], data.counts):
            xa = _scale(lo, x0, x1, _PAD, _W - _PAD)
            xb = _scale(hi, x0, x1, _PAD, _W - _PAD)
            ya = _scale(n, 0.0, y1, _H - _PAD, _PAD)
            marks.append(f'<rect x="{xa:.2f}" y="{ya:.2f}" width="{xb - xa:.2f}" '
                         f'height="{_H - _PAD - ya:.2f}" fill="#888" stroke="#fff"/>')
    elif isinstance(data, ExaggerationCurve):
        if len(data) == 0:
            raise DomainError("nothing to draw: curve is empty", code="empty")
        xlabel, ylabel = "SNR", "exaggeration factor"
        x0, x1 = float(data.snr[0]), float(data.snr[-1])
        finite = data.exaggeration[np.isfinite(data.exaggeration)]
        y1 = float(finite.max())
        pts = " ".join(f"{_scale(x, x0, x1, _PAD, _W - _PAD):.2f},"
                       f"{_scale(min(y, y1), 1.0, y1, _H - _PAD, _PAD):.2f}"
                       for x, y in zip(data.snr, data.exaggeration))
        marks = [f'<polyline points="{pts}" fill="none" stroke="#000"/>']
        y_lo = 1.0
    else:
        raise DomainError(f"cannot emit {type(data).__name__}", code="usage")
    axes = [
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="#000"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="#000"/>',
        f'<text x="{_W / 2:.0f}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_H / 2:.0f})">{ylabel}</text>',
        f'<text x="{_PAD}" y="{_H - _PAD + 16}" text-anchor="middle">{fmt(x0)}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 16}" text-anchor="middle">{fmt(x1)}</text>',
        f'<text x="{_PAD - 4}" y="{_H - _PAD}" text-anchor="end">{fmt(y_lo)}</text>',
        f'<text x="{_PAD - 4}" y="{_PAD + 4}" text-anchor="end">{fmt(y1)}</text>',
    ]
    body = "\n".join(axes + marks)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">\n'
            f'{body}\n</svg>\n')


def emit_figure(data, fmt_name, path):
    """Write ``data`` (a Histogram or ExaggerationCurve) as csv or svg."""
    if fmt_name == "csv":
        text = to_csv(data)
    elif fmt_name == "svg":
        text = to_svg(data)
    else:
        raise DomainError(f"format must be csv or svg, got {fmt_name!r}", code="usage")
    Path(path).write_text(text, encoding="utf-8", newline="")
    return Path(path)
