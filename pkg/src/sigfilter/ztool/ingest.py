"""Confidence intervals to z-values.

A Wald interval estimate +/- q se at level L has q = z_{(1+L)/2}, so
se = (upper - lower) / (2 q) and z = estimate / se.  Ratio measures (odds,
hazard, risk ratios) are log-transformed first.  When no estimate is given
the interval midpoint is used and the record is flagged.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DomainError
from ..normal_core import std_normal_quantile

log = logging.getLogger(__name__)

SCALES = ("linear", "ratio")


@dataclass(frozen=True)
class CiRecord:
    lower: float
    upper: float
    estimate: float | None = None
    scale: str = "linear"
    level: float = 0.95
    source_id: str = ""

    def __post_init__(self):
        if self.scale not in SCALES:
            raise DomainError(f"unknown scale {self.scale!r}", code="bad_scale")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level}", code="bad_level")
        for name in ("lower", "upper"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} bound is not finite", code="nonfinite")
        if self.estimate is not None and not math.isfinite(self.estimate):
            raise DomainError("estimate is not finite", code="nonfinite")
        if self.scale == "ratio" and (self.lower <= 0 or (self.estimate is not None and self.estimate <= 0)):
            raise DomainError("nonpositive ratio bound", code="nonpositive_ratio")
        if self.upper == self.lower:
            raise DomainError("zero-width interval", code="zero_width")
        if self.upper < self.lower:
            raise DomainError("upper bound below lower bound", code="reversed_bounds")


@dataclass(frozen=True)
class ZRecord:
    z: float
    source_id: str = ""
    from_midpoint: bool = False
    abs_z: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "abs_z", abs(self.z))


def ci_to_z(rec: CiRecord) -> ZRecord:
    lo, hi, est = rec.lower, rec.upper, rec.estimate
    if rec.scale == "ratio":
        lo, hi = math.log(lo), math.log(hi)
        est = math.log(est) if est is not None else None
    q = std_normal_quantile(0.5 + rec.level / 2.0)
    se = (hi - lo) / (2.0 * q)
    from_midpoint = est is None
    if from_midpoint:
        est = 0.5 * (lo + hi)
    elif not lo <= est <= hi:
        log.warning("estimate %s lies outside [%s, %s] for record %r",
                    rec.estimate, rec.lower, rec.upper, rec.source_id)
    return ZRecord(z=est / se, source_id=rec.source_id, from_midpoint=from_midpoint)


def z_to_ci(z, se, level=0.95, scale="linear", source_id=""):
    """Build the Wald interval whose z-value is ``z``; inverse of :func:`ci_to_z`."""
    q = std_normal_quantile(0.5 + level / 2.0)
    est = z * se
    lo, hi = est - q * se, est + q * se
    if scale == "ratio":
        est, lo, hi = math.exp(est), math.exp(lo), math.exp(hi)
    return CiRecord(lower=lo, upper=hi, estimate=est, scale=scale, level=level,
                    source_id=source_id)


@dataclass
class IngestConfig:
    """Column names and defaults for :func:`ingest_csv`.

    ``estimate``, ``id``, ``scale_column`` and ``level_column`` are optional
    columns; when a per-row scale or level column is present and the cell is
    nonempty it overrides the default.
    """

    lower: str = "lower"
    upper: str = "upper"
    estimate: str | None = "estimate"
    id: str | None = "id"
    scale_column: str | None = "scale"
    level_column: str | None = "level"
    scale: str = "linear"
    level: float = 0.95
    delimiter: str = ","
    min_abs_z: float | None = None
    max_abs_z: float | None = None


@dataclass
class IngestResult:
    records: list
    rejects: list  # (line number, reason)
    filtered: int = 0


def _cell(row, col):
    if col is None or col not in row:
        return ""
    v = row[col]
    return "" if v is None else v.strip()


def _number(text, what):
    try:
        x = float(text)
    except ValueError:
        raise DomainError(f"unparseable {what} {text!r}", code="unparseable") from None
    if not math.isfinite(x):
        raise DomainError(f"nonfinite {what} {text!r}", code="nonfinite")
    return x


def ingest_csv(path, config: IngestConfig | None = None) -> IngestResult:
    """Read a CSV of confidence intervals into z-values.

    Line numbers in ``rejects`` count the header as line 1.  Missing
    required columns raise :class:`DomainError`; anything wrong with a
    single row rejects that row only.
    """
    cfg = config or IngestConfig()
    if cfg.scale not in SCALES:
        raise DomainError(f"unknown scale {cfg.scale!r}", code="bad_scale")
    records, rejects, filtered = [], [], 0
    with open(Path(path), newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.DictReader(fh, delimiter=cfg.delimiter)
        header = reader.fieldnames or []
        missing = [c for c in (cfg.lower, cfg.upper) if c not in header]
        if missing:
            raise DomainError(f"missing column(s): {', '.join(missing)}", code="config")
        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                rejects.append((reader.line_num, f"malformed csv: {exc}"))
                continue
            line = reader.line_num
            try:
                if None in row:
                    raise DomainError("too many fields", code="shape")
                est_text = _cell(row, cfg.estimate)
                scale = _cell(row, cfg.scale_column) or cfg.scale
                level_text = _cell(row, cfg.level_column)
                rec = CiRecord(
                    lower=_number(_cell(row, cfg.lower), "lower bound"),
                    upper=_number(_cell(row, cfg.upper), "upper bound"),
                    estimate=_number(est_text, "estimate") if est_text else None,
                    scale=scale,
                    level=_number(level_text, "level") if level_text else cfg.level,
                    source_id=_cell(row, cfg.id) or f"line{line}",
                )
                zr = ci_to_z(rec)
            except DomainError as exc:
                rejects.append((line, exc.detail))
                continue
            if ((cfg.min_abs_z is not None and zr.abs_z < cfg.min_abs_z)
                    or (cfg.max_abs_z is not None and zr.abs_z > cfg.max_abs_z)):
                filtered += 1
                continue
            records.append(zr)
    return IngestResult(records=records, rejects=rejects, filtered=filtered)
