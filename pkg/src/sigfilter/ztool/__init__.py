from .figures import Histogram, emit_figure, fmt, histogram, to_csv, to_svg, write_zrecords_csv
from .ingest import CiRecord, IngestConfig, IngestResult, ZRecord, ci_to_z, ingest_csv, z_to_ci

__all__ = [
    "CiRecord", "Histogram", "IngestConfig", "IngestResult", "ZRecord", "ci_to_z",
    "emit_figure", "fmt", "histogram", "ingest_csv", "to_csv", "to_svg",
    "write_zrecords_csv", "z_to_ci",
]
