"""Artifact emission: deterministic CSV/JSON tables and SVG figures."""

from .svg import curves_svg, heatmap_svg
from .tables import (
    CORPUS_ROW_ID,
    content_hash_bytes,
    content_hash_file,
    matrix_csv,
    matrix_json,
    report_csv,
    report_json,
)

__all__ = [
    "CORPUS_ROW_ID",
    "content_hash_bytes",
    "content_hash_file",
    "matrix_csv",
    "matrix_json",
    "report_csv",
    "report_json",
    "curves_svg",
    "heatmap_svg",
]
