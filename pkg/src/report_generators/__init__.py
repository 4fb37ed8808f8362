"""
Dataset writers and figure-data builders for the THz indoor coverage lab.
"""

from .dataset_writer import DatasetWriter, RunManifest, manifest_path
from .figures import FIGURE_IDS, FigureBuilder, FigureOptions, shape_summary

__all__ = [
    "DatasetWriter",
    "RunManifest",
    "manifest_path",
    "FIGURE_IDS",
    "FigureBuilder",
    "FigureOptions",
    "shape_summary",
]
