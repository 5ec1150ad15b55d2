"""
SVG scatter plots of the census datasets.

Coefficient values run along the horizontal axis and indices along the
vertical axis, matching a reflection "across the n-axis". Output bytes are
fixed for a fixed input and matplotlib version: the SVG hash salt is
pinned, the date metadata dropped and text kept as text.
"""

import os
import logging

import matplotlib
from matplotlib.figure import Figure

from census import census_points, points_of
from census_store import CensusStore, detect_kind, read_census_csv, read_first_csv
from errors import MalformedCsvError
from utils import setup_directories

logger = logging.getLogger(__name__)

PLOT_KINDS = {"scatter-A": "first", "scatter-B": "census"}

_SVG_RC = {
    "svg.hashsalt": "cyclophi",
    "svg.fonttype": "none",
    "path.simplify": False,
}


class ScatterPlotter:
    """Renders point sets as deterministic SVG scatter plots."""

    def __init__(self, width=6.0, height=6.0, marker_size=4.0):
        """
        Initialize the plotter.

        Args:
            width (float): Figure width in inches.
            height (float): Figure height in inches.
            marker_size (float): Scatter marker area in points^2.
        """
        self.width = width
        self.height = height
        self.marker_size = marker_size

    def load(self, csv_path, kind, bound=None):
        """
        Read the points behind a scatter kind, checking the CSV matches it.

        Args:
            csv_path (str): Output of the first or census subcommand.
            kind (str): 'scatter-A' or 'scatter-B'.
            bound (int): Index bound k of B_k. Defaults to the scanned_through
                of the census manifest, or the last row's n without one.

        Returns:
            tuple: (PointSet, title).
        """
        if kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {kind!r}; choose from {', '.join(PLOT_KINDS)}")
        found = detect_kind(csv_path)
        if found != PLOT_KINDS[kind]:
            raise MalformedCsvError(csv_path, 1, f"{kind} needs a {PLOT_KINDS[kind]} CSV, got a {found} CSV")
        if kind == "scatter-A":
            if bound is not None:
                raise ValueError("an index bound only applies to scatter-B")
            records = read_first_csv(csv_path)
            return points_of(records), f"Graph of A_{len(records)}"
        rows = read_census_csv(csv_path)
        if bound is None:
            bound = self._scan_bound(csv_path, rows)
        return census_points(rows, bound), f"Graph of B_{bound}"

    @staticmethod
    def _scan_bound(csv_path, rows):
        store = CensusStore(csv_path)
        if os.path.exists(store.manifest_path):
            return store.read_manifest().scanned_through
        logger.warning(f"No manifest next to {csv_path}; titling the plot by its last index")
        return rows[-1].n if rows else 0

    def render(self, points, title, output_path):
        """
        Draw a point set and save it as SVG.

        Args:
            points (PointSet): Points (c, n); may be empty (axes only).
            title (str): Figure title.
            output_path (str): Destination .svg file.
        """
        ordered = list(points)
        cs = [c for c, _ in ordered]
        ns = [n for _, n in ordered]

        with matplotlib.rc_context(_SVG_RC):
            fig = Figure(figsize=(self.width, self.height))
            ax = fig.add_subplot()
            ax.scatter(cs, ns, s=self.marker_size, c="black", marker="o", linewidths=0)
            ax.axvline(0, color="0.6", linewidth=0.5)
            ax.set_xlabel("coefficient c")
            ax.set_ylabel("index n")
            ax.set_title(title)
            if cs:
                reach = max(abs(c) for c in cs) + 1
                ax.set_xlim(-reach, reach)
                ax.set_ylim(0, max(ns) * 1.02)
            setup_directories(os.path.dirname(output_path))
            fig.savefig(output_path, format="svg", metadata={"Date": None})

        logger.info(f"Wrote {title} ({len(ordered)} points) to {output_path}")

    def plot_csv(self, csv_path, kind, output_path, bound=None):
        """Load a census CSV and render it in one step."""
        points, title = self.load(csv_path, kind, bound)
        self.render(points, title, output_path)
        return len(points)
