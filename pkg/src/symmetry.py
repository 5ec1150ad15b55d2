"""
Symmetry diagnostics for the positive and negative halves of a point set.

A point set in the (c, n) plane is split by the sign of c, the negative half
is reflected across the n-axis, and both halves are scaled into the unit
square by the rectangle enclosing the whole set. Their Hausdorff distance,
on the full clouds and after trimming the worst-matched points, measures how
far the picture is from mirror symmetric.
"""

import csv
import math
import logging
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from census import PointSet, census_points, first_points, split_by_sign
from errors import MalformedCsvError

logger = logging.getLogger(__name__)

DEFAULT_TRIM = 0.02
DISTANCE_METHODS = ("brute", "tree")
REPORT_HEADER = [
    "k", "c_k", "n_k", "count_pos", "count_neg",
    "hausdorff_full", "hausdorff_trimmed", "trim", "degenerate",
]
# Rows of the distance matrix held in memory at once by the brute-force path
_BRUTE_CHUNK = 2048


@dataclass(frozen=True)
class UnitCloud:
    """Exactly scaled points in [0, 1]^2 with the scaling that produced them."""

    points: tuple
    c_scale: int
    n_scale: int
    provenance: str = ""

    def __post_init__(self):
        if self.c_scale <= 0 or self.n_scale <= 0:
            raise ValueError("scaling factors must be positive")
        for x, y in self.points:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise ValueError(f"point ({x}, {y}) lies outside the unit square")

    def __len__(self):
        return len(self.points)

    def as_array(self):
        """Float copy of the coordinates, shape (len, 2)."""
        return np.array([(float(x), float(y)) for x, y in self.points], dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class SymmetryReport:
    """Diagnostics for one cutoff; distances are None for degenerate cutoffs."""

    k: int
    c_k: int
    n_k: int
    count_pos: int
    count_neg: int
    hausdorff_full: float
    hausdorff_trimmed: float
    trim: float
    degenerate: bool
    trimmed_ratio: float = None

    def csv_fields(self):
        def number(value):
            return "" if value is None else repr(float(value))
        return [
            str(self.k), str(self.c_k), str(self.n_k),
            str(self.count_pos), str(self.count_neg),
            number(self.hausdorff_full), number(self.hausdorff_trimmed),
            repr(float(self.trim)), "1" if self.degenerate else "0",
        ]


def reflect(s):
    """S#: the reflection {(-c, n)} across the n-axis."""
    return PointSet(frozenset((-c, n) for c, n in s.points), s.n_bound)


def bounding_rect(s):
    """
    Smallest [-c_k, c_k] x [0, n_k] containing s.

    Returns:
        tuple: (c_k, n_k) with c_k = max |c| and n_k = max n.

    Raises:
        ValueError: If s is empty.
    """
    if not len(s):
        raise ValueError("the bounding rectangle of an empty set is undefined")
    c_k = max(abs(c) for c, _ in s.points)
    n_k = max(n for _, n in s.points)
    return c_k, n_k


def scale_to_unit(s, c_scale, n_scale, provenance=""):
    """
    [c', n']S = {(c/c', n/n')} with exact rational coordinates.

    Args:
        s (PointSet): Points with 0 <= c <= c' and 0 <= n <= n'.
        c_scale (int): Positive horizontal scale c'.
        n_scale (int): Positive vertical scale n'.
        provenance (str): Label recorded on the cloud.

    Returns:
        UnitCloud: The scaled cloud.

    Raises:
        ValueError: If a point maps outside [0, 1]^2.
    """
    points = tuple(sorted((Fraction(c, c_scale), Fraction(n, n_scale)) for c, n in s.points))
    return UnitCloud(points, c_scale, n_scale, provenance)


def nearest_distances(a, b, method="tree"):
    """
    Distance from every point of a to its nearest point of b.

    Args:
        a (np.ndarray): Query points, shape (m, 2).
        b (np.ndarray): Reference points, shape (k, 2), k > 0.
        method (str): 'brute' for chunked scipy cdist, 'tree' for cKDTree.

    Returns:
        np.ndarray: Shape (m,) distances.
    """
    if method not in DISTANCE_METHODS:
        raise ValueError(f"unknown distance method {method!r}")
    if len(a) == 0:
        return np.zeros(0)
    if method == "tree":
        distances, _ = cKDTree(b).query(a, k=1)
        return np.asarray(distances, dtype=float)
    parts = [cdist(a[i:i + _BRUTE_CHUNK], b).min(axis=1) for i in range(0, len(a), _BRUTE_CHUNK)]
    return np.concatenate(parts)


def _as_points(cloud):
    if isinstance(cloud, UnitCloud):
        return cloud.as_array()
    return np.asarray(cloud, dtype=float).reshape(-1, 2)


def directed_hausdorff_distance(a, b, method="tree"):
    """sup over a of the distance to the nearest point of b."""
    a, b = _as_points(a), _as_points(b)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("directed Hausdorff distance needs nonempty clouds")
    return float(nearest_distances(a, b, method).max())


def hausdorff(a, b, method="tree"):
    """
    Hausdorff distance between two nonempty clouds.

    Args:
        a (UnitCloud or array-like): First cloud.
        b (UnitCloud or array-like): Second cloud.
        method (str): 'brute' reference or 'tree' accelerator; both agree to
            floating-point rounding.

    Returns:
        float: max of the two directed distances.

    Raises:
        ValueError: If either cloud is empty.
    """
    return max(directed_hausdorff_distance(a, b, method), directed_hausdorff_distance(b, a, method))


def trimmed_hausdorff(a, b, trim, method="tree"):
    """
    Hausdorff distance after greedily dropping worst-matched points.

    Each side may lose up to floor(trim * size) points and always keeps one.
    At every step the point with the largest nearest-neighbour distance to
    the other side is dropped, if its side still has budget; the smallest
    distance seen along the way is returned, so the result never exceeds the
    untrimmed distance.

    Args:
        a (np.ndarray): First cloud, shape (m, 2).
        b (np.ndarray): Second cloud, shape (k, 2).
        trim (float): Fraction in [0, 0.5).
        method (str): Nearest-neighbour method.

    Returns:
        float: The trimmed distance.
    """
    a, b = _as_points(a), _as_points(b)
    budget = [math.floor(trim * len(a)), math.floor(trim * len(b))]
    sides = [a, b]
    best = None
    while True:
        gaps = [nearest_distances(sides[0], sides[1], method),
                nearest_distances(sides[1], sides[0], method)]
        worst = [int(np.argmax(g)) for g in gaps]
        current = max(float(gaps[0][worst[0]]), float(gaps[1][worst[1]]))
        best = current if best is None else min(best, current)
        side = 0 if gaps[0][worst[0]] >= gaps[1][worst[1]] else 1
        # The worst point stays at least this far away until it is removed
        if budget[side] == 0 or len(sides[side]) == 1 or current == 0:
            return best
        sides[side] = np.delete(sides[side], worst[side], axis=0)
        budget[side] -= 1


def _report_for(k, s, trim, method):
    positive, negative = split_by_sign(s)
    if not len(s):
        return SymmetryReport(k, 0, 0, 0, 0, None, None, trim, True)
    c_k, n_k = bounding_rect(s)
    if not len(positive) or not len(negative):
        logger.info(f"Cutoff {k}: one sign class is empty, report flagged degenerate")
        return SymmetryReport(k, c_k, n_k, len(positive), len(negative), None, None, trim, True)
    upper = scale_to_unit(positive, c_k, n_k, provenance=f"positive half, cutoff {k}")
    mirrored = scale_to_unit(reflect(negative), c_k, n_k, provenance=f"reflected negative half, cutoff {k}")
    a, b = upper.as_array(), mirrored.as_array()
    full = hausdorff(a, b, method)
    trimmed = trimmed_hausdorff(a, b, trim, method)
    logger.debug(f"Cutoff {k}: H={full:.6f}, trimmed H={trimmed:.6f}")
    return SymmetryReport(k, c_k, n_k, len(positive), len(negative), full, trimmed, trim, False)


def symmetry_series(points_by_cutoff, trim=DEFAULT_TRIM, method="tree"):
    """
    One SymmetryReport per cutoff.

    Both halves are scaled by the rectangle of the whole set at that cutoff.
    trimmed_ratio relates each trimmed distance to that of the first
    non-degenerate cutoff.

    Args:
        points_by_cutoff (dict): Ascending cutoff -> PointSet.
        trim (float): Trim fraction in [0, 0.5).
        method (str): Nearest-neighbour method.

    Returns:
        list: SymmetryReport objects in cutoff order; cutoffs with an empty
        sign class are flagged degenerate instead of failing.
    """
    if not 0 <= trim < 0.5:
        raise ValueError(f"trim must lie in [0, 0.5), got {trim}")
    cutoffs = list(points_by_cutoff)
    if cutoffs != sorted(set(cutoffs)):
        raise ValueError(f"cutoffs must be strictly ascending, got {cutoffs}")

    reports = []
    baseline = None
    for k in cutoffs:
        report = _report_for(k, points_by_cutoff[k], trim, method)
        if not report.degenerate:
            if baseline is None:
                baseline = report.hausdorff_trimmed
            if baseline:
                report = replace(report, trimmed_ratio=report.hausdorff_trimmed / baseline)
        reports.append(report)
    return reports


def write_reports_csv(path, reports):
    """Write reports under the fixed report header."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(REPORT_HEADER) + "\n")
        for report in reports:
            f.write(",".join(report.csv_fields()) + "\n")


def read_reports_csv(path):
    """
    Read a report CSV written by write_reports_csv.

    Raises:
        MalformedCsvError: On a bad header or field, with the line number.
    """
    reports = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != REPORT_HEADER:
            raise MalformedCsvError(path, 1, f"expected header {REPORT_HEADER}, got {header!r}")
        for line_no, fields in enumerate(reader, start=2):
            if len(fields) != len(REPORT_HEADER):
                raise MalformedCsvError(path, line_no, f"expected {len(REPORT_HEADER)} fields")
            try:
                k, c_k, n_k, pos, neg = (int(x) for x in fields[:5])
                full, trimmed = (float(x) if x else None for x in fields[5:7])
                reports.append(SymmetryReport(k, c_k, n_k, pos, neg, full, trimmed,
                                              float(fields[7]), fields[8] == "1"))
            except ValueError as exc:
                raise MalformedCsvError(path, line_no, str(exc)) from None
    return reports


def compare_reports(reports, reference, tol=1e-12):
    """
    Differences between a freshly computed series and a pinned one.

    Args:
        reports (list): Computed SymmetryReport objects.
        reference (list): Pinned SymmetryReport objects.
        tol (float): Relative tolerance for the distances.

    Returns:
        list: Human-readable descriptions of every mismatch; empty if equal.
    """
    problems = []
    if [r.k for r in reports] != [r.k for r in reference]:
        return [f"cutoffs differ: {[r.k for r in reports]} vs {[r.k for r in reference]}"]
    for got, want in zip(reports, reference):
        for name in ("c_k", "n_k", "count_pos", "count_neg", "degenerate"):
            if getattr(got, name) != getattr(want, name):
                problems.append(f"k={got.k}: {name} {getattr(got, name)} != {getattr(want, name)}")
        for name in ("hausdorff_full", "hausdorff_trimmed"):
            x, y = getattr(got, name), getattr(want, name)
            if (x is None) != (y is None) or (x is not None and not math.isclose(x, y, rel_tol=tol, abs_tol=tol)):
                problems.append(f"k={got.k}: {name} {x} != {y}")
    return problems


class SymmetryAnalyzer:
    """Builds A_k / B_k series from census data and analyzes them."""

    def __init__(self, trim=DEFAULT_TRIM, method="tree"):
        """
        Initialize the analyzer.

        Args:
            trim (float): Trim fraction in [0, 0.5).
            method (str): Nearest-neighbour method.
        """
        self.trim = trim
        self.method = method

    def first_series(self, records, cutoffs):
        """Series over A_k, k counting records."""
        return symmetry_series({k: first_points(records, k) for k in cutoffs}, self.trim, self.method)

    def census_series(self, rows, cutoffs):
        """Series over B_k, k bounding the index n."""
        return symmetry_series({k: census_points(rows, k) for k in cutoffs}, self.trim, self.method)
