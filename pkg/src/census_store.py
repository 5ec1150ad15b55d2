"""
CSV persistence for the census datasets.

Set B is stored one row per (n, c) pair under the header ``n,c``; set A
under ``ordinal,c,n``. A census CSV has a sidecar manifest recording the
highest fully scanned n, the engine version and a checksum of the data rows,
which is what makes an interrupted or extended scan resumable.
"""

import csv
import os
import hashlib
import logging
from dataclasses import dataclass
from itertools import groupby

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from census import CensusRow, FirstAppearanceRecord
from coeff_engine import ENGINE_VERSION
from errors import MalformedCsvError, ManifestMismatchError
from utils import format_file_size, setup_directories

logger = logging.getLogger(__name__)

CENSUS_HEADER = ["n", "c"]
FIRST_HEADER = ["ordinal", "c", "n"]
MANIFEST_SUFFIX = ".manifest"


@retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=0.2, min=0.2, max=2),
    retry=retry_if_exception_type(PermissionError),
    reraise=True,
)
def _replace(source, destination):
    """Atomically move source over destination."""
    os.replace(source, destination)


def _write_atomically(path, lines):
    setup_directories(os.path.dirname(path))
    temporary = f"{path}.tmp"
    with open(temporary, "w", encoding="utf-8", newline="") as f:
        f.writelines(lines)
    _replace(temporary, path)


def _parse_int(path, line_no, text, column):
    try:
        return int(text)
    except ValueError:
        raise MalformedCsvError(path, line_no, f"column {column!r} is not an integer: {text!r}") from None


def detect_kind(path):
    """
    Identify a CSV by its header.

    Args:
        path (str): CSV file.

    Returns:
        str: 'census' for ``n,c`` or 'first' for ``ordinal,c,n``.

    Raises:
        MalformedCsvError: For any other header.
    """
    with open(path, encoding="utf-8", newline="") as f:
        header = next(csv.reader(f), None)
    if header == CENSUS_HEADER:
        return "census"
    if header == FIRST_HEADER:
        return "first"
    raise MalformedCsvError(path, 1, f"unrecognized header {header!r}")


def census_lines(rows):
    """Data lines for census rows, sorted by (n, c)."""
    for row in sorted(rows, key=lambda r: r.n):
        for value in row.values:
            yield f"{row.n},{value}\n"


def write_census_csv(path, rows):
    """Write census rows as ``n,c`` lines."""
    _write_atomically(path, [",".join(CENSUS_HEADER) + "\n", *census_lines(rows)])


def read_census_csv(path):
    """
    Read a ``n,c`` CSV back into census rows.

    Args:
        path (str): CSV file.

    Returns:
        list: CensusRow objects in file order.

    Raises:
        MalformedCsvError: On a bad header, bad integer, trivial value or
            ordering violation, with the offending line number.
    """
    pairs = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CENSUS_HEADER:
            raise MalformedCsvError(path, 1, f"expected header {CENSUS_HEADER}, got {header!r}")
        previous = None
        for line_no, fields in enumerate(reader, start=2):
            if len(fields) != 2:
                raise MalformedCsvError(path, line_no, f"expected 2 fields, got {len(fields)}")
            n = _parse_int(path, line_no, fields[0], "n")
            c = _parse_int(path, line_no, fields[1], "c")
            if n < 1:
                raise MalformedCsvError(path, line_no, f"index must be positive, got {n}")
            if abs(c) < 2:
                raise MalformedCsvError(path, line_no, f"{c} is not a nontrivial coefficient")
            if previous is not None and (n, c) <= previous:
                raise MalformedCsvError(path, line_no, "rows are not strictly sorted by (n, c)")
            previous = (n, c)
            pairs.append((n, c))
    return [CensusRow(n, tuple(c for _, c in group)) for n, group in groupby(pairs, key=lambda p: p[0])]


def write_first_csv(path, records):
    """Write first-appearance records as ``ordinal,c,n`` lines."""
    lines = [",".join(FIRST_HEADER) + "\n"]
    lines += [f"{r.ordinal},{r.c},{r.n}\n" for r in sorted(records)]
    _write_atomically(path, lines)


def read_first_csv(path):
    """
    Read an ``ordinal,c,n`` CSV back into records.

    Raises:
        MalformedCsvError: On a bad header, bad integer, or ordinals that do
            not run 1, 2, 3, ... with the line number.
    """
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != FIRST_HEADER:
            raise MalformedCsvError(path, 1, f"expected header {FIRST_HEADER}, got {header!r}")
        for line_no, fields in enumerate(reader, start=2):
            if len(fields) != 3:
                raise MalformedCsvError(path, line_no, f"expected 3 fields, got {len(fields)}")
            ordinal, c, n = (_parse_int(path, line_no, text, name)
                             for text, name in zip(fields, FIRST_HEADER))
            if ordinal != len(records) + 1:
                raise MalformedCsvError(path, line_no, f"expected ordinal {len(records) + 1}, got {ordinal}")
            try:
                records.append(FirstAppearanceRecord(ordinal, c, n))
            except ValueError as exc:
                raise MalformedCsvError(path, line_no, str(exc)) from None
    return records


def rows_checksum(path):
    """SHA-256 of a CSV's data lines (everything after the header)."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        f.readline()
        for line in f:
            digest.update(line)
    return digest.hexdigest()


@dataclass(frozen=True)
class Manifest:
    """Sidecar state of a census CSV."""

    scanned_through: int
    engine: str
    checksum: str

    def lines(self):
        return [
            f"scanned_through={self.scanned_through}\n",
            f"engine={self.engine}\n",
            f"checksum={self.checksum}\n",
        ]


class CensusStore:
    """A census CSV plus its resume manifest."""

    def __init__(self, csv_path):
        self.csv_path = str(csv_path)
        self.manifest_path = self.csv_path + MANIFEST_SUFFIX

    def exists(self):
        return os.path.exists(self.csv_path)

    def read_manifest(self):
        """
        Load and validate the manifest against the CSV and the running engine.

        Returns:
            Manifest: The validated manifest.

        Raises:
            ManifestMismatchError: If the manifest is missing or unreadable,
                names another engine version, or its checksum does not match.
        """
        if not os.path.exists(self.manifest_path):
            raise ManifestMismatchError(f"no manifest next to {self.csv_path}")
        entries = {}
        with open(self.manifest_path, encoding="utf-8") as f:
            for line in f:
                key, sep, value = line.strip().partition("=")
                if sep:
                    entries[key] = value
        try:
            manifest = Manifest(int(entries["scanned_through"]), entries["engine"], entries["checksum"])
        except (KeyError, ValueError) as exc:
            raise ManifestMismatchError(f"unreadable manifest {self.manifest_path}: {exc}") from None
        if manifest.engine != ENGINE_VERSION:
            raise ManifestMismatchError(
                f"{self.csv_path} was built by {manifest.engine}, this is {ENGINE_VERSION}"
            )
        if manifest.checksum != rows_checksum(self.csv_path):
            raise ManifestMismatchError(f"{self.csv_path} does not match its manifest checksum")
        return manifest

    def resume_point(self):
        """First index still to scan: 1 for a fresh store."""
        if not self.exists():
            return 1
        return self.read_manifest().scanned_through + 1

    def save(self, rows, scanned_through, append=False):
        """
        Write (or extend) the census CSV and refresh the manifest.

        Args:
            rows (list): CensusRow objects to write; when appending they must
                all lie above the previously scanned range.
            scanned_through (int): Highest index the CSV now fully covers.
            append (bool): Extend the existing CSV instead of replacing it.
        """
        if append and self.exists():
            # The old file stays untouched until the extended copy replaces it
            with open(self.csv_path, encoding="utf-8", newline="") as f:
                kept = f.readlines()
            _write_atomically(self.csv_path, [*kept, *census_lines(rows)])
        else:
            write_census_csv(self.csv_path, rows)
        manifest = Manifest(scanned_through, ENGINE_VERSION, rows_checksum(self.csv_path))
        _write_atomically(self.manifest_path, manifest.lines())
        size = format_file_size(os.path.getsize(self.csv_path))
        logger.info(f"Saved census through n={scanned_through} to {self.csv_path} ({size})")
        return manifest

    def load_rows(self):
        return read_census_csv(self.csv_path)
