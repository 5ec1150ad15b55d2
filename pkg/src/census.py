"""
Census of nontrivial cyclotomic coefficients.

Builds the two experimental datasets:

- set A, first appearances: (c, n) where c first occurs as a coefficient of
  Φ_n, enumerated by n and then by c;
- set B, all occurrences: (c, n) for every distinct nontrivial value c of Φ_n.

Only odd squarefree radicals are ever expanded. Φ_n(x) = Φ_rad(n)(x^(n/rad(n)))
leaves the value set unchanged, and Φ_2m(x) = Φ_m(-x) for odd m turns an even
radical into a sign twist of its odd half.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, partial
from multiprocessing import Pool

from tqdm import tqdm

from coeff_engine import phi_poly, phi_poly_series, phi_poly_negate_odd
from errors import CoefficientOverflowError
from numthy import radical

logger = logging.getLogger(__name__)

DEFAULT_N_LIMIT = 500000
DEFAULT_CHUNK_SIZE = 500
# Large enough that Φ_2m reuses the expansion of Φ_m across a 500000 scan
RADICAL_CACHE_SIZE = 1 << 18


@dataclass(frozen=True, order=True)
class FirstAppearanceRecord:
    """One point of A: c first occurs in Φ_n, at position ordinal."""

    ordinal: int
    c: int
    n: int

    def __post_init__(self):
        if abs(self.c) < 2:
            raise ValueError(f"{self.c} is a trivial coefficient")


@dataclass(frozen=True)
class CensusRow:
    """Distinct nontrivial coefficient values of Φ_n, ascending."""

    n: int
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError(f"census row for n={self.n} has no values")
        if any(abs(v) < 2 for v in self.values):
            raise ValueError(f"census row for n={self.n} holds trivial values")
        if list(self.values) != sorted(set(self.values)):
            raise ValueError(f"census row for n={self.n} is not strictly ascending")


@dataclass(frozen=True)
class FirstAppearanceScan:
    """Result of a first-appearance scan; complete is False if n_limit cut it short."""

    records: tuple
    complete: bool
    scanned_through: int


@dataclass(frozen=True)
class PointSet:
    """Finite set of lattice points (c, n) in the coefficient-index plane."""

    points: frozenset
    n_bound: int = None

    def __post_init__(self):
        if self.n_bound is not None:
            outside = [p for p in self.points if not 1 <= p[1] <= self.n_bound]
            if outside:
                raise ValueError(f"points {sorted(outside)[:3]} exceed n <= {self.n_bound}")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points, key=lambda p: (p[1], p[0])))

    def __contains__(self, point):
        return point in self.points


@lru_cache(maxsize=RADICAL_CACHE_SIZE)
def _odd_radical_values(m, overflow):
    """Nontrivial values of Φ_m and of Φ_2m for odd squarefree m > 1."""
    vec = phi_poly_series(m, overflow=overflow)
    return tuple(vec.nontrivial_values()), tuple(phi_poly_negate_odd(vec).nontrivial_values())


def nontrivial_values(n, overflow="escalate"):
    """
    Distinct nontrivial coefficient values of Φ_n, ascending.

    Args:
        n (int): Positive index.
        overflow (str): Series engine overflow policy.

    Returns:
        tuple: Values with |c| >= 2.

    Raises:
        CoefficientOverflowError: Naming n, if the engine overflows.
    """
    rad = radical(n)
    # Φ_1 and Φ_{2^k} have coefficients in {-1, 0, 1}
    if rad <= 2:
        return ()
    try:
        if rad % 2:
            return _odd_radical_values(rad, overflow)[0]
        return _odd_radical_values(rad // 2, overflow)[1]
    except CoefficientOverflowError as exc:
        raise CoefficientOverflowError(n, f"via radical {exc.n}") from exc


def _scan_chunk(bounds, overflow="escalate"):
    """Worker body: census rows for lo <= n <= hi."""
    lo, hi = bounds
    rows = []
    for n in range(lo, hi + 1):
        values = nontrivial_values(n, overflow)
        if values:
            rows.append(CensusRow(n, values))
    return hi, rows


class CensusScanner:
    """Ordered, optionally parallel scanning of consecutive indices."""

    def __init__(self, workers=1, chunk_size=DEFAULT_CHUNK_SIZE, overflow="escalate",
                 progress=False):
        """
        Initialize the scanner.

        Args:
            workers (int): Worker processes; 1 scans in-process.
            chunk_size (int): Consecutive indices handed to a worker at once.
            overflow (str): Series engine overflow policy.
            progress (bool): Show a tqdm progress bar.
        """
        if workers < 1 or chunk_size < 1:
            raise ValueError("workers and chunk_size must be positive")
        self.workers = workers
        self.chunk_size = chunk_size
        self.overflow = overflow
        self.progress = progress

    def iter_chunks(self, start, stop):
        """
        Yield (hi, rows) per chunk of [start, stop] in ascending order.

        The pool's ordered imap is the single merger, so the output does not
        depend on the worker count. Abandoning the generator terminates the pool.
        """
        chunks = [(lo, min(lo + self.chunk_size - 1, stop))
                  for lo in range(start, stop + 1, self.chunk_size)]
        if not chunks:
            return
        worker = partial(_scan_chunk, overflow=self.overflow)
        with tqdm(total=max(0, stop - start + 1), unit="n", desc="Scanning",
                  disable=not self.progress) as bar:
            if self.workers == 1:
                for chunk in chunks:
                    hi, rows = worker(chunk)
                    bar.update(chunk[1] - chunk[0] + 1)
                    yield hi, rows
                return
            with Pool(processes=self.workers) as pool:
                for chunk, (hi, rows) in zip(chunks, pool.imap(worker, chunks)):
                    bar.update(chunk[1] - chunk[0] + 1)
                    yield hi, rows

    def scan_census(self, n_limit, start=1):
        """
        Census rows for start <= n <= n_limit.

        Args:
            n_limit (int): Upper bound of the scan.
            start (int): First index, greater than 1 when resuming.

        Returns:
            list: CensusRow objects sorted by n; rows without values are omitted.
        """
        if n_limit < 1 or start < 1:
            raise ValueError(f"scan bounds must be positive, got start={start}, n_limit={n_limit}")
        logger.info(f"Scanning census for {start} <= n <= {n_limit} with {self.workers} worker(s)")
        rows = []
        for hi, chunk_rows in self.iter_chunks(start, n_limit):
            rows.extend(chunk_rows)
            logger.debug(f"Census through n={hi}: {len(rows)} rows")
        logger.info(f"Census found {len(rows)} indices with nontrivial coefficients")
        return rows

    def scan_first_appearances(self, k, n_limit):
        """
        The first k points of A, or as many as exist below n_limit.

        Args:
            k (int): Number of records wanted.
            n_limit (int): Largest index to examine.

        Returns:
            FirstAppearanceScan: complete is False if n_limit was reached first.
        """
        if k < 1 or n_limit < 1:
            raise ValueError(f"k and n_limit must be positive, got k={k}, n_limit={n_limit}")
        seen = set()
        records = []
        scanned_through = 0
        chunks = self.iter_chunks(1, n_limit)
        try:
            for hi, rows in chunks:
                for row in rows:
                    for c in row.values:
                        if c in seen:
                            continue
                        seen.add(c)
                        records.append(FirstAppearanceRecord(len(records) + 1, c, row.n))
                        if len(records) == k:
                            logger.info(f"Found {k} first appearances by n={row.n}")
                            return FirstAppearanceScan(tuple(records), True, row.n)
                scanned_through = hi
        finally:
            chunks.close()
        logger.warning(f"Only {len(records)} of {k} first appearances occur for n <= {n_limit}")
        return FirstAppearanceScan(tuple(records), False, scanned_through)


def scan_census(n_limit, workers=1, start=1, progress=False):
    """Census rows for n <= n_limit with a default scanner."""
    return CensusScanner(workers=workers, progress=progress).scan_census(n_limit, start=start)


def scan_first_appearances(k, n_limit=DEFAULT_N_LIMIT, workers=1, progress=False):
    """First k points of A with a default scanner."""
    return CensusScanner(workers=workers, progress=progress).scan_first_appearances(k, n_limit)


def recheck_census(rows, n_limit, engine="division", progress=False):
    """
    Recompute every index directly with one engine, without shortcuts.

    Args:
        rows (list): CensusRow objects claimed for n <= n_limit.
        n_limit (int): Upper bound covered by the rows.
        engine (str): Engine name understood by coeff_engine.phi_poly.
        progress (bool): Show a tqdm progress bar.

    Returns:
        list: Indices whose recomputed values disagree with the rows.
    """
    claimed = {row.n: row.values for row in rows if row.n <= n_limit}
    mismatches = []
    for n in tqdm(range(1, n_limit + 1), unit="n", desc=f"Recheck ({engine})",
                  disable=not progress):
        direct = tuple(phi_poly(n, engine=engine).nontrivial_values())
        if claimed.get(n, ()) != direct:
            mismatches.append(n)
    if mismatches:
        logger.error(f"Recheck with {engine} disagrees at n={mismatches[:10]}")
    return mismatches


def points_of(items):
    """
    Materialize records or census rows as a PointSet.

    Args:
        items (iterable): FirstAppearanceRecord and/or CensusRow objects.

    Returns:
        PointSet: One (c, n) per record, one per distinct value per row.
    """
    points = set()
    for item in items:
        if isinstance(item, FirstAppearanceRecord):
            points.add((item.c, item.n))
        elif isinstance(item, CensusRow):
            points.update((v, item.n) for v in item.values)
        else:
            raise TypeError(f"cannot take points of {type(item).__name__}")
    return PointSet(frozenset(points))


def first_points(records, k):
    """A_k: the points of the first k records."""
    return points_of(r for r in records if r.ordinal <= k)


def census_points(rows, k):
    """B_k: the points of every row with n <= k."""
    return PointSet(points_of(row for row in rows if row.n <= k).points, n_bound=k)


def split_by_sign(s):
    """
    Partition a point set by the sign of c.

    Args:
        s (PointSet): Points with |c| >= 2.

    Returns:
        tuple: (positive, negative) PointSets.

    Raises:
        ValueError: If some point has |c| <= 1.
    """
    trivial = [p for p in s.points if abs(p[0]) <= 1]
    if trivial:
        raise ValueError(f"trivial coefficients in point set: {sorted(trivial)[:3]}")
    positive = frozenset(p for p in s.points if p[0] > 0)
    negative = frozenset(p for p in s.points if p[0] < 0)
    return PointSet(positive, s.n_bound), PointSet(negative, s.n_bound)
