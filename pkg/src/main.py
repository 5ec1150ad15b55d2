#!/usr/bin/env python3
"""
Command-line entry point for the cyclophi toolkit.

Subcommands:
    coeffs     coefficients of one cyclotomic polynomial
    sigma      leading coefficients from Newton's identities
    verify     check which coefficients Φ_2n is guaranteed to have
    census     all nontrivial coefficients for n <= N (set B)
    first      first appearances of nontrivial coefficients (set A)
    plot       SVG scatter plot of a census CSV
    symmetry   Hausdorff symmetry diagnostics of a census CSV
    reproduce  run everything behind the eight census figures
"""

import os
import sys
import json
import logging
import argparse
import traceback
from dataclasses import dataclass, field
from enum import IntEnum

from dotenv import load_dotenv

from census import (
    DEFAULT_N_LIMIT,
    CensusScanner,
    census_points,
    first_points,
    recheck_census,
)
from census_store import CensusStore, detect_kind, read_census_csv, read_first_csv, write_first_csv
from coeff_engine import ENGINES, OVERFLOW_POLICIES, coefficient_value_set, phi_poly
from errors import (
    CoefficientOverflowError,
    EngineConsistencyError,
    InexactDivisionError,
    MalformedCsvError,
    ManifestMismatchError,
)
from newton_sigma import sigma_closed_form, sigma_prefix_general, verify_theorem_main
from numthy import odd_squarefree_profile
from plotter import PLOT_KINDS, ScatterPlotter
from symmetry import (
    DEFAULT_TRIM,
    DISTANCE_METHODS,
    SymmetryAnalyzer,
    compare_reports,
    read_reports_csv,
    write_reports_csv,
)
from utils import get_cache_dir, get_default_workers, paint, setup_directories, setup_logging

# Load environment variables from .env file if present
load_dotenv()

logger = logging.getLogger("cyclophi")

DEFAULT_FIGURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "figures.json")
DEFAULT_FIGURE_DIR = os.path.join("output", "figures")


class ExitCode(IntEnum):
    """Process exit statuses."""

    OK = 0
    USAGE = 2
    INCOMPLETE = 3
    OVERFLOW = 4
    VERIFICATION_FAILED = 5
    IO_ERROR = 6
    MANIFEST_MISMATCH = 7
    MALFORMED_INPUT = 8


@dataclass
class RunConfig:
    """Validated settings for one invocation."""

    subcommand: str
    cache_dir: str
    n: int = None
    n_limit: int = None
    k: int = None
    primes: list = field(default_factory=list)
    engine: str = "series"
    overflow: str = "escalate"
    output: str = None
    input: str = None
    kind: str = None
    bound: int = None
    cutoffs: list = field(default_factory=list)
    workers: int = 1
    trim: float = DEFAULT_TRIM
    method: str = "tree"
    resume: bool = False
    recheck_with: str = None
    reference: str = None
    figures: str = DEFAULT_FIGURES
    include_heavy: bool = False
    progress: bool = False

    def __post_init__(self):
        for name in ("n", "n_limit", "k", "workers", "bound"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name.replace('_', '-')} must be positive, got {value}")
        if not 0 <= self.trim < 0.5:
            raise ValueError(f"--trim must lie in [0, 0.5), got {self.trim}")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.subcommand == "verify" and (len(self.primes) < 3 or len(self.primes) % 2 == 0):
            raise ValueError(f"verify needs an odd number (>= 3) of primes, got {len(self.primes)}")
        if any(c < 1 for c in self.cutoffs):
            raise ValueError(f"cutoffs must be positive, got {self.cutoffs}")

    @classmethod
    def from_args(cls, args):
        """Build a RunConfig from parsed arguments, filling environment defaults."""
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        values["subcommand"] = args.subcommand
        values["cache_dir"] = get_cache_dir()
        if values.get("workers") is None:
            values["workers"] = get_default_workers()
        values["progress"] = not args.quiet and sys.stderr.isatty()
        return cls(**values)

    def cache_path(self, filename):
        return os.path.join(self.cache_dir, filename)


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def cutoff_list(text):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None


def build_parser():
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cyclophi",
        description="Coefficients of cyclotomic polynomials: engines, theorems and census.",
    )
    parser.add_argument("--verbose", action="store_true", help="log debug detail")
    parser.add_argument("--quiet", action="store_true", help="warnings only, no progress bars")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    coeffs = sub.add_parser("coeffs", help="coefficients of Φ_n as CSV")
    coeffs.add_argument("n", type=positive_int)
    coeffs.add_argument("--engine", choices=ENGINES, default="series")
    coeffs.add_argument("--overflow", choices=OVERFLOW_POLICIES, default="escalate")
    coeffs.add_argument("--output", help="CSV path (default: <cache>/phi_<n>.csv)")

    sigma = sub.add_parser("sigma", help="leading coefficients via Newton's identities")
    sigma.add_argument("n", type=positive_int)
    sigma.add_argument("k", type=positive_int, help="last index K of the prefix")

    verify = sub.add_parser("verify", help="verify the coefficient guarantee for Φ_2n")
    verify.add_argument("primes", type=positive_int, nargs="+")

    census = sub.add_parser("census", help="nontrivial coefficients for n <= N")
    census.add_argument("n_limit", type=positive_int)
    census.add_argument("--workers", type=positive_int)
    census.add_argument("--resume", action="store_true", help="extend an existing census")
    census.add_argument("--overflow", choices=OVERFLOW_POLICIES, default="escalate")
    census.add_argument("--recheck-with", choices=("division", "series"), dest="recheck_with")
    census.add_argument("--output", help="CSV path (default: <cache>/census_b.csv)")

    first = sub.add_parser("first", help="first appearances of nontrivial coefficients")
    first.add_argument("k", type=positive_int)
    first.add_argument("--n-limit", type=positive_int, dest="n_limit", default=DEFAULT_N_LIMIT)
    first.add_argument("--workers", type=positive_int)
    first.add_argument("--output", help="CSV path (default: <cache>/first_a.csv)")

    plot = sub.add_parser("plot", help="SVG scatter plot of a census CSV")
    plot.add_argument("input")
    plot.add_argument("--kind", choices=sorted(PLOT_KINDS), required=True)
    plot.add_argument("--bound", type=positive_int, help="index bound k of B_k (default: scanned_through)")
    plot.add_argument("--output", help="SVG path (default: input with .svg suffix)")

    symmetry = sub.add_parser("symmetry", help="Hausdorff symmetry diagnostics")
    symmetry.add_argument("input")
    symmetry.add_argument("--cutoffs", type=cutoff_list, required=True, help="e.g. 100,250,1000")
    symmetry.add_argument("--trim", type=float, default=DEFAULT_TRIM)
    symmetry.add_argument("--method", choices=DISTANCE_METHODS, default="tree")
    symmetry.add_argument("--reference", help="pinned report CSV to compare against")
    symmetry.add_argument("--output", help="CSV path (default: <cache>/symmetry.csv)")

    reproduce = sub.add_parser("reproduce", help="data, plots and diagnostics for the figures")
    reproduce.add_argument("--figures", default=DEFAULT_FIGURES)
    reproduce.add_argument("--include-heavy", action="store_true", dest="include_heavy")
    reproduce.add_argument("--n-limit", type=positive_int, dest="n_limit", default=DEFAULT_N_LIMIT)
    reproduce.add_argument("--workers", type=positive_int)
    reproduce.add_argument("--trim", type=float, default=DEFAULT_TRIM)
    reproduce.add_argument("--reference-dir", dest="reference",
                           help="pinned symmetry_A.csv / symmetry_B.csv; missing files are pinned")
    reproduce.add_argument("--output", help=f"figure directory (default: {DEFAULT_FIGURE_DIR})")

    return parser


def cmd_coeffs(config):
    """Write Φ_n as exponent,coefficient CSV and summarize it on stdout."""
    vec = phi_poly(config.n, engine=config.engine, overflow=config.overflow)
    output = config.output or config.cache_path(f"phi_{config.n}.csv")
    setup_directories(os.path.dirname(output))
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write("exponent,coefficient\n")
        f.writelines(f"{j},{c}\n" for j, c in enumerate(vec.coeffs))

    print(f"n: {vec.n}")
    print(f"degree: {vec.degree}")
    print(f"values: {coefficient_value_set(vec)}")
    print(f"max |coefficient|: {vec.height}")
    print(f"written: {output}")
    return ExitCode.OK


def cmd_sigma(config):
    """Print sigma_0 .. sigma_K; a closed-form disagreement fails verification."""
    prefix = sigma_prefix_general(config.n, config.k)
    profile = odd_squarefree_profile(config.n)
    ladder = profile is not None and profile.t >= 3 and profile.t % 2 == 1
    limit = profile.primes[0] + profile.primes[1] if ladder else 0

    print(f"n: {config.n}")
    mismatched = []
    for k, s in enumerate(prefix.sigma):
        line = f"sigma_{k} = {s}"
        if ladder and 1 <= k < limit:
            closed = sigma_closed_form(config.n, k)
            line += f"  (closed form {closed})"
            if closed != s:
                mismatched.append(k)
                line += "  " + paint("MISMATCH", "red")
        print(line)
    if mismatched:
        logger.error(f"Closed form disagrees with Newton's identities for n={config.n} at k={mismatched}")
        return ExitCode.VERIFICATION_FAILED
    return ExitCode.OK


def cmd_verify(config):
    """Print the verification report; exit 0 only when every value is witnessed."""
    report = verify_theorem_main(config.primes)
    for line in report.describe():
        print(line)
    if report.verified:
        print(paint("VERIFIED", "green"))
        return ExitCode.OK
    print(paint("FAILED", "red"))
    return ExitCode.VERIFICATION_FAILED


def _run_census(config, output):
    """Scan (or resume) the census into output; returns all stored rows."""
    store = CensusStore(output)
    start = store.resume_point() if config.resume else 1
    if start > config.n_limit:
        logger.info(f"{output} already covers n <= {start - 1}; nothing to scan")
        return [row for row in store.load_rows() if row.n <= config.n_limit]
    scanner = CensusScanner(workers=config.workers, overflow=config.overflow, progress=config.progress)
    rows = scanner.scan_census(config.n_limit, start=start)
    store.save(rows, scanned_through=config.n_limit, append=start > 1)
    return store.load_rows()


def cmd_census(config):
    """Build or extend the set-B CSV and its manifest."""
    output = config.output or config.cache_path("census_b.csv")
    rows = _run_census(config, output)
    points = sum(len(row.values) for row in rows)
    print(f"scanned through: {config.n_limit}")
    print(f"indices with nontrivial coefficients: {len(rows)}")
    print(f"points (n, c): {points}")
    print(f"written: {output}")

    if config.recheck_with:
        mismatches = recheck_census(rows, config.n_limit, engine=config.recheck_with,
                                    progress=config.progress)
        if mismatches:
            print(paint(f"recheck with {config.recheck_with}: MISMATCH at n={mismatches[:10]}", "red"))
            return ExitCode.VERIFICATION_FAILED
        print(paint(f"recheck with {config.recheck_with}: OK", "green"))
    return ExitCode.OK


def cmd_first(config):
    """Write the first k points of A; incomplete scans get their own exit code."""
    output = config.output or config.cache_path("first_a.csv")
    scanner = CensusScanner(workers=config.workers, progress=config.progress)
    scan = scanner.scan_first_appearances(config.k, config.n_limit)
    write_first_csv(output, scan.records)
    print(f"records: {len(scan.records)}")
    print(f"scanned through: {scan.scanned_through}")
    print(f"written: {output}")
    if not scan.complete:
        print(paint(f"INCOMPLETE: only {len(scan.records)} of {config.k} "
                    f"first appearances occur for n <= {config.n_limit}", "yellow"))
        return ExitCode.INCOMPLETE
    return ExitCode.OK


def cmd_plot(config):
    """Render a census CSV as an SVG scatter plot."""
    output = config.output or os.path.splitext(config.input)[0] + ".svg"
    count = ScatterPlotter().plot_csv(config.input, config.kind, output, bound=config.bound)
    print(f"points: {count}")
    print(f"written: {output}")
    return ExitCode.OK


def _fmt(x):
    return "-" if x is None else f"{x:.6f}"


def _print_reports(reports):
    print("k,c_k,n_k,count_pos,count_neg,hausdorff_full,hausdorff_trimmed,trimmed_ratio,degenerate")
    for r in reports:
        print(f"{r.k},{r.c_k},{r.n_k},{r.count_pos},{r.count_neg},{_fmt(r.hausdorff_full)},"
              f"{_fmt(r.hausdorff_trimmed)},{_fmt(r.trimmed_ratio)},{int(r.degenerate)}")


def _check_reference(reports, pinned, pin_missing=False):
    """
    Compare a series with a pinned report CSV.

    Only the cutoffs present in the pinned file are compared. With
    pin_missing, an absent file is written from reports instead.

    Returns:
        bool: False if any pinned value differs.
    """
    if pin_missing and not os.path.exists(pinned):
        setup_directories(os.path.dirname(pinned))
        write_reports_csv(pinned, reports)
        logger.info(f"Pinned {len(reports)} symmetry reports to {pinned}")
        print(f"pinned: {pinned}")
        return True
    reference = read_reports_csv(pinned)
    wanted = {r.k for r in reference}
    problems = compare_reports([r for r in reports if r.k in wanted], reference)
    for problem in problems:
        print(paint(problem, "red"))
    if problems:
        return False
    print(paint(f"matches {pinned}", "green"))
    return True


def cmd_symmetry(config):
    """Write the symmetry report CSV for the requested cutoffs."""
    analyzer = SymmetryAnalyzer(trim=config.trim, method=config.method)
    if detect_kind(config.input) == "first":
        records = read_first_csv(config.input)
        short = [k for k in config.cutoffs if k > len(records)]
        if short:
            logger.warning(f"{config.input} holds {len(records)} records; cutoffs {short} use all of them")
        reports = analyzer.first_series(records, config.cutoffs)
    else:
        reports = analyzer.census_series(read_census_csv(config.input), config.cutoffs)

    output = config.output or config.cache_path("symmetry.csv")
    setup_directories(os.path.dirname(output))
    write_reports_csv(output, reports)
    _print_reports(reports)
    print(f"written: {output}")

    if config.reference and not _check_reference(reports, config.reference):
        return ExitCode.VERIFICATION_FAILED
    return ExitCode.OK


def load_figures(file_path):
    """Load figure definitions from the JSON file."""
    with open(file_path, encoding="utf-8") as f:
        data = json.load(f)
    return data.get("figures", [])


def cmd_reproduce(config):
    """Regenerate datasets, scatter plots and symmetry series for every figure."""
    figures = [f for f in load_figures(config.figures) if config.include_heavy or not f.get("heavy")]
    out_dir = config.output or DEFAULT_FIGURE_DIR
    setup_directories(out_dir)
    plotter = ScatterPlotter()
    analyzer = SymmetryAnalyzer(trim=config.trim)
    status = ExitCode.OK
    drifted = False

    a_sizes = sorted(f["size"] for f in figures if f["set"] == "A")
    if a_sizes:
        scanner = CensusScanner(workers=config.workers, progress=config.progress)
        scan = scanner.scan_first_appearances(a_sizes[-1], config.n_limit)
        write_first_csv(config.cache_path("first_a.csv"), scan.records)
        available = [k for k in a_sizes if k <= len(scan.records)]
        for k in a_sizes:
            if k not in available:
                logger.warning(f"Skipping A_{k}: only {len(scan.records)} first appearances for n <= {config.n_limit}")
                print(paint(f"A_{k}: INCOMPLETE", "yellow"))
                status = ExitCode.INCOMPLETE
                continue
            plotter.render(first_points(scan.records, k), f"Graph of A_{k}", os.path.join(out_dir, f"A_{k}.svg"))
            print(f"A_{k}: {os.path.join(out_dir, f'A_{k}.svg')}")
        if available:
            reports = analyzer.first_series(scan.records, available)
            write_reports_csv(os.path.join(out_dir, "symmetry_A.csv"), reports)
            _print_reports(reports)
            if config.reference:
                pinned = os.path.join(config.reference, "symmetry_A.csv")
                drifted |= not _check_reference(reports, pinned, pin_missing=True)

    b_sizes = sorted(f["size"] for f in figures if f["set"] == "B")
    if b_sizes:
        census_config = RunConfig(subcommand="census", cache_dir=config.cache_dir, n_limit=b_sizes[-1],
                                  workers=config.workers, resume=True, progress=config.progress)
        rows = _run_census(census_config, config.cache_path("census_b.csv"))
        for k in b_sizes:
            plotter.render(census_points(rows, k), f"Graph of B_{k}", os.path.join(out_dir, f"B_{k}.svg"))
            print(f"B_{k}: {os.path.join(out_dir, f'B_{k}.svg')}")
        reports = analyzer.census_series(rows, b_sizes)
        write_reports_csv(os.path.join(out_dir, "symmetry_B.csv"), reports)
        _print_reports(reports)
        if config.reference:
            pinned = os.path.join(config.reference, "symmetry_B.csv")
            drifted |= not _check_reference(reports, pinned, pin_missing=True)
    if drifted:
        return ExitCode.VERIFICATION_FAILED
    return status


COMMANDS = {
    "coeffs": cmd_coeffs,
    "sigma": cmd_sigma,
    "verify": cmd_verify,
    "census": cmd_census,
    "first": cmd_first,
    "plot": cmd_plot,
    "symmetry": cmd_symmetry,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    """Main execution function; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ExitCode.OK if not exc.code else ExitCode.USAGE

    try:
        config = RunConfig.from_args(args)
    except ValueError as e:
        parser.print_usage(sys.stderr)
        print(f"cyclophi: error: {e}", file=sys.stderr)
        return ExitCode.USAGE

    log_level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    log_dir = os.environ.get("CYCLOPHI_LOG_DIR") or config.cache_path("logs")
    setup_logging(log_level, log_dir)
    logger.debug(f"Running {config.subcommand} with {config}")

    try:
        return COMMANDS[config.subcommand](config)
    except CoefficientOverflowError as e:
        logger.error(f"Engine overflow at n={e.n}: {e}")
        return ExitCode.OVERFLOW
    except ManifestMismatchError as e:
        logger.error(f"Manifest mismatch: {e}")
        return ExitCode.MANIFEST_MISMATCH
    except MalformedCsvError as e:
        logger.error(f"Malformed input: {e}")
        return ExitCode.MALFORMED_INPUT
    except (EngineConsistencyError, InexactDivisionError) as e:
        logger.error(f"Self-check failed: {e}")
        logger.debug(traceback.format_exc())
        return ExitCode.VERIFICATION_FAILED
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return ExitCode.USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        logger.debug(traceback.format_exc())
        return ExitCode.IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
