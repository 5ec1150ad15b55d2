from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from census import (
    CensusRow,
    FirstAppearanceRecord,
    PointSet,
    scan_census,
    scan_first_appearances,
    split_by_sign,
)
from errors import MalformedCsvError
from symmetry import (
    DISTANCE_METHODS,
    SymmetryAnalyzer,
    UnitCloud,
    bounding_rect,
    compare_reports,
    directed_hausdorff_distance,
    hausdorff,
    read_reports_csv,
    reflect,
    scale_to_unit,
    symmetry_series,
    trimmed_hausdorff,
    write_reports_csv,
)

RECORDS = [FirstAppearanceRecord(1, -2, 105), FirstAppearanceRecord(2, 2, 165),
           FirstAppearanceRecord(3, 3, 385)]


def points(*pairs, bound=None):
    return PointSet(frozenset(pairs), bound)


def test_reflect_and_bounding_rect():
    s = points((-2, 105), (3, 385))
    assert reflect(s).points == frozenset({(2, 105), (-3, 385)})
    assert bounding_rect(s) == (3, 385)
    with pytest.raises(ValueError):
        bounding_rect(points())


def test_scale_to_unit_is_exact():
    cloud = scale_to_unit(points((2, 105), (3, 385)), 3, 385, provenance="test")
    assert cloud.points == ((Fraction(2, 3), Fraction(3, 11)), (Fraction(1), Fraction(1)))
    assert cloud.provenance == "test"
    with pytest.raises(ValueError):
        scale_to_unit(points((4, 105)), 3, 385)


def test_unit_cloud_rejects_bad_scale():
    with pytest.raises(ValueError):
        UnitCloud((), 0, 1)


def test_hausdorff_simple_cases():
    assert hausdorff([(0, 0)], [(1, 0)]) == 1.0
    assert hausdorff([(0, 0), (0.5, 0.5)], [(0.5, 0.5), (0, 0)]) == 0.0
    # Directed distances differ; the symmetric one takes the larger
    a, b = [(0, 0)], [(0, 0), (0, 1)]
    assert directed_hausdorff_distance(a, b) == 0.0
    assert directed_hausdorff_distance(b, a) == 1.0
    assert hausdorff(a, b) == 1.0
    with pytest.raises(ValueError):
        hausdorff([], [(0, 0)])


def test_brute_and_tree_agree():
    rng = np.random.default_rng(7)
    for size in (1, 5, 300, 3000):
        a = rng.random((size, 2))
        b = rng.random((size + 3, 2))
        assert hausdorff(a, b, "brute") == pytest.approx(hausdorff(a, b, "tree"), abs=1e-12)


@pytest.mark.slow
def test_brute_and_tree_agree_on_random_clouds():
    rng = np.random.default_rng(100)
    for _ in range(100):
        a = rng.random((int(rng.integers(1, 10001)), 2))
        b = rng.random((int(rng.integers(1, 10001)), 2))
        assert abs(hausdorff(a, b, "brute") - hausdorff(a, b, "tree")) <= 1e-12


@pytest.mark.parametrize("method", DISTANCE_METHODS)
def test_hausdorff_metric_axioms(method):
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b, c = (rng.random((int(rng.integers(1, 60)), 2)) for _ in range(3))
        assert hausdorff(a, b, method) == hausdorff(b, a, method)
        assert hausdorff(a, a, method) == 0.0
        assert hausdorff(a, c, method) <= hausdorff(a, b, method) + hausdorff(b, c, method) + 1e-12


def test_split_reflect_merge_is_a_bijection():
    rng = np.random.default_rng(5)
    for _ in range(20):
        magnitudes = rng.integers(2, 30, size=40)
        signs = rng.choice([-1, 1], size=40)
        ns = rng.integers(105, 5000, size=40)
        s = points(*{(int(c), int(n)) for c, n in zip(magnitudes * signs, ns)}, bound=5000)

        positive, negative = split_by_sign(s)
        mirrored = reflect(negative)
        assert not positive.points & negative.points
        assert all(c > 0 for c, _ in mirrored.points)
        assert len(mirrored) == len(negative)
        assert positive.points | reflect(mirrored).points == s.points
        assert reflect(reflect(s)) == s


def test_unknown_method():
    with pytest.raises(ValueError):
        hausdorff([(0, 0)], [(1, 0)], method="grid")


def test_trimmed_never_exceeds_full():
    rng = np.random.default_rng(11)
    for trim in (0.0, 0.02, 0.1, 0.3):
        a = rng.random((200, 2))
        b = rng.random((150, 2))
        assert trimmed_hausdorff(a, b, trim) <= hausdorff(a, b)
    assert trimmed_hausdorff(a, b, 0.0) == hausdorff(a, b)


def test_trimming_drops_an_outlier():
    grid = [(x / 10, y / 10) for x in range(10) for y in range(5)]
    with_outlier = grid + [(1.0, 1.0)]
    assert hausdorff(grid, with_outlier) > 0.5
    assert trimmed_hausdorff(grid, with_outlier, 0.02) == 0.0


def test_symmetric_set_has_zero_distance():
    s = points((2, 10), (-2, 10), (3, 20), (-3, 20))
    [report] = symmetry_series({20: s})
    assert not report.degenerate
    assert report.hausdorff_full == 0.0
    assert report.hausdorff_trimmed == 0.0


def test_first_series_small_cutoffs():
    reports = SymmetryAnalyzer(trim=0.02).first_series(RECORDS, [1, 2])
    first, second = reports
    assert first.degenerate
    assert first.count_pos == 0 and first.count_neg == 1
    assert first.hausdorff_full is None
    assert not second.degenerate
    assert (second.c_k, second.n_k) == (2, 165)
    assert second.hausdorff_full == pytest.approx(4 / 11)
    assert second.hausdorff_trimmed == pytest.approx(4 / 11)
    assert second.trimmed_ratio == pytest.approx(1.0)


def test_census_series_keys_cutoffs_by_index():
    rows = [CensusRow(105, (-2,)), CensusRow(165, (2,)), CensusRow(385, (-3, -2, 2, 3))]
    reports = SymmetryAnalyzer().census_series(rows, [100, 200, 400])
    assert reports[0].degenerate and reports[0].count_pos == 0
    assert reports[1].n_k == 165
    assert (reports[2].count_pos, reports[2].count_neg) == (3, 3)


def test_series_validation():
    s = points((2, 10), (-2, 10))
    with pytest.raises(ValueError):
        symmetry_series({10: s}, trim=0.5)
    with pytest.raises(ValueError):
        symmetry_series({20: s, 10: s})


def test_report_csv_and_comparison(tmp_path):
    reports = SymmetryAnalyzer().first_series(RECORDS, [1, 2, 3])
    path = tmp_path / "symmetry.csv"
    write_reports_csv(path, reports)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,c_k,n_k,count_pos,count_neg,hausdorff_full,hausdorff_trimmed,trim,degenerate"
    assert lines[1] == "1,2,105,0,1,,,0.02,1"

    pinned = read_reports_csv(path)
    assert compare_reports(reports, pinned) == []

    shifted = [pinned[0], pinned[1], pinned[2].__class__(**{**pinned[2].__dict__, "hausdorff_full": 0.5})]
    assert compare_reports(reports, shifted)
    assert compare_reports(reports[:2], pinned)


def test_malformed_report_csv(tmp_path):
    path = tmp_path / "symmetry.csv"
    path.write_text("k,c_k\n1,2\n")
    with pytest.raises(MalformedCsvError):
        read_reports_csv(path)


A_CUTOFFS = [100, 250, 1000]
B_CUTOFFS = [1000, 10000]
REFERENCE_DIR = Path(__file__).resolve().parent.parent / "data" / "reference"


@pytest.fixture(scope="module")
def census_10000():
    return scan_census(10000, workers=2)


@pytest.mark.slow
def test_b_series_at_ten_thousand(census_10000, tmp_path):
    reports = SymmetryAnalyzer().census_series(census_10000, B_CUTOFFS)
    last = reports[-1]
    assert not last.degenerate
    assert last.hausdorff_full == pytest.approx(0.11111111111111116, rel=1e-12)
    assert last.hausdorff_trimmed == pytest.approx(0.0025002500250025372, rel=1e-12)
    assert last.hausdorff_trimmed <= last.hausdorff_full

    brute = SymmetryAnalyzer(method="brute").census_series(census_10000, B_CUTOFFS)
    assert compare_reports(brute, reports) == []

    path = tmp_path / "symmetry_B.csv"
    write_reports_csv(path, reports)
    assert compare_reports(reports, read_reports_csv(path)) == []


@pytest.mark.slow
@pytest.mark.parametrize("name", ["symmetry_A.csv", "symmetry_B.csv"])
def test_series_match_pinned_reference(name, census_10000):
    pinned = REFERENCE_DIR / name
    if not pinned.exists():
        pytest.skip(f"{pinned} is written by the first `reproduce --reference-dir data/reference`")
    if name == "symmetry_A.csv":
        scan = scan_first_appearances(A_CUTOFFS[-1], workers=4)
        assert scan.complete
        reports = SymmetryAnalyzer().first_series(scan.records, A_CUTOFFS)
    else:
        reports = SymmetryAnalyzer().census_series(census_10000, B_CUTOFFS)
    assert compare_reports(reports, read_reports_csv(pinned)) == []
