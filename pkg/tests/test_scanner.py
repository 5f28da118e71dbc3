import pytest

from pipoly.expression import parse_spec
from pipoly.families import Family
from pipoly.numerics import ext_from_real
from pipoly.scanner import cosign_check, make_grid, monotonicity, refine_crossing, scan


def test_log_grid_hits_decades():
    assert make_grid(1e4, 1e10, 7, "log") == [10 ** k for k in range(4, 11)]


def test_linear_grid():
    assert make_grid(2e4, 1e5, 5, "linear") == [20000, 40000, 60000, 80000, 100000]


@pytest.mark.parametrize("args", [(1, 10, 1, "log"), (10, 1, 5, "log"), (0, 10, 5, "log"),
                                  (1, 10, 5, "cubic")])
def test_grid_errors(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_monotonicity():
    vals = [ext_from_real(v) for v in (1.0, 2.0, 3.0)]
    assert monotonicity(vals) == "increasing"
    assert monotonicity(vals[::-1]) == "decreasing"
    assert monotonicity([vals[0], vals[2], vals[1]]) == "mixed"


def test_scan_H():
    rep = scan("H", 1e4, 1e10, 7, "log")
    assert rep.signs == (-1,) * 7
    assert rep.monotone == "decreasing"
    assert rep.crossings == ()
    assert rep.to_csv().splitlines()[0] == "x,value,sign"
    assert len(rep.to_csv().splitlines()) == 8


def test_scan_rejects_bad_ranges():
    with pytest.raises(ValueError, match="minimum"):
        scan("K", 5, 100, 3)
    with pytest.raises(ValueError, match="cap"):
        scan("H", 1e4, 1e14, 3)


def test_scan_general_spec_crossing():
    rep = scan(parse_spec("x - 120"), 50, 200, 4, "linear")
    assert rep.family == "General"
    assert rep.crossings == ((100, 150),)
    # an exact zero on the grid borders two sign changes
    rep = scan(parse_spec("x - 100"), 50, 200, 4, "linear")
    assert rep.signs == (-1, 0, 1, 1)
    assert rep.crossings == ((50, 100), (100, 150))


def test_refine_crossing_linear():
    lo, hi = refine_crossing(parse_spec("x - 100.5"), 50, 200, 1)
    assert (lo, hi) == (100, 101)


def test_refine_crossing_exact_zero():
    lo, hi = refine_crossing(parse_spec("x - 100"), 50, 200, 1)
    assert 100 in (lo, hi) and hi - lo <= 100


def test_refine_crossing_no_sign_change():
    with pytest.raises(ValueError, match="no sign change"):
        refine_crossing("H", 10 ** 4, 10 ** 5)


def test_refine_pi_step():
    # pi(x) - 25.5 changes sign between 100 and 101 (the 26th prime)
    lo, hi = refine_crossing(parse_spec("pi(x) - 25.5"), 2, 1000, 1)
    assert (lo, hi) == (100, 101)


def test_cosign():
    rows = cosign_check([1e4, 1e6, 1e8])
    assert [r.x for r in rows] == [10 ** 4, 10 ** 6, 10 ** 8]
    assert all(r.agree and r.sign_G == -1 for r in rows)


def test_threads_do_not_change_scan():
    a = scan(Family.L, 1e3, 1e7, 30, n=5, threads=1)
    b = scan(Family.L, 1e3, 1e7, 30, n=5, threads=6)
    assert a.to_csv() == b.to_csv()
