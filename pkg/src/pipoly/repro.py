"""Reproduction of the published value tables and figure data."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

from .families import Family, evaluate
from .numerics import ExtFloat, ext_parse
from .primes import PrimeCounter, default_counter
from .scanner import make_grid, parallel_map

__all__ = [
    "Series",
    "ExpectedTable",
    "TableRow",
    "TABLES",
    "FIGURES",
    "table_by_id",
    "reproduce_table",
    "diagnose_n",
    "figure_data",
    "emit",
    "figure_csv",
    "significant_digits",
]

DEFAULT_TOLERANCE = 1e-6
DEFAULT_TABLE_CAP = 10 ** 10
# a row failing the tolerance but inside this triggers the rounding diagnostic
SENSITIVITY_BAND = 1e-3


@dataclass(frozen=True)
class Series:
    label: str
    family: Family
    n: int | None = None
    r: int | None = None


@dataclass(frozen=True)
class ExpectedTable:
    table_id: str
    series: tuple[Series, ...]
    # x -> one verbatim value text per series
    rows: dict[int, tuple[str, ...]] = field(default_factory=dict)

    @property
    def uses_n(self) -> bool:
        return any(s.n is not None and s.family is not Family.Hn for s in self.series)


@dataclass(frozen=True)
class TableRow:
    x: int
    series: str
    expected_text: str | None
    expected: ExtFloat | None
    computed: ExtFloat | None
    rel_error: float | None
    status: str
    diagnostic: str = ""


def _rows(*pairs) -> dict[int, tuple[str, ...]]:
    return {10 ** k: tuple(vals) for k, *vals in pairs}


TABLES: dict[str, ExpectedTable] = {
    "T1_H": ExpectedTable("T1_H", (Series("H", Family.H),), _rows(
        (4, "−4.822952515086 × 10^8"),
        (5, "−1.9535582364473376 × 10^11"),
        (6, "−9.742665854621681 × 10^13"),
        (7, "−5.373324095991878 × 10^16"),
        (8, "−3.2776888213143585 × 10^19"),
        (9, "−2.142500053569382 × 10^22"),
        (10, "−1.4738226482632569 × 10^25"),
        (11, "−1.0555737602257731 × 10^28"),
        (12, "−7.810947114144009 × 10^30"),
        (13, "−5.937547995444999 × 10^33"),
        (14, "−4.6163278697477706 × 10^36"),
        (15, "−3.65847701300371 × 10^39"),
        (16, "−2.947501336471066 × 10^42"),
        (17, "−2.4089115035201524 × 10^45"),
        (18, "−1.9935903086211532 × 10^48"),
    )),
    "T2_K": ExpectedTable("T2_K", (Series("K", Family.K),), _rows(
        (4, "6.785501979995337 × 10^11"),
        (5, "2.858713229490609 × 10^15"),
        (6, "1.3657430631495643 × 10^19"),
        (7, "7.37684110441765 × 10^22"),
        (8, "4.2993020901898284 × 10^26"),
        (9, "2.6664968326322003 × 10^30"),
        (10, "1.7394264262779463 × 10^34"),
        (11, "1.1821189632007215 × 10^38"),
        (12, "8.310509439561298 × 10^41"),
        (13, "6.010924984361412 × 10^45"),
        (14, "4.454174125769207 × 10^49"),
        (15, "3.3701437003780375 × 10^53"),
        (16, "2.59663004179433 × 10^57"),
        (17, "2.0327843159078997 × 10^61"),
    )),
    "T3_L": ExpectedTable("T3_L", (Series("L", Family.L, n=5),), _rows(
        (4, "5.442878634267854 × 10^6"),
        (5, "3.182941989056241 × 10^8"),
        (6, "2.0720876553125698 × 10^10"),
        (7, "1.453173495473891 × 10^12"),
        (8, "1.0748621057424523 × 10^14"),
        (9, "8.271311872938837 × 10^15"),
        (10, "6.562072688654034 × 10^17"),
        (11, "5.3333332449648206 × 10^19"),
        (12, "4.4203146604764075 × 10^21"),
        (13, "3.723359062321086 × 10^23"),
        (14, "3.1792547132494815 × 10^25"),
        (15, "2.7463355733587377 × 10^27"),
        (16, "2.3962303815115464 × 10^29"),
    )),
    "T4_F": ExpectedTable("T4_F", (Series("F", Family.F, n=5),), _rows(
        (4, "−377,275.13516957406"),
        (5, "−1.830179494511997 × 10^7"),
        (6, "−1.0203946684413686 × 10^9"),
        (7, "−6.256701329540303 × 10^10"),
        (8, "−4.1109224248432134 × 10^12"),
        (9, "−2.8451189547136775 × 10^14"),
        (10, "−2.0504855777527976 × 10^16"),
        (11, "−1.5264989872331325 × 10^18"),
        (12, "−1.1670093161419563 × 10^20"),
        (13, "−9.121682100604639 × 10^21"),
        (14, "−7.264828101112622 × 10^23"),
    )),
    "T5_N3N4": ExpectedTable("T5_N3N4", (Series("N3", Family.Nr, n=5, r=3),
                                         Series("N4", Family.Nr, n=5, r=4)), _rows(
        (4, "−6.204817261289663 × 10^12", "−7.911694463952808 × 10^15"),
        (5, "−2.0538877597403304 × 10^16", "−1.9593096354084415 × 10^20"),
        (6, "−8.54030555139954 × 10^19", "−6.465704751724349 × 10^24"),
        (7, "−4.1469160311751975 × 10^23", "−2.597975844704281 × 10^29"),
        (8, "−2.2502470326411468 × 10^27", "−1.2022000181431568 × 10^34"),
        (9, "−1.3249101964920937 × 10^31", "−6.170254706864245 × 10^38"),
        (10, "−8.304086276172884 × 10^34", "−3.427910948552053 × 10^43"),
        (11, "−5.4674077933205056 × 10^38", "−2.026811001937711 × 10^48"),
        (12, "−3.746002497341975 × 10^42", "−1.260254434482889 × 10^53"),
        (13, "−2.6523089311884873 × 10^46", "−8.168086531604906 × 10^57"),
        (14, "−1.930438588096488 × 10^50", "−5.481394602239431 × 10^62"),
        (15, "−1.4384149341267808 × 10^54", "−3.7889284123142535 × 10^67"),
    )),
    "T7_H2H3": ExpectedTable("T7_H2H3", (Series("H2", Family.Hn, n=2),
                                         Series("H3", Family.Hn, n=3)), _rows(
        (4, "6.353725021975254 × 10^27", "2.617585266401968 × 10^83"),
        (5, "6.835585478626048 × 10^35", "3.2474882786926336 × 10^107"),
        (6, "1.1261441103738037 × 10^44", "1.4493790443082677 × 10^132"),
        (7, "2.517601761588046 × 10^52", "1.6171807959592812 × 10^157"),
        (8, "6.965999334038062 × 10^60", "3.42269895601566 × 10^182"),
        (9, "2.2631415625131205 × 10^69", "1.1729707311062672 × 10^208"),
        (10, "8.334950926673871 × 10^77", "5.856806953089547 × 10^233"),
        (11, "3.393363660513159 × 10^86", "3.950820693357716 × 10^259"),
        (12, "1.4995319398929942 × 10^95", "3.408309291619576 × 10^285"),
        (13, "7.0941717053768875 × 10^103", "3.608074552069926 × 10^311"),
        (14, "3.555379086542425 × 10^112", "4.540919459707699 × 10^337"),
        (15, "1.8720454577090458 × 10^121", "6.627717169602305 × 10^363"),
        (16, "1.028783938302183 × 10^130", "1.0998319401738324 × 10^390"),
        (17, "5.869229663529639 × 10^138", "2.041946308723196 × 10^416"),
        (18, "3.460762114044545 × 10^147", "4.185719359179408 × 10^442"),
    )),
}

_TABLE_ALIASES = {"1": "T1_H", "2": "T2_K", "3": "T3_L", "4": "T4_F",
                  "5": "T5_N3N4", "7": "T7_H2H3"}

#: figure id -> (family, n, r); all figures cover 2e4 <= x <= 1e5
FIGURES: dict[int, tuple[Family, int | None, int | None]] = {
    1: (Family.H, None, None),
    2: (Family.K, None, None),
    3: (Family.L, 5, None),
    4: (Family.F, 5, None),
    5: (Family.Nr, 5, 3),
    6: (Family.Nr, 5, 4),
    7: (Family.Hn, 2, None),
    8: (Family.Hn, 3, None),
}
FIGURE_RANGE = (2 * 10 ** 4, 10 ** 5)


def table_by_id(table_id: str | int) -> ExpectedTable:
    key = _TABLE_ALIASES.get(str(table_id), str(table_id))
    if key not in TABLES:
        raise ValueError(f"unknown table id {table_id!r}")
    return TABLES[key]


def significant_digits(text: str) -> str:
    """The significant digit string of a decimal text ("-377,275.13" -> "37727513")."""
    mant = text.replace("−", "-").split("×")[0].split("e")[0].split("E")[0]
    digits = "".join(ch for ch in mant if ch.isdigit())
    return digits.lstrip("0") or "0"


def _compare(expected: ExtFloat, computed: ExtFloat) -> float | None:
    if expected.is_zero():
        return None
    return float(abs(computed - expected) / abs(expected))


def _row(x, series: Series, text, counter, tolerance, n_override=None) -> TableRow:
    expected = ext_parse(text) if text is not None else None
    n = n_override if (n_override is not None and series.family is not Family.Hn) else series.n
    computed = evaluate(series.family, x, n, series.r, counter).value
    if expected is None:
        return TableRow(x, series.label, None, None, computed, None, "no-expected")
    rel = _compare(expected, computed)
    if rel is None:
        status = "match" if computed.is_zero() else "mismatch"
        return TableRow(x, series.label, text, expected, computed, None, status)
    status = "match" if rel <= tolerance else "mismatch"
    diag = ""
    if status == "mismatch" and rel <= SENSITIVITY_BAND:
        rounded = evaluate(series.family, x, n, series.r, counter.with_rounding("round")).value
        rel_round = _compare(expected, rounded)
        diag = f"pi-argument rounding sensitivity: round-to-nearest rel_error={rel_round:.3e}"
    return TableRow(x, series.label, text, expected, computed, rel, status, diag)


def reproduce_table(table_id: str | int, x_cap: int = DEFAULT_TABLE_CAP,
                    tolerance: float = DEFAULT_TOLERANCE, *,
                    counter: PrimeCounter | None = None, threads: int | None = None,
                    n: int | None = None) -> list[TableRow]:
    """Recompute a table's rows with exact pi up to ``x_cap``; larger rows are skipped.

    ``n`` overrides the sum length of the L/F/N tables (default 5).
    """
    table = table_by_id(table_id)
    if not 0 < tolerance <= 1:
        raise ValueError("tolerance must lie in (0, 1]")
    counter = counter or default_counter()
    if x_cap > counter.hard_cap:
        raise ValueError(f"x_cap {x_cap} exceeds the exact-pi cap {counter.hard_cap}")
    jobs = []
    for x in sorted(table.rows):
        for series, text in zip(table.series, table.rows[x]):
            jobs.append((x, series, text))

    def run(job):
        x, series, text = job
        if x > x_cap:
            expected = ext_parse(text) if text is not None else None
            return TableRow(x, series.label, text, expected, None, None, "skipped-out-of-range")
        return _row(x, series, text, counter, tolerance, n)

    return parallel_map(run, jobs, threads)


def diagnose_n(table_id: str | int, x_cap: int = DEFAULT_TABLE_CAP,
               tolerance: float = DEFAULT_TOLERANCE, candidates: Sequence[int] = range(2, 11),
               *, counter: PrimeCounter | None = None, threads: int | None = None) -> list[int]:
    """Sum lengths n for which every in-range row of an L/F/N table matches."""
    table = table_by_id(table_id)
    if not table.uses_n:
        raise ValueError(f"table {table.table_id} has no sum length parameter")
    good = []
    for n in candidates:
        rows = reproduce_table(table.table_id, x_cap, tolerance, counter=counter,
                               threads=threads, n=n)
        checked = [r for r in rows if r.status in ("match", "mismatch")]
        if checked and all(r.status == "match" for r in checked):
            good.append(n)
    return good


def figure_data(figure_id: int, points: int, *, counter: PrimeCounter | None = None,
                threads: int | None = None) -> list[tuple[int, ExtFloat]]:
    """(x, value) samples on a linear grid over the figure range."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure id {figure_id!r}")
    family, n, r = FIGURES[figure_id]
    counter = counter or default_counter()
    xs = make_grid(*FIGURE_RANGE, points, "linear")
    values = parallel_map(lambda x: evaluate(family, x, n, r, counter).value, xs, threads)
    return list(zip(xs, values))


def figure_csv(data: Sequence[tuple[int, ExtFloat]]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "value"])
    for x, v in data:
        w.writerow([x, v.to_scientific(17)])
    return out.getvalue()


def _expected_render(row: TableRow) -> str:
    if row.expected is None:
        return ""
    return row.expected.to_scientific(min(17, len(significant_digits(row.expected_text))))


def _typeset(v: ExtFloat, digits: int = 16) -> str:
    mant, _, exp = v.to_scientific(digits).partition("e")
    return mant if exp == "0" else f"{mant} × 10^{exp}"


def _power_label(x: int) -> str:
    k = len(str(x)) - 1
    return f"10^{k}" if x == 10 ** k else str(x)


def emit(rows: Sequence[TableRow], fmt: str = "csv") -> str:
    """Render rows as CSV (``x,expected,computed,rel_error,status``) or markdown.

    Tables with two series get an extra ``series`` column in CSV and one
    value column per series in markdown.
    """
    labels = list(dict.fromkeys(r.series for r in rows))
    multi = len(labels) > 1
    if fmt == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        head = ["x", "expected", "computed", "rel_error", "status"]
        w.writerow(head[:1] + ["series"] + head[1:] if multi else head)
        for r in rows:
            cells = [r.x, _expected_render(r),
                     r.computed.to_scientific(17) if r.computed is not None else "",
                     f"{r.rel_error:.3e}" if r.rel_error is not None else "", r.status]
            w.writerow(cells[:1] + [r.series] + cells[1:] if multi else cells)
        return out.getvalue()
    if fmt == "markdown":
        by_x: dict[int, dict[str, TableRow]] = {}
        for r in rows:
            by_x.setdefault(r.x, {})[r.series] = r
        lines = ["| x | " + " | ".join(f"{lab}(x)" for lab in labels) + " |",
                 "|---|" + "---|" * len(labels)]
        for x in sorted(by_x):
            cells = []
            for lab in labels:
                r = by_x[x].get(lab)
                cells.append(_typeset(r.computed) if r and r.computed is not None else "-")
            lines.append(f"| {_power_label(x)} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")
