"""Sign scans over x grids, crossing refinement and the G/H co-sign check."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .expression import GeneralSpec
from .families import Family, eval_G, eval_H, evaluate, family_minimum
from .numerics import ExtFloat
from .primes import PrimeCounter, default_counter

__all__ = [
    "ScanReport",
    "CosignRow",
    "make_grid",
    "scan",
    "refine_crossing",
    "cosign_check",
    "monotonicity",
    "parallel_map",
]


@dataclass(frozen=True)
class ScanReport:
    family: str
    n: int | None
    r: int | None
    grid: tuple[int, ...]
    values: tuple[ExtFloat, ...]
    signs: tuple[int, ...]
    crossings: tuple[tuple[int, int], ...]
    monotone: str
    runtime_ms: int

    def to_csv(self, digits: int = 17) -> str:
        lines = ["x,value,sign"]
        for x, v, s in zip(self.grid, self.values, self.signs):
            lines.append(f"{x},{v.to_scientific(digits)},{s}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CosignRow:
    x: int
    sign_G: int
    sign_H: int

    @property
    def agree(self) -> bool:
        return self.sign_G == self.sign_H


def parallel_map(fn, items: Sequence, threads: int | None = None) -> list:
    """Ordered map; results come back in input order whatever the thread count."""
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def make_grid(x_min: float, x_max: float, points: int, grid: str = "log") -> list[int]:
    """Integer grid; points are rounded since pi only steps at integers."""
    if points < 2:
        raise ValueError("a scan needs at least 2 points")
    if not x_max >= x_min:
        raise ValueError(f"empty scan range [{x_min}, {x_max}]")
    if grid == "log":
        if x_min <= 0:
            raise ValueError("log grid needs x_min > 0")
        a, b = math.log(x_min), math.log(x_max)
        raw = [math.exp(a + (b - a) * i / (points - 1)) for i in range(points)]
    elif grid == "linear":
        raw = [x_min + (x_max - x_min) * i / (points - 1) for i in range(points)]
    else:
        raise ValueError(f"unknown grid kind {grid!r}")
    raw[0], raw[-1] = x_min, x_max
    lo = math.ceil(x_min)
    return [max(lo, round(v)) for v in raw]


def monotonicity(values: Sequence[ExtFloat]) -> str:
    pairs = list(zip(values, values[1:]))
    if pairs and all(b > a for a, b in pairs):
        return "increasing"
    if pairs and all(b < a for a, b in pairs):
        return "decreasing"
    return "mixed"


def _value(family, x: int, n, r, counter) -> ExtFloat:
    return evaluate(family, x, n, r, counter).value


def scan(family, x_min: float, x_max: float, points: int, grid: str = "log", *,
         n: int | None = None, r: int | None = None,
         counter: PrimeCounter | None = None, threads: int | None = None) -> ScanReport:
    """Evaluate a family (or a parsed spec) over a grid and summarise the signs."""
    counter = counter or default_counter()
    if isinstance(family, GeneralSpec):
        name = "General"
    else:
        fam = Family.parse(family)
        name = fam.value
        if x_min < family_minimum(fam, n):
            raise ValueError(f"{name}: scan start {x_min} below the family minimum")
    if x_max > counter.hard_cap:
        raise ValueError(f"scan end {x_max} exceeds the exact-pi cap {counter.hard_cap}")
    xs = make_grid(x_min, x_max, points, grid)
    t0 = time.perf_counter()
    values = parallel_map(lambda x: _value(family, x, n, r, counter), xs, threads)
    runtime = int((time.perf_counter() - t0) * 1000)
    signs = [v.sign for v in values]
    crossings = [(xs[i], xs[i + 1]) for i in range(len(xs) - 1)
                 if signs[i] != signs[i + 1]]
    return ScanReport(name, n, r, tuple(xs), tuple(values), tuple(signs),
                      tuple(crossings), monotonicity(values), runtime)


def refine_crossing(family, lo: int, hi: int, tolerance: int = 1, *,
                    n: int | None = None, r: int | None = None,
                    counter: PrimeCounter | None = None) -> tuple[int, int]:
    """Integer bisection of a sign change down to width <= tolerance.

    An exact zero at a probe ends the search; the returned bracket then has
    that zero as one endpoint.
    """
    counter = counter or default_counter()
    lo, hi = int(lo), int(hi)
    if tolerance < 1:
        raise ValueError("tolerance must be at least 1")
    if hi < lo:
        lo, hi = hi, lo
    s_lo = _value(family, lo, n, r, counter).sign
    s_hi = _value(family, hi, n, r, counter).sign
    if s_lo == s_hi:
        raise ValueError(f"no sign change on [{lo}, {hi}]: both endpoints have sign {s_lo}")
    if s_lo == 0 or s_hi == 0:
        return lo, hi
    while hi - lo > tolerance:
        mid = (lo + hi) // 2
        s = _value(family, mid, n, r, counter).sign
        if s == 0:
            return lo, mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def cosign_check(xs: Sequence[float], counter: PrimeCounter | None = None,
                 threads: int | None = None) -> list[CosignRow]:
    """Signs of G and H at each x."""
    counter = counter or default_counter()

    def one(x):
        x = int(round(x))
        return CosignRow(x, eval_G(x, counter).sign, eval_H(x, counter).sign)

    return parallel_map(one, list(xs), threads)
