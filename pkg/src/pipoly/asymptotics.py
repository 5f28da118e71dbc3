"""Leading-order main terms and O(.) scales for each family."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .families import E, GAMMA, Family, evaluate
from .numerics import ExtFloat, ext_from_real
from .primes import PrimeCounter

__all__ = [
    "MainTermReport",
    "main_term_H",
    "main_term_K",
    "main_term_L",
    "main_term_F",
    "main_term_Hn",
    "main_term_Nr",
    "main_term",
    "error_scale",
    "main_term_report",
    "harmonic",
    "harmonic_approx",
]

_E = ext_from_real(E)


def _x_log(x: float) -> tuple[ExtFloat, float]:
    x = float(x)
    if not x > 1:
        raise ValueError(f"x must exceed 1, got {x!r}")
    return ext_from_real(x), math.log(x)


def main_term_H(x: float) -> ExtFloat:
    """-3 x^3 / (e (log x - 1)^3)."""
    X, L = _x_log(x)
    if L == 1.0:
        raise ValueError("main_term_H is singular at log x = 1")
    return -(3 * X ** 3 / (_E * ext_from_real(L - 1.0) ** 3))


def main_term_K(x: float) -> ExtFloat:
    X, L = _x_log(x)
    factor = 1 - 4 * E / L + 6 * E * E / L ** 2 - 4 * E ** 3 / L ** 3
    return (X / ext_from_real(L)) ** 4 * ext_from_real(factor)


def _check_n(n: int) -> int:
    if int(n) != n or n <= 1:
        raise ValueError(f"n must be an integer > 1, got {n!r}")
    return int(n)


def main_term_L(x: float, n: int) -> ExtFloat:
    """x^2 log n (log n - 1) / (log x)^2; negative for n = 2."""
    X, L = _x_log(x)
    ln = math.log(_check_n(n))
    return X ** 2 * ext_from_real(ln * (ln - 1.0)) / ext_from_real(L) ** 2


def main_term_F(x: float, n: int) -> ExtFloat:
    X, L = _x_log(x)
    ln = math.log(_check_n(n))
    return -(X ** 2 * ext_from_real(ln) / ext_from_real(L) ** 3)


def main_term_Hn(x: float, n: int) -> ExtFloat:
    """(x / log x)^(3^n); the exponentially suppressed corrections are dropped."""
    X, L = _x_log(x)
    if int(n) < 1:
        raise ValueError("Hn requires n >= 1")
    return (X / ext_from_real(L)) ** (3 ** int(n))


def main_term_Nr(x: float, n: int, r: int) -> ExtFloat:
    """Signed leading term for odd r = 2m+1 and even r = 2m.

    odd:  -x^(2m+2) / (e^(2m) (log x)^(2m+2)) * (log n + gamma)^(2m+1)
    even: -x^(2m+1) / (e^(2m-1) (log x)^(2m+1)) * (log n + gamma)^(2m)

    Both collapse to -(x/log x)^(r+1) (log n + gamma)^r / e^(r-1).
    """
    X, L = _x_log(x)
    n = _check_n(n)
    r = int(r)
    if r <= 1:
        raise ValueError("Nr requires r > 1")
    h = ext_from_real(math.log(n) + GAMMA)
    if r % 2:
        m = (r - 1) // 2
        return -((X / ext_from_real(L)) ** (2 * m + 2) / _E ** (2 * m) * h ** (2 * m + 1))
    m = r // 2
    return -((X / ext_from_real(L)) ** (2 * m + 1) / _E ** (2 * m - 1) * h ** (2 * m))


def main_term(family, x: float, n: int | None = None, r: int | None = None) -> ExtFloat:
    family = Family.parse(family)
    if family is Family.H:
        return main_term_H(x)
    if family is Family.K:
        return main_term_K(x)
    if family is Family.L:
        return main_term_L(x, n)
    if family is Family.F:
        return main_term_F(x, n)
    if family is Family.Hn:
        return main_term_Hn(x, n)
    if family is Family.Nr:
        return main_term_Nr(x, n, r)
    raise ValueError(f"no main term for family {family.value}")


def error_scale(family, x: float, n: int | None = None, r: int | None = None,
                d: int | None = None) -> ExtFloat:
    """Positive O(.) denominator for a family at x.

    General forms use x^d / (log x)^(d+1); G is treated as degree 2.
    """
    X, L = _x_log(x)
    Lx = ext_from_real(L)
    family = Family.parse(family)
    if family is Family.H:
        return X ** 3 / Lx ** 4
    if family is Family.K:
        return X ** 4 / Lx ** 5
    if family is Family.L:
        return X ** 2 / Lx ** 2
    if family is Family.F:
        return X ** 2 / Lx ** 3
    if family is Family.Hn:
        m = 3 ** int(n)
        return X ** m / Lx ** (m + 1)
    if family is Family.Nr:
        return X ** int(r) / Lx ** (int(r) + 1)
    if family is Family.G:
        d = 2
    if family in (Family.G, Family.General):
        if d is None:
            raise ValueError("general error scale needs a degree d")
        return X ** int(d) / Lx ** (int(d) + 1)
    raise ValueError(f"no error scale for family {family.value}")


@dataclass(frozen=True)
class MainTermReport:
    family: Family
    x: float
    main: ExtFloat
    exact: ExtFloat
    ratio: float
    error_scale: ExtFloat

    @property
    def scaled_deviation(self) -> float:
        """(exact - main) / error_scale."""
        return float((self.exact - self.main) / self.error_scale)


def main_term_report(family, x: float, n: int | None = None, r: int | None = None,
                     counter: PrimeCounter | None = None) -> MainTermReport:
    family = Family.parse(family)
    exact = evaluate(family, x, n, r, counter).value
    main = main_term(family, x, n, r)
    ratio = float(exact / main) if not main.is_zero() else math.nan
    return MainTermReport(family, float(x), main, exact, ratio, error_scale(family, x, n, r))


def harmonic(n: int) -> float:
    """sum_{k<=n} 1/k, correctly rounded sum of the rounded terms."""
    if n < 1:
        raise ValueError("harmonic requires n >= 1")
    return math.fsum(1.0 / k for k in range(1, int(n) + 1))


def harmonic_approx(n: int) -> float:
    if n < 1:
        raise ValueError("harmonic requires n >= 1")
    return math.log(n) + GAMMA
