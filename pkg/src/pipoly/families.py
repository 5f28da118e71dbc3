"""Exact evaluators for the named inequality families.

Every evaluator composes its terms with :class:`~pipoly.numerics.ExtFloat`
operations in the same left-to-right order as the matching DSL text in
:data:`FAMILY_DSL`, so the native and parsed routes agree bit for bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath

from .numerics import ExtFloat, ZERO, ext_from_int, ext_from_real, ext_fsum
from .primes import PrimeCounter, default_counter

__all__ = [
    "E",
    "GAMMA",
    "Family",
    "FamilyEval",
    "HassaniResult",
    "FAMILY_DSL",
    "family_dsl",
    "family_minimum",
    "eval_G",
    "eval_H",
    "eval_K",
    "eval_L",
    "eval_F",
    "eval_Hn",
    "eval_Nr",
    "eval_hassani",
    "evaluate",
]

E = 2.718281828459045
GAMMA = 0.5772156649015329

_E = ext_from_real(E)


class Family(str, enum.Enum):
    G = "G"
    H = "H"
    K = "K"
    L = "L"
    F = "F"
    Hn = "Hn"
    Nr = "Nr"
    Hassani = "Hassani"
    General = "General"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        for f in cls:
            if f.value.lower() == str(name).lower():
                return f
        raise ValueError(f"unknown family {name!r}")


@dataclass(frozen=True)
class FamilyEval:
    family: Family
    x: float
    value: ExtFloat
    terms: tuple[tuple[str, ExtFloat], ...] = field(default=())
    n: int | None = None
    r: int | None = None

    @property
    def sign(self) -> int:
        return self.value.sign


@dataclass(frozen=True)
class HassaniResult:
    x: float
    lower: ExtFloat
    middle: ExtFloat
    upper: ExtFloat
    holds: tuple[bool, bool]


FAMILY_DSL = {
    Family.G: "pi(x)^2 - e*x/log(x)*pi(x/e)",
    Family.H: "pi(x)^3 - 3*e*x/log(x)*pi(x/e)^2 + 3*e^2*x/log(x)^2*pi(x/e^2)",
    Family.K: ("pi(x)^4 - 4*e*x/log(x)*pi(x/e)^3 + 6*e^2*x/log(x)^2*pi(x/e^2)^2"
               " - 4*e^3*x/log(x)^3*pi(x/e^3)"),
    Family.L: "sum(k, 1, n, pi(x/k))^2 - e*x/log(x)*sum(k, 1, n, pi(x/(e*k)))",
    Family.F: ("sum(k, 1, n, pi(x/k)/log(x/k))^2"
               " - e*x/log(x)*sum(k, 1, n, pi(x/(e*k))/log(x/(e*k)))"),
    Family.Hn: ("pi(x)^{a} - 3*e*x/log(x)*pi(x/e)^{b}"
                " + 3*e^2*x/log(x)^2*pi(x/e^2)^{c}"),
    Family.Nr: ("sum(k, 1, n, pi(x/k))^{r} - e*x/log(x)*sum(k, 1, n, pi(x/(e*k)))^{r}"
                " + sum(k, 1, n, pi(x/(e^2*k)))^{r}"),
}


def family_dsl(family: "str | Family", n: int | None = None, r: int | None = None) -> str:
    """DSL text equivalent to a native family; ``n`` for Hn, ``r`` for Nr are baked in."""
    family = Family.parse(family)
    if family not in FAMILY_DSL:
        raise ValueError(f"no DSL text for family {family.value}")
    text = FAMILY_DSL[family]
    if family is Family.Hn:
        m = 3 ** _need(n, "n")
        text = text.format(a=m, b=m - 1, c=m - 2)
    elif family is Family.Nr:
        text = text.format(r=_need(r, "r"))
    return text


def _need(v, name):
    if v is None:
        raise ValueError(f"parameter {name} is required")
    return int(v)


def family_minimum(family: "str | Family", n: int | None = None) -> float:
    """Smallest admissible x for a family (parameters as given)."""
    family = Family.parse(family)
    if family in (Family.G, Family.Hassani):
        return E
    if family in (Family.H, Family.Hn):
        return E * E
    if family is Family.K:
        return E ** 3
    if family in (Family.L, Family.F):
        return E * _need(n, "n")
    if family is Family.Nr:
        return E * E * _need(n, "n")
    return 0.0


class _Point:
    """Shared pieces of an evaluation at x: X, log x and a pi hook."""

    def __init__(self, x: float, counter: PrimeCounter | None):
        self.x = float(x)
        if not math.isfinite(self.x):
            raise ValueError(f"x must be finite, got {x!r}")
        self.X = ext_from_real(self.x)
        self.counter = counter or default_counter()

    def log(self, v: ExtFloat) -> ExtFloat:
        f = float(v)
        if f <= 0:
            raise ValueError(f"log of non-positive value {f!r}")
        return ext_from_real(math.log(f))

    def pi(self, arg: ExtFloat, e_power: int = 0, k: int = 1) -> ExtFloat:
        """pi of ``arg``, which is ``x / (e**e_power * k)`` as composed by the caller."""
        x = self.x

        def exact():
            return mpmath.mpf(x) / (mpmath.e ** e_power * k)

        f = float(arg)
        if f <= 0:
            raise ValueError(f"prime count argument {f!r} is not positive")
        return ext_from_int(self.counter(f, exact))

    @property
    def LOG(self) -> ExtFloat:
        return self.log(self.X)


def _check_min(family: Family, x: float, minimum: float, strict: bool = False) -> None:
    if x < minimum or (strict and x == minimum):
        raise ValueError(f"{family.value}: x = {x!r} is below the family minimum {minimum!r}")


def _result(family, pt, terms, n=None, r=None) -> FamilyEval:
    value = ZERO
    for _, t in terms:
        value = value + t
    return FamilyEval(family, pt.x, value, tuple(terms), n, r)


def eval_G(x: float, counter: PrimeCounter | None = None) -> FamilyEval:
    """pi(x)^2 - (e x / log x) pi(x/e)."""
    _check_min(Family.G, float(x), E)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = pt.pi(X) ** 2
    t2 = _E * X / LOG * pt.pi(X / _E, 1)
    return _result(Family.G, pt, [("pi(x)^2", t1), ("-(e x/log x) pi(x/e)", -t2)])


def _cubic_like(family: Family, x: float, m: int, counter, n=None) -> FamilyEval:
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = pt.pi(X) ** m
    t2 = 3 * _E * X / LOG * pt.pi(X / _E, 1) ** (m - 1)
    t3 = 3 * _E ** 2 * X / LOG ** 2 * pt.pi(X / _E ** 2, 2) ** (m - 2)
    return _result(family, pt, [
        (f"pi(x)^{m}", t1),
        (f"-(3e x/log x) pi(x/e)^{m - 1}", -t2),
        (f"(3e^2 x/log^2 x) pi(x/e^2)^{m - 2}", t3),
    ], n=n)


def eval_H(x: float, counter: PrimeCounter | None = None) -> FamilyEval:
    """Cubic form pi(x)^3 - (3ex/log x) pi(x/e)^2 + (3e^2 x/log^2 x) pi(x/e^2)."""
    _check_min(Family.H, float(x), E * E)
    return _cubic_like(Family.H, x, 3, counter)


def eval_Hn(x: float, n: int, counter: PrimeCounter | None = None) -> FamilyEval:
    """Cubic form with exponents 3^n, 3^n - 1, 3^n - 2."""
    n = int(n)
    if n < 1:
        raise ValueError("Hn requires n >= 1")
    if 3 ** n > (1 << 20):
        raise ValueError(f"Hn: 3^{n} exceeds the power cap")
    _check_min(Family.Hn, float(x), E * E)
    return _cubic_like(Family.Hn, x, 3 ** n, counter, n=n)


def eval_K(x: float, counter: PrimeCounter | None = None) -> FamilyEval:
    """Quartic form with binomial weights 1, 4, 6, 4."""
    _check_min(Family.K, float(x), E ** 3)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = pt.pi(X) ** 4
    t2 = 4 * _E * X / LOG * pt.pi(X / _E, 1) ** 3
    t3 = 6 * _E ** 2 * X / LOG ** 2 * pt.pi(X / _E ** 2, 2) ** 2
    t4 = 4 * _E ** 3 * X / LOG ** 3 * pt.pi(X / _E ** 3, 3)
    return _result(Family.K, pt, [
        ("pi(x)^4", t1),
        ("-(4e x/log x) pi(x/e)^3", -t2),
        ("(6e^2 x/log^2 x) pi(x/e^2)^2", t3),
        ("-(4e^3 x/log^3 x) pi(x/e^3)", -t4),
    ])


def _check_sum_params(family: Family, x: float, n: int, e_power: int, strict=False) -> int:
    n = int(n)
    if n <= 1:
        raise ValueError(f"{family.value} requires n > 1")
    _check_min(family, float(x), E ** e_power * n, strict)
    return n


def _pi_sum(pt: _Point, n: int, e_power: int, log_weight: bool = False) -> ExtFloat:
    X = pt.X
    parts = []
    for k in range(1, n + 1):
        K = ext_from_int(k)
        if e_power == 0:
            arg = X / K
        elif e_power == 1:
            arg = X / (_E * K)
        else:
            arg = X / (_E ** e_power * K)
        p = pt.pi(arg, e_power, k)
        parts.append(p / pt.log(arg) if log_weight else p)
    return ext_fsum(parts)


def eval_L(x: float, n: int, counter: PrimeCounter | None = None) -> FamilyEval:
    """(sum pi(x/k))^2 - (ex/log x) sum pi(x/(ek)), k = 1..n."""
    n = _check_sum_params(Family.L, x, n, 1)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = _pi_sum(pt, n, 0) ** 2
    t2 = _E * X / LOG * _pi_sum(pt, n, 1)
    return _result(Family.L, pt, [
        ("(sum pi(x/k))^2", t1), ("-(e x/log x) sum pi(x/(ek))", -t2)], n=n)


def eval_F(x: float, n: int, counter: PrimeCounter | None = None) -> FamilyEval:
    """Logarithmically weighted version of :func:`eval_L`."""
    n = _check_sum_params(Family.F, x, n, 1, strict=True)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = _pi_sum(pt, n, 0, log_weight=True) ** 2
    t2 = _E * X / LOG * _pi_sum(pt, n, 1, log_weight=True)
    return _result(Family.F, pt, [
        ("(sum pi(x/k)/log(x/k))^2", t1),
        ("-(e x/log x) sum pi(x/(ek))/log(x/(ek))", -t2)], n=n)


def eval_Nr(x: float, n: int, r: int, counter: PrimeCounter | None = None) -> FamilyEval:
    """(sum pi(x/k))^r - (ex/log x)(sum pi(x/(ek)))^r + (sum pi(x/(e^2 k)))^r."""
    r = int(r)
    if r <= 1:
        raise ValueError("Nr requires r > 1")
    n = _check_sum_params(Family.Nr, x, n, 2)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    t1 = _pi_sum(pt, n, 0) ** r
    t2 = _E * X / LOG * _pi_sum(pt, n, 1) ** r
    t3 = _pi_sum(pt, n, 2) ** r
    return _result(Family.Nr, pt, [
        (f"(sum pi(x/k))^{r}", t1),
        (f"-(e x/log x)(sum pi(x/(ek)))^{r}", -t2),
        (f"(sum pi(x/(e^2 k)))^{r}", t3)], n=n, r=r)


def eval_hassani(x: float, counter: PrimeCounter | None = None) -> HassaniResult:
    """(sqrt(e) x/log x)^2 pi(x/e) < pi(x)^3 < (e^2 x/log x) pi(x/e)^2."""
    _check_min(Family.Hassani, float(x), E)
    pt = _Point(x, counter)
    X, LOG = pt.X, pt.LOG
    p_e = pt.pi(X / _E, 1)
    lower = (ext_from_real(math.sqrt(E)) * X / LOG) ** 2 * p_e
    middle = pt.pi(X) ** 3
    upper = _E ** 2 * X / LOG * p_e ** 2
    return HassaniResult(pt.x, lower, middle, upper, (lower < middle, middle < upper))


def evaluate(family, x: float, n: int | None = None, r: int | None = None,
             counter: PrimeCounter | None = None) -> FamilyEval:
    """Dispatch on a family name, or evaluate a parsed general spec."""
    from .expression import GeneralSpec, eval_spec

    if isinstance(family, GeneralSpec):
        value = eval_spec(family, x, n, counter=counter)
        return FamilyEval(Family.General, float(x), value, (("spec", value),), n, r)
    family = Family.parse(family)
    if family is Family.G:
        return eval_G(x, counter)
    if family is Family.H:
        return eval_H(x, counter)
    if family is Family.K:
        return eval_K(x, counter)
    if family is Family.L:
        return eval_L(x, _need(n, "n"), counter)
    if family is Family.F:
        return eval_F(x, _need(n, "n"), counter)
    if family is Family.Hn:
        return eval_Hn(x, _need(n, "n"), counter)
    if family is Family.Nr:
        return eval_Nr(x, _need(n, "n"), _need(r, "r"), counter)
    raise ValueError(f"family {family.value} has no single-valued evaluator")
