"""Empirical property suites: psi and residual bounds, main-term trend, G/H co-sign."""

from __future__ import annotations

from dataclasses import dataclass

from .asymptotics import main_term_report
from .families import Family
from .primes import PrimeCounter, pi_residual, psi_deviation
from .scanner import cosign_check

__all__ = ["CheckResult", "SUITES", "decade_grid", "run_suite", "MAIN_TERM_FAMILIES"]

PSI_BOUND = 1.0
RESIDUAL_BOUND = 2.0
SCALED_DEVIATION_BOUND = 10.0

#: label -> (family, n, r)
MAIN_TERM_FAMILIES: dict[str, tuple[Family, int | None, int | None]] = {
    "H": (Family.H, None, None),
    "K": (Family.K, None, None),
    "L": (Family.L, 5, None),
    "F": (Family.F, 5, None),
    "N3": (Family.Nr, 5, 3),
    "N4": (Family.Nr, 5, 4),
    "H2": (Family.Hn, 2, None),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def decade_grid(lo_exp: int, hi_exp: int) -> list[int]:
    return [10 ** k for k in range(lo_exp, hi_exp + 1)]


def psi_suite(hi_exp: int = 9, counter: PrimeCounter | None = None) -> list[CheckResult]:
    out = []
    for x in decade_grid(3, hi_exp):
        dev = psi_deviation(x)
        out.append(CheckResult(f"psi 10^{len(str(x)) - 1}", abs(dev) <= PSI_BOUND,
                               f"|psi-x|/(sqrt(x) log^2 x) = {abs(dev):.6g}"))
    return out


def residual_suite(hi_exp: int = 9, counter: PrimeCounter | None = None) -> list[CheckResult]:
    out = []
    for x in decade_grid(3, hi_exp):
        res = pi_residual(x, counter=counter)
        out.append(CheckResult(f"residual 10^{len(str(x)) - 1}", abs(res) <= RESIDUAL_BOUND,
                               f"|pi-psi/log x| log^2 x / x = {abs(res):.6g}"))
    return out


def main_term_trend(label: str, lo_exp: int = 4, hi_exp: int = 10,
                    counter: PrimeCounter | None = None) -> CheckResult:
    """Ratio to the main term must approach 1 and stay within the O(.) scale."""
    family, n, r = MAIN_TERM_FAMILIES[label]
    reports = [main_term_report(family, x, n, r, counter) for x in decade_grid(lo_exp, hi_exp)]
    first, last = abs(reports[0].ratio - 1), abs(reports[-1].ratio - 1)
    worst = max(abs(rep.scaled_deviation) for rep in reports)
    converges = last < first
    bounded = worst <= SCALED_DEVIATION_BOUND
    detail = (f"|ratio-1| {first:.4g} -> {last:.4g}"
              f" ({'shrinks' if converges else 'does not shrink'}),"
              f" max |exact-main|/scale = {worst:.4g}")
    return CheckResult(f"maintermtrend {label}", converges and bounded, detail)


def maintermtrend_suite(hi_exp: int = 10, counter: PrimeCounter | None = None) -> list[CheckResult]:
    return [main_term_trend(label, 4, hi_exp, counter) for label in MAIN_TERM_FAMILIES]


def cosign_suite(hi_exp: int = 10, counter: PrimeCounter | None = None) -> list[CheckResult]:
    rows = cosign_check(decade_grid(4, hi_exp), counter)
    return [CheckResult(f"cosign 10^{len(str(row.x)) - 1}", row.agree,
                        f"sign G = {row.sign_G}, sign H = {row.sign_H}") for row in rows]


SUITES = {
    "psi": psi_suite,
    "residual": residual_suite,
    "maintermtrend": maintermtrend_suite,
    "cosign": cosign_suite,
}


def run_suite(name: str, hi_exp: int | None = None,
              counter: PrimeCounter | None = None) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = SUITES[name]
    return fn(counter=counter) if hi_exp is None else fn(hi_exp, counter=counter)
