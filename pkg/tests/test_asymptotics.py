import math
from fractions import Fraction

import mpmath
import pytest

from pipoly.asymptotics import (
    error_scale, harmonic, harmonic_approx, main_term, main_term_F, main_term_H, main_term_Hn,
    main_term_K, main_term_L, main_term_Nr, main_term_report,
)
from pipoly.families import GAMMA


def rel(a, b):
    return abs(float(a) / float(b) - 1)


def test_K_factor_at_special_point():
    # log x = 4e makes the bracket 1 - 1 + 3/8 - 1/16 = 5/16
    x = math.exp(4 * math.e)
    assert rel(main_term_K(x), (x / (4 * math.e)) ** 4 * 5 / 16) < 1e-13


def test_H_against_mpmath():
    with mpmath.workdps(30):
        x = mpmath.mpf(10) ** 6
        want = -3 * x ** 3 / (mpmath.e * (mpmath.log(x) - 1) ** 3)
    assert rel(main_term_H(1e6), want) < 1e-13
    with pytest.raises(ValueError):
        main_term_H(math.e)
    with pytest.raises(ValueError):
        main_term_H(1.0)


def test_L_sign_flips_at_small_n():
    assert main_term_L(1e6, 2).sign == -1  # log 2 < 1
    assert main_term_L(1e6, 3).sign == 1
    x, n = 1e8, 5
    want = x ** 2 * math.log(n) * (math.log(n) - 1) / math.log(x) ** 2
    assert rel(main_term_L(x, n), want) < 1e-13
    with pytest.raises(ValueError):
        main_term_L(1e6, 1)


def test_F_and_Hn():
    x = 1e7
    assert rel(main_term_F(x, 5), -x ** 2 * math.log(5) / math.log(x) ** 3) < 1e-13
    assert main_term_Hn(1e18, 3).log10_abs() == pytest.approx(27 * math.log10(1e18 / math.log(1e18)))


@pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
def test_Nr_odd_even_forms(r):
    x, n = 1e9, 5
    with mpmath.workdps(30):
        X, L, h = mpmath.mpf(x), mpmath.log(x), mpmath.log(n) + GAMMA
        if r % 2:
            m = (r - 1) // 2
            want = -X ** (2 * m + 2) / (mpmath.e ** (2 * m) * L ** (2 * m + 2)) * h ** (2 * m + 1)
        else:
            m = r // 2
            want = -X ** (2 * m + 1) / (mpmath.e ** (2 * m - 1) * L ** (2 * m + 1)) * h ** (2 * m)
    got = main_term_Nr(x, n, r)
    assert abs(got.log10_abs() - float(mpmath.log10(abs(want)))) < 1e-13
    assert got.sign == -1
    with pytest.raises(ValueError):
        main_term_Nr(x, n, 1)


def test_error_scales():
    x = 1e10
    L = math.log(x)
    assert rel(error_scale("H", x), x ** 3 / L ** 4) < 1e-13
    assert rel(error_scale("F", x, 5), x ** 2 / L ** 3) < 1e-13
    assert rel(error_scale("G", x), x ** 2 / L ** 3) < 1e-13
    assert rel(error_scale("General", x, d=3), x ** 3 / L ** 4) < 1e-13
    with pytest.raises(ValueError):
        error_scale("General", x)
    with pytest.raises(ValueError):
        main_term("G", x)


def test_report_fields():
    rep = main_term_report("K", 10 ** 8)
    assert rep.ratio == pytest.approx(float(rep.exact / rep.main))
    assert abs(rep.scaled_deviation) < 10


def test_harmonic():
    assert harmonic(10) == float(sum(Fraction(1, k) for k in range(1, 11)))
    assert abs(harmonic(10 ** 5) - harmonic_approx(10 ** 5)) < 1e-5
    with pytest.raises(ValueError):
        harmonic(0)
