"""Extended-exponent floating point.

An :class:`ExtFloat` is ``sign * mantissa * 2**exponent2`` with a native
double mantissa normalised to ``[1, 2)`` and an unbounded Python ``int``
exponent.  Values such as ``pi(x)**27`` at ``x = 1e18`` (around ``1e442``)
stay representable with ordinary double relative precision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Union

__all__ = [
    "ExtFloat",
    "ZERO",
    "ONE",
    "ext_from_real",
    "ext_from_int",
    "ext_from_ratio",
    "ext_mul",
    "ext_add",
    "ext_sub",
    "ext_div",
    "ext_powi",
    "ext_fsum",
    "ext_to_scientific",
    "ext_parse",
]

#: exponent gap (bits) above which the smaller addend is dropped
ADD_GAP_LIMIT = 60
#: largest exponent accepted by ``ext_powi``
POWI_CAP = 1 << 20
#: decimal exponents beyond this are rejected by the parser
PARSE_EXP10_LIMIT = 10_000_000

Number = Union["ExtFloat", int, float]


@dataclass(frozen=True, slots=True)
class ExtFloat:
    sign: int
    mantissa: float
    exponent2: int

    # -- construction -------------------------------------------------------

    @staticmethod
    def _normalize(f: float, e: int) -> "ExtFloat":
        # f finite, any magnitude; result carries f * 2**e
        if f == 0.0:
            return ZERO
        m, ex = math.frexp(f)
        if m < 0:
            return ExtFloat(-1, 2.0 * -m, e + ex - 1)
        return ExtFloat(1, 2.0 * m, e + ex - 1)

    @classmethod
    def coerce(cls, v: Number) -> "ExtFloat":
        if isinstance(v, ExtFloat):
            return v
        if isinstance(v, int):
            return ext_from_int(v)
        return ext_from_real(v)

    # -- conversions --------------------------------------------------------

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.ldexp(self.mantissa, self.exponent2)
        except OverflowError:
            return self.sign * math.inf

    def is_zero(self) -> bool:
        return self.sign == 0

    def log10_abs(self) -> float:
        """Approximate ``log10 |self|``; used for plotting and estimates only."""
        if self.sign == 0:
            return -math.inf
        return math.log10(self.mantissa) + self.exponent2 * math.log10(2.0)

    def to_scientific(self, digits: int = 17) -> str:
        return ext_to_scientific(self, digits)

    def __repr__(self) -> str:
        return f"ExtFloat({ext_to_scientific(self, 17)})"

    def __str__(self) -> str:
        return ext_to_scientific(self, 17)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "ExtFloat":
        if self.sign == 0:
            return self
        return ExtFloat(-self.sign, self.mantissa, self.exponent2)

    def __abs__(self) -> "ExtFloat":
        return -self if self.sign < 0 else self

    def __add__(self, other: Number) -> "ExtFloat":
        return ext_add(self, ExtFloat.coerce(other))

    def __radd__(self, other: Number) -> "ExtFloat":
        return ext_add(ExtFloat.coerce(other), self)

    def __sub__(self, other: Number) -> "ExtFloat":
        return ext_sub(self, ExtFloat.coerce(other))

    def __rsub__(self, other: Number) -> "ExtFloat":
        return ext_sub(ExtFloat.coerce(other), self)

    def __mul__(self, other: Number) -> "ExtFloat":
        return ext_mul(self, ExtFloat.coerce(other))

    def __rmul__(self, other: Number) -> "ExtFloat":
        return ext_mul(ExtFloat.coerce(other), self)

    def __truediv__(self, other: Number) -> "ExtFloat":
        return ext_div(self, ExtFloat.coerce(other))

    def __rtruediv__(self, other: Number) -> "ExtFloat":
        return ext_div(ExtFloat.coerce(other), self)

    def __pow__(self, k: int) -> "ExtFloat":
        if not isinstance(k, int):
            return NotImplemented
        return ext_powi(self, k)

    # -- ordering -----------------------------------------------------------

    def _key(self) -> tuple:
        # total order: sign first, then magnitude (reversed for negatives)
        if self.sign == 0:
            return (0, 0, 0.0)
        if self.sign > 0:
            return (1, self.exponent2, self.mantissa)
        return (-1, -self.exponent2, -self.mantissa)

    def __lt__(self, other: Number) -> bool:
        return self._key() < ExtFloat.coerce(other)._key()

    def __le__(self, other: Number) -> bool:
        return self._key() <= ExtFloat.coerce(other)._key()

    def __gt__(self, other: Number) -> bool:
        return self._key() > ExtFloat.coerce(other)._key()

    def __ge__(self, other: Number) -> bool:
        return self._key() >= ExtFloat.coerce(other)._key()


ZERO = ExtFloat(0, 0.0, 0)
ONE = ExtFloat(1, 1.0, 0)


def ext_from_real(v: float) -> ExtFloat:
    """Exact conversion of a finite double."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot convert non-finite value {v!r} to ExtFloat")
    return ExtFloat._normalize(v, 0)


def ext_from_ratio(num: int, den: int) -> ExtFloat:
    """Correctly rounded ``num / den`` for arbitrary integers."""
    if den == 0:
        raise ZeroDivisionError("ExtFloat division by zero")
    if num == 0:
        return ZERO
    neg = (num < 0) != (den < 0)
    num, den = abs(num), abs(den)
    t = num.bit_length() - den.bit_length()
    # CPython's int / int is correctly rounded; scale the quotient into [0.5, 2)
    if t >= 0:
        f = num / (den << t)
    else:
        f = (num << -t) / den
    r = ExtFloat._normalize(f, t)
    return -r if neg else r


def ext_from_int(n: int) -> ExtFloat:
    if -(1 << 53) <= n <= (1 << 53):
        return ExtFloat._normalize(float(n), 0)
    return ext_from_ratio(n, 1)


def ext_mul(a: ExtFloat, b: ExtFloat) -> ExtFloat:
    if a.sign == 0 or b.sign == 0:
        return ZERO
    return ExtFloat._normalize(a.sign * b.sign * (a.mantissa * b.mantissa),
                               a.exponent2 + b.exponent2)


def ext_div(a: ExtFloat, b: ExtFloat) -> ExtFloat:
    if b.sign == 0:
        raise ZeroDivisionError("ExtFloat division by zero")
    if a.sign == 0:
        return ZERO
    return ExtFloat._normalize(a.sign * b.sign * (a.mantissa / b.mantissa),
                               a.exponent2 - b.exponent2)


def ext_add(a: ExtFloat, b: ExtFloat) -> ExtFloat:
    if b.sign == 0:
        return a
    if a.sign == 0:
        return b
    if a.exponent2 < b.exponent2:
        a, b = b, a
    gap = a.exponent2 - b.exponent2
    if gap > ADD_GAP_LIMIT:
        return a
    s = a.sign * a.mantissa + b.sign * math.ldexp(b.mantissa, -gap)
    return ExtFloat._normalize(s, a.exponent2)


def ext_sub(a: ExtFloat, b: ExtFloat) -> ExtFloat:
    return ext_add(a, -b)


def ext_powi(a: ExtFloat, k: int) -> ExtFloat:
    """``a**k`` by square-and-multiply, ``0 <= k <= 2**20``."""
    if k < 0 or k > POWI_CAP:
        raise ValueError(f"exponent {k} outside [0, {POWI_CAP}]")
    result = ONE
    base = a
    while k:
        if k & 1:
            result = ext_mul(result, base)
        k >>= 1
        if k:
            base = ext_mul(base, base)
    return result


def ext_fsum(values: Iterable[ExtFloat]) -> ExtFloat:
    """Sum with compensation when every addend fits a double, else sequentially."""
    vals = list(values)
    if all(v.sign == 0 or -1000 < v.exponent2 < 1000 for v in vals):
        return ext_from_real(math.fsum(float(v) for v in vals))
    acc = ZERO
    for v in vals:
        acc = ext_add(acc, v)
    return acc


# -- decimal text ---------------------------------------------------------

_LOG10_2 = math.log10(2.0)


def _exact_parts(a: ExtFloat) -> tuple[int, int]:
    """Return (M, E) with |a| == M * 2**E exactly."""
    return int(math.ldexp(a.mantissa, 52)), a.exponent2 - 52


def _scaled_round(M: int, E: int, p: int) -> int:
    # round-half-even of M * 2**E / 10**p
    num = M << E if E >= 0 else M
    den = 1 << -E if E < 0 else 1
    if p >= 0:
        den *= 10 ** p
    else:
        num *= 10 ** -p
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def ext_to_scientific(a: ExtFloat, digits: int = 17) -> str:
    """Render as ``[-]d.ddd...e<exp>`` with round-half-even to ``digits`` figures."""
    if not 1 <= digits <= 17:
        raise ValueError("digits must lie in [1, 17]")
    if a.sign == 0:
        return "0"
    M, E = _exact_parts(a)
    d = math.floor(math.log10(a.mantissa) + a.exponent2 * _LOG10_2)
    for _ in range(4):
        q = _scaled_round(M, E, d - digits + 1)
        if q >= 10 ** digits:
            d += 1
        elif q < 10 ** (digits - 1):
            d -= 1
        else:
            break
    s = str(q)
    body = s[0] + ("." + s[1:] if digits > 1 else "")
    return f"{'-' if a.sign < 0 else ''}{body}e{d}"


_SCI_RE = re.compile(
    r"""^\s*(?P<sign>[-+−])?\s*
        (?P<int>\d[\d,]*)(?:\.(?P<frac>\d*))?
        (?:\s*(?:[eE](?P<exp>[-+−]?\d+)
             |[x×\*]\s*10\s*\^\s*\{?(?P<exp10>[-+−]?\d+)\}?))?
        \s*$""",
    re.VERBOSE,
)


def ext_parse(text: str) -> ExtFloat:
    """Parse decimal text, correctly rounded.

    Accepts ``-4.82e8``, typeset ``−4.822952515086 × 10^8`` and
    thousands separators (``-377,275.135``).
    """
    m = _SCI_RE.match(text)
    if m is None:
        raise ValueError(f"not a decimal number: {text!r}")
    int_part = m["int"].replace(",", "")
    frac = m["frac"] or ""
    exp_txt = m["exp"] if m["exp"] is not None else m["exp10"]
    exp10 = int(exp_txt.replace("−", "-")) if exp_txt else 0
    if abs(exp10) > PARSE_EXP10_LIMIT:
        raise ValueError(f"decimal exponent out of range in {text!r}")
    digits = int(int_part + frac)
    exp10 -= len(frac)
    if exp10 >= 0:
        r = ext_from_int(digits * 10 ** exp10)
    else:
        r = ext_from_ratio(digits, 10 ** -exp10)
    if m["sign"] in ("-", "−"):
        r = -r
    return r
