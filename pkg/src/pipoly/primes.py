"""Exact prime counting, Chebyshev functions and the persistent pi(x) cache."""

from __future__ import annotations

import math
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Sequence

import mpmath
import numpy as np

__all__ = [
    "PI_HARD_CAP",
    "PSI_CAP",
    "SIEVE_MAX",
    "PrimeCountCache",
    "PrimeCounter",
    "ChebyshevResult",
    "sieve_primes",
    "segmented_primes",
    "segmented_count",
    "lucy_prime_count",
    "lucy_tables",
    "prime_count",
    "prime_count_batch",
    "default_counter",
    "set_default_counter",
    "mangoldt",
    "chebyshev",
    "psi_deviation",
    "psi_deviation_linear",
    "pi_residual",
    "iroot",
]

PI_HARD_CAP = 10 ** 13
PSI_CAP = 10 ** 10
SIEVE_MAX = 10 ** 9
DEFAULT_SIEVE_LIMIT = 10 ** 7
SEGMENT = 1 << 22

CACHE_MAGIC = b"PIPOLY01"


# -- sieving --------------------------------------------------------------

def sieve_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` as an ascending int64 array (odd-only sieve)."""
    limit = int(limit)
    if limit < 2 or limit > SIEVE_MAX:
        raise ValueError(f"sieve limit {limit} outside [2, {SIEVE_MAX}]")
    # index i stands for 2*i + 1
    size = (limit - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), primes))


def segmented_primes(lo: int, hi: int, base: np.ndarray | None = None,
                     segment: int = SEGMENT) -> Iterator[np.ndarray]:
    """Yield primes in ``[lo, hi]`` block by block."""
    lo = max(int(lo), 2)
    hi = int(hi)
    if hi < lo:
        return
    root = math.isqrt(hi)
    if base is None:
        base = sieve_primes(max(root, 2))
    base = base[base <= root]
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        block = np.ones(stop - start, dtype=bool)
        for p in base.tolist():
            pp = p * p
            if pp >= stop:
                break
            first = max(pp, -(-start // p) * p)
            block[first - start::p] = False
        yield np.flatnonzero(block).astype(np.int64) + start
        start = stop


def segmented_count(x: int) -> int:
    """pi(x) by plain segmented sieving; the reference for the sublinear path."""
    x = int(x)
    if x < 2:
        return 0
    return sum(int(b.size) for b in segmented_primes(2, x))


def iroot(x: int, m: int) -> int:
    """floor(x ** (1/m)) for integers."""
    if x < 2 or m == 1:
        return x
    r = int(round(x ** (1.0 / m)))
    while r ** m > x:
        r -= 1
    while (r + 1) ** m <= x:
        r += 1
    return r


# -- sublinear counting -----------------------------------------------------

def lucy_tables(x: int) -> tuple[np.ndarray, np.ndarray]:
    """Lucy_Hedgehog prime-count recursion, O(x**(3/4)) work.

    Returns ``(small, large)`` with ``small[v] = pi(v)`` for ``v <= sqrt(x)``
    and ``large[i] = pi(x // i)`` for ``1 <= i <= sqrt(x)``.  During the
    sweep they hold the count S of integers in [2, v] with no prime factor
    below p; each sieving prime p removes the p-smooth composites from every S(v)
    with v >= p*p.  Updates read the pre-step values, so the vector
    assignments below are safe (numpy materialises the right-hand side).
    """
    x = int(x)
    r = math.isqrt(x)
    small = np.arange(-1, r, dtype=np.int64)
    small[0] = 0
    large = np.zeros(r + 1, dtype=np.int64)
    idx = np.arange(1, r + 1, dtype=np.int64)
    large[1:] = x // idx - 1
    for p in sieve_primes(r).tolist() if r >= 2 else ():
        sp = int(small[p - 1])
        p2 = p * p
        lim = min(r, x // p2)
        b = min(lim, r // p)
        if b >= 1:
            large[1:b + 1] -= large[p:b * p + 1:p] - sp
        if lim > b:
            i = idx[b:lim]
            large[b + 1:lim + 1] -= small[x // (i * p)] - sp
        if p2 <= r:
            j = np.arange(p2, r + 1, dtype=np.int64)
            small[p2:] -= small[j // p] - sp
    return small, large


def lucy_prime_count(x: int) -> int:
    """pi(x) by the sublinear recursion of :func:`lucy_tables`."""
    x = int(x)
    if x < 2:
        return 0
    return int(lucy_tables(x)[1][1])


# -- cache ------------------------------------------------------------------

class PrimeCountCache:
    """Ordered store of exact pi(x) values with an optional binary backing file.

    File layout: magic ``PIPOLY01``, little-endian u64 pair count, then
    ``(u64 x, u64 pi)`` pairs sorted by x.
    """

    def __init__(self, storage_path: str | Path | None = None):
        self.storage_path = Path(storage_path) if storage_path else None
        self._entries: dict[int, int] = {}
        self._lock = threading.Lock()
        if self.storage_path is not None and self.storage_path.exists():
            self.load(self.storage_path)

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, x: int) -> int | None:
        return self._entries.get(x)

    def put(self, x: int, value: int) -> None:
        with self._lock:
            self._entries[x] = value

    def entries(self) -> list[tuple[int, int]]:
        with self._lock:
            return sorted(self._entries.items())

    def save(self, path: str | Path | None = None) -> None:
        path = Path(path) if path else self.storage_path
        if path is None:
            raise ValueError("no storage path configured for the pi cache")
        items = self.entries()
        buf = bytearray(CACHE_MAGIC)
        buf += struct.pack("<Q", len(items))
        for x, v in items:
            buf += struct.pack("<QQ", x, v)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(bytes(buf))
        tmp.replace(path)

    def load(self, path: str | Path) -> None:
        data = Path(path).read_bytes()
        if data[:8] != CACHE_MAGIC:
            raise ValueError(f"{path}: not a pi cache file (bad magic)")
        (count,) = struct.unpack_from("<Q", data, 8)
        if len(data) != 16 + 16 * count:
            raise ValueError(f"{path}: truncated pi cache file")
        with self._lock:
            for k in range(count):
                x, v = struct.unpack_from("<QQ", data, 16 + 16 * k)
                self._entries[x] = v


# -- counter ----------------------------------------------------------------

# |v - nearest int| below this (relative + absolute) triggers a high-precision redo
_GUARD_REL = 1e-12
_GUARD_ABS = 1e-9


class PrimeCounter:
    """pi(x) for real x, with floor (default) or round-to-nearest argument mode.

    Arguments up to ``sieve_limit`` are answered from an in-memory prime
    table; larger ones go through :func:`lucy_prime_count` and are cached.
    """

    def __init__(self, cache: PrimeCountCache | None = None, *,
                 sieve_limit: int = DEFAULT_SIEVE_LIMIT,
                 hard_cap: int = PI_HARD_CAP, rounding: str = "floor"):
        if rounding not in ("floor", "round"):
            raise ValueError(f"unknown rounding mode {rounding!r}")
        self.cache = cache if cache is not None else PrimeCountCache()
        self.sieve_limit = int(sieve_limit)
        self.hard_cap = int(hard_cap)
        self.rounding = rounding
        self._primes: np.ndarray | None = None
        self._build_lock = threading.Lock()

    def with_rounding(self, rounding: str) -> "PrimeCounter":
        """A counter sharing this one's cache and prime table but rounding differently."""
        other = PrimeCounter(self.cache, sieve_limit=self.sieve_limit,
                             hard_cap=self.hard_cap, rounding=rounding)
        other._primes = self._primes
        return other

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            with self._build_lock:
                if self._primes is None:
                    self._primes = sieve_primes(self.sieve_limit)
        return self._primes

    def _check(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"prime count argument {n} is negative")
        if n > self.hard_cap:
            raise ValueError(f"prime count argument {n} exceeds the exact-pi cap {self.hard_cap}")

    def count_int(self, n: int) -> int:
        self._check(n)
        if n < 2:
            return 0
        if n <= self.sieve_limit:
            return int(np.searchsorted(self.primes, n, side="right"))
        hit = self.cache.get(n)
        if hit is not None:
            return hit
        value = lucy_prime_count(n)
        self.cache.put(n, value)
        return value

    def to_int(self, v: float, exact: Callable[[], mpmath.mpf] | None = None) -> int:
        """Map a real argument to the integer pi is evaluated at.

        ``exact`` recomputes the argument in extended precision; it is used
        when the double ``v`` is too close to a rounding boundary to trust.
        """
        if not math.isfinite(v):
            raise ValueError(f"prime count argument {v!r} is not finite")
        target = v + 0.5 if self.rounding == "round" else v
        nearest = round(target)
        if abs(target - nearest) <= max(_GUARD_ABS, _GUARD_REL * abs(target)):
            if exact is not None:
                with mpmath.workdps(60):
                    t = exact()
                    if self.rounding == "round":
                        t += mpmath.mpf(1) / 2
                    return int(mpmath.floor(t))
            return math.floor(target)
        return math.floor(target)

    def __call__(self, x: float | int, exact: Callable[[], mpmath.mpf] | None = None) -> int:
        if isinstance(x, int):
            n = x
        else:
            n = self.to_int(float(x), exact)
        if n < 0:
            raise ValueError(f"prime count argument {x} is negative")
        return self.count_int(n)

    def batch(self, xs: Sequence[float | int]) -> list[int]:
        """Element-wise pi with shared work.

        One sublinear run at the largest outstanding argument X also yields
        pi(X // i) for every i <= sqrt(X); queries hitting those values are
        answered from it.
        """
        ns = [x if isinstance(x, int) else self.to_int(float(x)) for x in xs]
        for n in ns:
            self._check(n)
        out: dict[int, int] = {}
        pending = set()
        for n in set(ns):
            if n < 2:
                out[n] = 0
            elif n <= self.sieve_limit:
                out[n] = int(np.searchsorted(self.primes, n, side="right"))
            elif (hit := self.cache.get(n)) is not None:
                out[n] = hit
            else:
                pending.add(n)
        while pending:
            X = max(pending)
            _, large = lucy_tables(X)
            for n in list(pending):
                i = X // n
                if i <= math.isqrt(X) and X // i == n:
                    out[n] = int(large[i])
                    self.cache.put(n, out[n])
                    pending.discard(n)
        return [out[n] for n in ns]


_default_counter: PrimeCounter | None = None
_default_lock = threading.Lock()


def default_counter() -> PrimeCounter:
    global _default_counter
    with _default_lock:
        if _default_counter is None:
            _default_counter = PrimeCounter()
        return _default_counter


def set_default_counter(counter: PrimeCounter) -> None:
    global _default_counter
    with _default_lock:
        _default_counter = counter


def prime_count(x: float | int) -> int:
    """pi(floor(x)), exact."""
    return default_counter()(x)


def prime_count_batch(xs: Sequence[float | int]) -> list[int]:
    return default_counter().batch(xs)


# -- von Mangoldt and Chebyshev ---------------------------------------------

def mangoldt(n: int) -> float:
    """Lambda(n): log p if n is a power of the prime p, else 0."""
    n = int(n)
    if n < 1:
        raise ValueError("mangoldt is defined for n >= 1")
    if n == 1:
        return 0.0
    p = None
    if n % 2 == 0:
        p = 2
    else:
        f = 3
        while f * f <= n:
            if n % f == 0:
                p = f
                break
            f += 2
        if p is None:
            return math.log(n)
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


@dataclass(frozen=True)
class ChebyshevResult:
    x: int
    psi: float
    theta: float
    term_count: int


def _theta_from_primes(primes: np.ndarray) -> float:
    return float(np.log(primes.astype(np.float64)).sum()) if primes.size else 0.0


def chebyshev(x: int, cap: int = PSI_CAP) -> ChebyshevResult:
    """psi(x) and theta(x) by sieving.

    theta is summed pairwise inside each sieve block and the block sums are
    combined with ``math.fsum``; psi adds theta(x**(1/m)) for m >= 2.
    """
    x = int(x)
    if x < 1 or x > cap:
        raise ValueError(f"chebyshev argument {x} outside [1, {cap}]")
    if x < 2:
        return ChebyshevResult(x, 0.0, 0.0, 0)
    root = math.isqrt(x)
    base = sieve_primes(max(root, 2))
    parts = []
    count = 0
    for block in segmented_primes(2, x, base):
        parts.append(_theta_from_primes(block))
        count += int(block.size)
    theta = math.fsum(parts)
    psi_parts = [theta]
    m = 2
    while (1 << m) <= x:
        rm = iroot(x, m)
        below = base[: int(np.searchsorted(base, rm, side="right"))]
        psi_parts.append(_theta_from_primes(below))
        count += int(below.size)
        m += 1
    return ChebyshevResult(x, math.fsum(psi_parts), theta, count)


def psi_deviation(x: int, cap: int = PSI_CAP) -> float:
    """(psi(x) - x) / (sqrt(x) (log x)**2)."""
    x = int(x)
    if x < 2:
        raise ValueError("psi_deviation requires x >= 2")
    L = math.log(x)
    return (chebyshev(x, cap).psi - x) / (math.sqrt(x) * L * L)


def psi_deviation_linear(x: int, cap: int = PSI_CAP) -> float:
    """(psi(x) - x) / (x (log x)**2), the normalisation with a linear prefactor."""
    x = int(x)
    if x < 2:
        raise ValueError("psi_deviation requires x >= 2")
    L = math.log(x)
    return (chebyshev(x, cap).psi - x) / (x * L * L)


def pi_residual(x: int, cap: int = PSI_CAP, counter: PrimeCounter | None = None) -> float:
    """(pi(x) - psi(x)/log x) * (log x)**2 / x."""
    x = int(x)
    if x < 2 or x > cap:
        raise ValueError(f"pi_residual argument {x} outside [2, {cap}]")
    counter = counter or default_counter()
    L = math.log(x)
    return (counter(x) - chebyshev(x, cap).psi / L) * L * L / x
