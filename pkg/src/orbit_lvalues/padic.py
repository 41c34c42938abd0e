"""Truncated p-adic integers: residues mod p^k with exact integer arithmetic.

Everything here is exact. No floating point is used in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from sympy import isprime

MAX_PRECISION = 64

Valuation = int | float  # non-negative int, or math.inf for the zero residue


def check_prime(p: int) -> None:
    if not (isinstance(p, int) and p >= 3 and isprime(p)):
        raise ValueError(f"p must be an odd prime, got {p!r}")


def check_precision(k: int, max_k: int = MAX_PRECISION) -> None:
    if not (isinstance(k, int) and 1 <= k <= max_k):
        raise ValueError(f"precision k must satisfy 1 <= k <= {max_k}, got {k!r}")


def vp(n: int, p: int) -> Valuation:
    """p-adic valuation of an ordinary integer (math.inf for 0)."""
    if n == 0:
        return math.inf
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicInt:
    """An element of Z/p^k Z, read as a p-adic integer known to precision k."""

    p: int
    k: int
    value: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        check_precision(self.k)
        object.__setattr__(self, "value", self.value % self.p**self.k)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def _coerce(self, other: PadicInt | int) -> int:
        if isinstance(other, PadicInt):
            if (other.p, other.k) != (self.p, self.k):
                raise ValueError("p-adic operands carry different (p, k)")
            return other.value
        return int(other)

    def _new(self, v: int) -> PadicInt:
        return PadicInt(self.p, self.k, v)

    def __add__(self, other: PadicInt | int) -> PadicInt:
        return self._new(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: PadicInt | int) -> PadicInt:
        return self._new(self.value - self._coerce(other))

    def __rsub__(self, other: int) -> PadicInt:
        return self._new(int(other) - self.value)

    def __mul__(self, other: PadicInt | int) -> PadicInt:
        return self._new(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> PadicInt:
        return self._new(-self.value)

    def __pow__(self, e: int) -> PadicInt:
        if e < 0:
            return self.inverse() ** (-e)
        return self._new(pow(self.value, e, self.modulus))

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def inverse(self) -> PadicInt:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.p}^{self.k}")
        return self._new(pow(self.value, -1, self.modulus))

    def __int__(self) -> int:
        return self.value

    def centered(self) -> int:
        """Representative in (-p^k/2, p^k/2]."""
        q = self.modulus
        return self.value - q if self.value > q // 2 else self.value


def valuation(x: PadicInt) -> Valuation:
    """Largest v <= k with p^v | x, or math.inf when x is the zero residue."""
    if x.value == 0:
        return math.inf
    return vp(x.value, x.p)


@lru_cache(maxsize=None)
def _teichmuller_values(p: int, k: int) -> tuple[int, ...]:
    q = p**k
    roots = []
    for r in range(1, p):
        # x -> x^p fixes the residue class mod p and gains one digit per step
        x = r
        for _ in range(k + 1):
            y = pow(x, p, q)
            if y == x:
                break
            x = y
        else:  # pragma: no cover - convergence is guaranteed in k steps
            raise ArithmeticError("Frobenius iteration failed to converge")
        roots.append(x)
    return tuple(roots)


def teichmuller_roots(p: int, k: int) -> list[PadicInt]:
    """The p-1 roots of x^(p-1) = 1 mod p^k, ordered by their residue mod p."""
    check_prime(p)
    check_precision(k)
    return [PadicInt(p, k, v) for v in _teichmuller_values(p, k)]


def teichmuller_values(p: int, k: int) -> tuple[int, ...]:
    """Plain-integer version of :func:`teichmuller_roots` (index j <-> residue j+1)."""
    check_prime(p)
    check_precision(k)
    return _teichmuller_values(p, k)


def teichmuller_lift(x: int, p: int, k: int) -> int:
    """Teichmuller representative mod p^k of a unit x."""
    r = x % p
    if r == 0:
        raise ValueError("Teichmuller lift needs a unit")
    return _teichmuller_values(p, k)[r - 1]


def padic_log(x: PadicInt) -> PadicInt:
    """p-adic logarithm of x = 1 mod p, returned mod p^k.

    The series sum (-1)^(n+1) y^n / n, y = x - 1, is evaluated with y taken as
    an exact integer, so dividing by the p-part of n is an exact integer
    division and no precision is lost: the result is correct to the full
    precision k (log maps 1 + p^k Z_p onto p^k Z_p for odd p).
    """
    p, k = x.p, x.k
    if x.value % p != 1 % p:
        raise ValueError("padic_log is defined here only for x = 1 mod p")
    q = p**k
    y = x.value - 1
    if y == 0:
        return PadicInt(p, k, 0)
    total = 0
    n = 1
    # v(y^n / n) >= n - log_p(n), increasing in n; stop once p^(n-k) >= n
    while not (n >= k and p ** (n - k) >= n):
        vn = vp(n, p)
        num = y**n
        pk = p**vn
        unit = n // pk
        term = (num // pk) * pow(unit, -1, q)
        total += term if n % 2 else -term
        n += 1
    return PadicInt(p, k, total)


def refine_check(m: int, p: int, k: int) -> tuple[bool, bool]:
    """Return (p^k | m^p - 1, p^(k-1) | m - 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return (pow(m, p, p**k) - 1) % p**k == 0, (m - 1) % p ** (k - 1) == 0
