"""Exact sums of roots of unity.

A sum of N-th roots of unity sum_j c_j e(j/N) is an element of Z[x]/(Phi_N);
reducing the count polynomial modulo the cyclotomic polynomial Phi_N gives a
canonical integer vector of length phi(N).  Two sums are equal iff their
reduced vectors are equal, and a sum is a rational integer iff only the
constant coefficient survives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import Symbol, Poly, cyclotomic_poly, totient

_x = Symbol("x")


@lru_cache(maxsize=None)
def cyclotomic_coeffs(N: int) -> np.ndarray:
    """Coefficients of Phi_N, lowest degree first."""
    coeffs = Poly(cyclotomic_poly(N, _x), _x).all_coeffs()[::-1]
    out = np.array([int(c) for c in coeffs], dtype=np.int64)
    out.setflags(write=False)
    return out


def reduce_counts(counts: np.ndarray, N: int) -> np.ndarray:
    """Reduce rows of exponent counts (shape (R, N)) modulo Phi_N.

    Returns an int64 array of shape (R, phi(N)).
    """
    counts = np.array(counts, dtype=np.int64, copy=True)
    if counts.ndim == 1:
        return reduce_counts(counts[None, :], N)[0]
    if counts.shape[1] != N:
        raise ValueError("count rows must have length N")
    phi = cyclotomic_coeffs(N)
    D = len(phi) - 1
    nz = np.nonzero(phi[:-1])[0]
    vals = phi[nz]
    for i in range(N - 1, D - 1, -1):
        c = counts[:, i].copy()
        if not c.any():
            continue
        counts[:, i] = 0
        # x^i = x^(i-D) * x^D and x^D = -(lower terms of Phi_N)
        counts[:, i - D + nz] -= c[:, None] * vals[None, :]
    return counts[:, :D]


@dataclass(frozen=True)
class CycloElement:
    """An exact element of Z[e(1/N)] in reduced form."""

    N: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_counts(cls, counts, N: int) -> CycloElement:
        return cls(N, tuple(int(c) for c in reduce_counts(np.asarray(counts), N)))

    @classmethod
    def from_exponents(cls, exponents, N: int) -> CycloElement:
        counts = np.bincount(np.asarray(exponents, dtype=np.int64) % N, minlength=N)
        return cls.from_counts(counts, N)

    @classmethod
    def integer(cls, value: int, N: int) -> CycloElement:
        D = int(totient(N))
        return cls(N, (int(value),) + (0,) * (D - 1))

    @classmethod
    def monomial(cls, coeff: int, exponent: int, N: int) -> CycloElement:
        counts = np.zeros(N, dtype=np.int64)
        counts[exponent % N] = coeff
        return cls.from_counts(counts, N)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_integer(self) -> int | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def __complex__(self) -> complex:
        return complex(
            math.fsum(c * math.cos(2 * math.pi * j / self.N) for j, c in enumerate(self.coeffs) if c),
            math.fsum(c * math.sin(2 * math.pi * j / self.N) for j, c in enumerate(self.coeffs) if c),
        )

    def __abs__(self) -> float:
        return abs(complex(self))


def root_of_unity(num: int, den: int) -> complex:
    return cmath.exp(2j * math.pi * (num % den) / den)
