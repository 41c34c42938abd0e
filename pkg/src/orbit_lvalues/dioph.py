"""Finite-range scans of p-adic rational approximation to Teichmuller roots.

Two experiments: how well small fractions a/b approximate a non-rational
Teichmuller root zeta, and how many pairs (a, b) in a short box satisfy
a = zeta b mod p^(k-1) for some zeta != +-1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .padic import check_precision, check_prime, teichmuller_values, vp

INEFFECTIVE_THRESHOLD = ("finite-range evidence only: the k-thresholds in the underlying "
                         "Diophantine bounds are not computable")
SCAN_LIMIT = 10**7
_CHUNK = 1 << 20


def _nonrational_root(p: int, k: int, residue: int) -> int:
    check_prime(p)
    check_precision(k)
    r = residue % p
    if r == 0:
        raise ValueError("zeta must be a unit")
    if r in (1, p - 1):
        raise ValueError("zeta = +-1 is rational and approximates itself")
    return teichmuller_values(p, k)[r - 1]


def _centered(x: np.ndarray, m: int) -> np.ndarray:
    x = x % m
    return np.where(x > m // 2, x - m, x)


@dataclass(frozen=True)
class ApproxRecord:
    """Level j is first reached by a pair of height ``height`` = max(|a|, b)."""

    level: int
    height: int
    a: int
    b: int


@dataclass
class ApproxScan:
    p: int
    k: int
    zeta: int
    height_bound: int
    best_valuation: int
    pairs: list[tuple[int, int, int]]
    records: list[ApproxRecord]
    caveat: str = INEFFECTIVE_THRESHOLD


def best_approximations(zeta_residue: int, p: int, k: int, height_bound: int,
                        scan_limit: int = SCAN_LIMIT) -> ApproxScan:
    """All (a, b) with |a|, |b| <= H, p not | b, maximising v_p(a - b zeta) (capped at k).

    Pairs are normalised to b > 0.  For fixed b and level j the smallest
    admissible |a| is the centred residue of b zeta mod p^j, so each level is
    one vectorised pass over b.
    """
    if not 1 <= height_bound <= scan_limit:
        raise ValueError(f"height_bound must lie in [1, {scan_limit}]")
    zeta = _nonrational_root(p, k, zeta_residue)
    H = height_bound
    # b * (zeta mod p^j) must not overflow int64
    dtype = np.int64 if H * p**k < 2**62 else object
    records: list[ApproxRecord] = []
    first = {}
    for lo in range(1, H + 1, _CHUNK):
        b = np.arange(lo, min(lo + _CHUNK, H + 1), dtype=dtype)
        b = b[b % p != 0]
        for j in range(1, k + 1):
            m = p**j
            c = _centered(b * (zeta % m), m)
            h = np.maximum(b, np.abs(c))
            i = int(np.argmin(h))
            if h[i] <= H and (j not in first or h[i] < first[j][0]):
                first[j] = (int(h[i]), int(c[i]), int(b[i]))
    for j in sorted(first):
        h, a, b = first[j]
        records.append(ApproxRecord(j, h, a, b))
    best_v = max(first, default=0)
    pairs: list[tuple[int, int, int]] = []
    if best_v:
        m = p**best_v
        for lo in range(1, H + 1, _CHUNK):
            b = np.arange(lo, min(lo + _CHUNK, H + 1), dtype=dtype)
            b = b[b % p != 0]
            c = _centered(b * (zeta % m), m)
            for bi, ci in zip(b[np.abs(c) <= H], c[np.abs(c) <= H]):
                a = int(ci) - (H + int(ci)) // m * m  # smallest a >= -H in the class
                while a <= H:
                    pairs.append((a, int(bi), int(min(vp(a - int(bi) * zeta, p), k))))
                    a += m
    pairs = [t for t in pairs if t[2] == best_v]
    pairs.sort(key=lambda t: (t[1], t[0]))
    return ApproxScan(p, k, zeta, H, best_v, pairs, records)


# --- lattice geometry --------------------------------------------------------


def shortest_vector_sup(z: int, m: int) -> tuple[int, int]:
    """Shortest nonzero (x, y) in sup norm with x = y z mod m.

    Gauss-reduce the basis (m, 0), (z, 1) and search small combinations of
    the reduced basis, which always contain a sup-norm minimiser in rank 2.
    """
    u, v = (m, 0), (z % m, 1)

    def dot(s, t):
        return s[0] * t[0] + s[1] * t[1]

    if dot(u, u) < dot(v, v):
        u, v = v, u
    while dot(v, v) < dot(u, u):
        mu = round(dot(u, v) / dot(v, v)) if dot(v, v) else 0
        u = (u[0] - mu * v[0], u[1] - mu * v[1])
        u, v = v, u
    best = None
    for i in range(-3, 4):
        for j in range(-3, 4):
            if i == j == 0:
                continue
            w = (i * u[0] + j * v[0], i * u[1] + j * v[1])
            if w == (0, 0):
                continue
            n = max(abs(w[0]), abs(w[1]))
            if best is None or n < max(abs(best[0]), abs(best[1])):
                best = w
    return best


def lattice_minimum(z: int, m: int) -> int:
    x, y = shortest_vector_sup(z, m)
    return max(abs(x), abs(y))


# --- box scans ---------------------------------------------------------------


def max_box_length(p: int, k: int, delta: float) -> int:
    return math.floor((p**k) ** (0.5 - delta) + 1e-9)


@dataclass
class BoxScan:
    p: int
    k: int
    delta: float
    interval_a: tuple[int, int]  # inclusive
    interval_b: tuple[int, int]
    results: dict[int, list[tuple[int, int, int]]] = field(default_factory=dict)
    caveat: str = INEFFECTIVE_THRESHOLD

    def __post_init__(self) -> None:
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        L = max_box_length(self.p, self.k, self.delta)
        for lo, hi in (self.interval_a, self.interval_b):
            if hi < lo:
                raise ValueError("empty interval")
            if hi - lo + 1 > L:
                raise ValueError(f"interval length {hi - lo + 1} exceeds (p^k)^(1/2-delta) = {L}")

    @property
    def modulus(self) -> int:
        return self.p ** (self.k - 1)

    def zeta_classes(self) -> dict[int, int]:
        """Residue mod p -> Teichmuller root mod p^(k-1), excluding +-1."""
        roots = teichmuller_values(self.p, self.k - 1)
        return {r: roots[r - 1] for r in range(2, self.p - 1)}

    def total(self) -> int:
        return sum(len(v) for v in self.results.values())


def qualifies(a: int, b: int, p: int, k: int) -> bool:
    """The three defining congruences, checked from scratch."""
    m = p ** (k - 1)
    return (math.gcd(a * b, p) == 1
            and (a - b) % m != 0 and (a + b) % m != 0
            and (pow(a, p - 1, m) - pow(b, p - 1, m)) % m == 0)


def scan_pairs(p: int, k: int, interval_a: tuple[int, int],
               interval_b: tuple[int, int]) -> dict[int, list[tuple[int, int, int]]]:
    """Qualifying pairs in A x B per zeta class, with no restriction on the box size.

    Iterates b over B and solves a = b zeta mod p^(k-1) for each class; every
    hit is re-verified against :func:`qualifies`.
    """
    m = p ** (k - 1)
    a0, a1 = interval_a
    b = np.arange(interval_b[0], interval_b[1] + 1, dtype=object)
    b = b[b % p != 0]
    roots_k1 = teichmuller_values(p, k - 1)
    roots_k = teichmuller_values(p, k)
    out = {}
    for r in range(2, p - 1):
        z = roots_k1[r - 1]
        found = []
        first = a0 + (b * z - a0) % m
        for bi, ai in zip(b[first <= a1], first[first <= a1]):
            a = int(ai)
            while a <= a1:
                if not qualifies(a, int(bi), p, k):
                    raise ArithmeticError(f"pair ({a}, {bi}) fails re-verification")
                found.append((a, int(bi), int(min(vp(a - int(bi) * roots_k[r - 1], p), k))))
                a += m
        out[r] = found
    return out


def box_pair_count(scan: BoxScan) -> tuple[dict[int, int], int]:
    """Exhaustive qualifying-pair count per zeta class and in total."""
    scan.results = scan_pairs(scan.p, scan.k, scan.interval_a, scan.interval_b)
    counts = {r: len(v) for r, v in scan.results.items()}
    return counts, sum(counts.values())


def box_pair_count_bruteforce(scan: BoxScan) -> int:
    """O(|A||B|) oracle for :func:`box_pair_count`."""
    return sum(qualifies(a, b, scan.p, scan.k)
               for a in range(scan.interval_a[0], scan.interval_a[1] + 1)
               for b in range(scan.interval_b[0], scan.interval_b[1] + 1))


def random_boxes(p: int, k: int, delta: float, count: int, seed: int = 0,
                 length: int | None = None) -> list[BoxScan]:
    """Boxes of side ``length`` (default the maximal one) at random positions in [1, p^k]."""
    L = length or max_box_length(p, k, delta)
    rng = np.random.default_rng(seed)
    hi = p**k - L + 1
    starts = rng.integers(1, hi + 1, size=(count, 2))
    return [BoxScan(p, k, delta, (int(s), int(s) + L - 1), (int(t), int(t) + L - 1)) for s, t in starts]


def lattice_guarantee(p: int, k: int, length: int) -> bool:
    """True when every non-rational class lattice has sup-minimum > length - 1.

    Then each class holds at most one pair per box, so any box of this side
    contains at most p-3 qualifying pairs.
    """
    m = p ** (k - 1)
    roots = teichmuller_values(p, k - 1)
    return all(lattice_minimum(roots[r - 1], m) > length - 1 for r in range(2, p - 1))


CSV_COLUMNS = ("p", "k", "delta", "a_lo", "a_hi", "b_lo", "b_hi", "zeta_residue", "a", "b", "valuation")


def scan_rows(scan: BoxScan) -> list[tuple]:
    rows = []
    for r in sorted(scan.results):
        for a, b, v in scan.results[r]:
            rows.append((scan.p, scan.k, scan.delta, *scan.interval_a, *scan.interval_b, r, a, b, v))
    return rows


def rows_to_csv(rows, header=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
