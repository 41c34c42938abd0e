"""Galois orbits and thin Galois orbits of primitive characters mod p^k.

An orbit is stored as a sorted tuple of gamma exponents.  A full orbit is the
set of primitive characters of order p^(k-1) d with d | p-1; a thin orbit
O_kappa around a base character is the set of chi in the full orbit with
order(chi * conj(base)) | p^kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import divisors, mobius, totient

from .characters import DirichletCharacter, UnitGroup, unit_group
from .cyclo import CycloElement, reduce_counts
from .padic import teichmuller_values


@dataclass(frozen=True)
class OrbitSpec:
    group: UnitGroup
    d: int
    gammas: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def k(self) -> int:
        return self.group.k

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def order(self) -> int:
        return self.group.p ** (self.group.k - 1) * self.d

    @property
    def members(self) -> list[DirichletCharacter]:
        return [DirichletCharacter(self.group, g) for g in self.gammas]

    @property
    def iota(self) -> int:
        return self.members[0].iota

    def __len__(self) -> int:
        return len(self.gammas)

    def describe(self) -> dict:
        return {"kind": "full", "p": self.p, "k": self.k, "d": self.d}


@dataclass(frozen=True)
class ThinOrbitSpec:
    base: DirichletCharacter
    kappa: int
    gammas: tuple[int, ...] = field(repr=False)

    @property
    def group(self) -> UnitGroup:
        return self.base.group

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def k(self) -> int:
        return self.group.k

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def d(self) -> int:
        return self.base.order // self.p ** (self.k - 1)

    @property
    def members(self) -> list[DirichletCharacter]:
        return [DirichletCharacter(self.group, g) for g in self.gammas]

    @property
    def iota(self) -> int:
        return self.base.iota

    @property
    def kappa_tilde(self) -> int:
        return min(self.kappa, self.k - 2)

    def __len__(self) -> int:
        return len(self.gammas)

    def describe(self) -> dict:
        return {"kind": "thin", "p": self.p, "k": self.k, "d": self.d,
                "kappa": self.kappa, "base_gamma": self.base.gamma}


Orbit = OrbitSpec | ThinOrbitSpec


def orbit_size(p: int, k: int, d: int) -> int:
    return int(totient(p ** (k - 1) * d))


def thin_orbit_size(p: int, k: int, kappa: int) -> int:
    return p**kappa if kappa < k - 1 else int(totient(p ** (k - 1)))


def galois_act(chi: DirichletCharacter, a: int) -> DirichletCharacter:
    """chi^sigma for sigma: xi -> xi^a."""
    phi = chi.group.phi
    if math.gcd(a, phi) != 1:
        raise ValueError(f"a={a} is not coprime to phi(q)={phi}")
    return DirichletCharacter(chi.group, a * chi.gamma)


def orbit_divisors(p: int, k: int) -> list[int]:
    """The d | p-1 that index orbits of primitive characters mod p^k."""
    ds = [int(d) for d in divisors(p - 1)]
    return [d for d in ds if d > 1] if k == 1 else ds


def enumerate_orbit(p: int, k: int, d: int, group: UnitGroup | None = None) -> OrbitSpec:
    if (p - 1) % d:
        raise ValueError(f"d={d} does not divide p-1={p - 1}")
    if k == 1 and d == 1:
        raise ValueError("the principal character mod p is not primitive")
    group = group or unit_group(p, k)
    phi = group.phi
    order = p ** (k - 1) * d
    step = phi // order
    # characters of exact order `order` are gamma = step * u with gcd(u, order) = 1
    gammas = tuple(step * u for u in range(order) if math.gcd(u, order) == 1)
    return OrbitSpec(group, d, gammas)


def full_orbit_of(chi: DirichletCharacter) -> OrbitSpec:
    d = chi.order // chi.p ** (chi.k - 1)
    return enumerate_orbit(chi.p, chi.k, d, chi.group)


def enumerate_thin_orbit(base: DirichletCharacter, kappa: int) -> ThinOrbitSpec:
    p, k = base.p, base.k
    if not base.is_primitive():
        raise ValueError("base character must be primitive")
    if not 0 < kappa <= k - 1:
        raise ValueError(f"kappa must satisfy 0 < kappa <= k-1={k - 1}, got {kappa}")
    phi = base.group.phi
    step = p ** (k - 1 - kappa) * (p - 1)
    cands = ((base.gamma + step * j) % phi for j in range(phi // step))
    gammas = tuple(sorted(g for g in cands if g % p != 0))
    return ThinOrbitSpec(base, kappa, gammas)


def thin_orbits(orbit: OrbitSpec, kappa: int) -> list[ThinOrbitSpec]:
    """Partition of a full orbit into thin orbits O_kappa, ordered by smallest member."""
    remaining = set(orbit.gammas)
    parts = []
    for g in orbit.gammas:
        if g not in remaining:
            continue
        t = enumerate_thin_orbit(DirichletCharacter(orbit.group, g), kappa)
        remaining.difference_update(t.gammas)
        parts.append(t)
    return parts


def in_same_thin_orbit(chi1: DirichletCharacter, chi2: DirichletCharacter, kappa: int) -> bool:
    """Galois-side test: chi2 = chi1^sigma with sigma(xi) = xi^a, a = 1 mod p^(k-1-kappa)(p-1)."""
    p, k, phi = chi1.p, chi1.k, chi1.group.phi
    mod = p ** (k - 1 - kappa) * (p - 1)
    for a in range(1, phi, mod):
        if math.gcd(a, phi) == 1 and a * chi1.gamma % phi == chi2.gamma:
            return True
    return False


# --- character averages ------------------------------------------------------


def _exponent_rows(orbit: Orbit, ns) -> np.ndarray:
    group = orbit.group
    r = group.index_array(np.asarray(ns, dtype=np.int64))
    gam = np.asarray(orbit.gammas, dtype=np.int64)
    return r, (np.outer(r, gam) % group.phi)


def char_average(orbit: Orbit, n: int) -> complex:
    """sum_{chi in orbit} chi(n) by direct floating summation."""
    r, e = _exponent_rows(orbit, [n])
    if r[0] < 0:
        return 0j
    z = np.exp(2j * np.pi * e[0] / orbit.group.phi)
    return complex(math.fsum(z.real), math.fsum(z.imag))


def char_average_exact(orbit: Orbit, ns) -> list[CycloElement]:
    """Exact sums sum_{chi in orbit} chi(n) for each n, reduced in Z[e(1/phi(q))]."""
    ns = list(ns)
    N = orbit.group.phi
    r, e = _exponent_rows(orbit, ns)
    counts = np.zeros((len(ns), N), dtype=np.int64)
    rows = np.repeat(np.arange(len(ns)), e.shape[1])
    np.add.at(counts, (rows, e.ravel()), 1)
    counts[r < 0] = 0
    red = reduce_counts(counts, N)
    return [CycloElement(N, tuple(int(c) for c in row)) for row in red]


def ramanujan_sum(m: int, n: int) -> int:
    """c_m(n) = sum over u in (Z/m)^x of e(u n / m)."""
    g = math.gcd(n, m)
    return int(mobius(m // g)) * int(totient(m)) // int(totient(m // g))


def mult_order(x: int, q: int) -> int:
    ord_ = 1
    y = x % q
    while y != 1:
        y = y * x % q
        ord_ += 1
    return ord_


def full_orbit_average_closed(orbit: OrbitSpec, n: int) -> Fraction:
    """(1/|O|) sum chi(n) = mu(o)/phi(o), o = ord(n^((p-1)/d)) in (Z/q)^x."""
    p, q = orbit.p, orbit.q
    if n % p == 0:
        return Fraction(0)
    o = mult_order(pow(int(n), (p - 1) // orbit.d, q), q)
    return Fraction(int(mobius(o)), int(totient(o)))


def thin_orbit_sum_closed(orbit: ThinOrbitSpec, n: int) -> CycloElement:
    """Closed form of sum_{chi in O_kappa} chi(n) from the Galois parametrisation."""
    group = orbit.group
    p, k, phi = group.p, group.k, group.phi
    r = group.index(n)
    if r < 0:
        return CycloElement.integer(0, phi)
    x = orbit.base.gamma * r % phi
    if orbit.kappa < k - 1:
        pk = p**orbit.kappa
        coeff = pk if x % pk == 0 else 0
        return CycloElement.monomial(coeff, x, phi)
    # a = 1 mod (p-1), p not | a: CRT splits e(xa/phi) into e(x u/(p-1)) * e(x v b/p^(k-1))
    pk1 = p ** (k - 1)
    u = pow(pk1, -1, p - 1) if p - 1 > 1 else 0
    coeff = ramanujan_sum(pk1, x)
    return CycloElement.monomial(coeff, x * u * pk1 % phi, phi)


def char_average_closed(orbit: Orbit, n: int) -> CycloElement:
    """Closed-form backend; returns the exact (unnormalised) sum."""
    N = orbit.group.phi
    if isinstance(orbit, OrbitSpec):
        val = full_orbit_average_closed(orbit, n) * len(orbit)
        if val.denominator != 1:  # pragma: no cover - c_m(n) is integral
            raise ArithmeticError("non-integral orbit sum")
        return CycloElement.integer(int(val), N)
    return thin_orbit_sum_closed(orbit, n)


def survives_full(n: int, p: int, k: int) -> bool:
    return n % p != 0 and pow(n, p - 1, p ** (k - 1)) == 1 % p ** (k - 1)


def survives_thin(n: int, p: int, k: int, kappa: int) -> bool:
    kt = min(kappa, k - 2)
    return n % p != 0 and pow(n, p - 1, p ** (kt + 1)) == 1 % p ** (kt + 1)


def survivor_set(p: int, k: int, modulus_exponent: int, bound: int) -> dict[int, list[int]]:
    """n <= bound, p not | n, n^(p-1) = 1 mod p^e, grouped by Teichmuller root mod p^e.

    Keys are the Teichmuller representatives mod p^e (for e = 0 everything
    lands under key 0).
    """
    e = modulus_exponent
    if e > k:
        raise ValueError("modulus_exponent must be <= k")
    m = p**e
    groups: dict[int, list[int]] = {}
    if e == 0:
        groups[0] = [n for n in range(1, bound + 1) if n % p]
        return groups
    roots = teichmuller_values(p, e)
    for z in roots:
        groups[z] = []
    for n in range(1, bound + 1):
        if n % p and pow(n, p - 1, m) == 1 % m:
            groups[roots[n % p - 1]].append(n)
    return groups
