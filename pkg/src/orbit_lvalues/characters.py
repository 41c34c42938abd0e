"""Dirichlet characters modulo an odd prime power q = p^k.

Characters are indexed by an exponent gamma in [0, phi(q)) through a fixed
generator g:  chi_gamma(g^r) = e(gamma * r / phi(q)).  Values are kept as exact
rational phases; floats only appear when a caller asks for a complex number.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from sympy import factorint

from .padic import PadicInt, check_precision, check_prime, padic_log, vp

log = logging.getLogger(__name__)

CACHE_VERSION = 1


def find_generator(p: int, k: int = 2) -> int:
    """Smallest positive generator of (Z/p^2)^x; it generates (Z/p^k)^x for every k."""
    check_prime(p)
    check_precision(k)
    q2 = p * p
    order = p * (p - 1)
    primes = list(factorint(order))
    for g in range(2, q2):
        if g % p == 0:
            continue
        if all(pow(g, order // r, q2) != 1 for r in primes):
            return g
    raise ArithmeticError(f"no generator found mod {p}^2")  # pragma: no cover


def _build_tables(q: int, phi: int, g: int) -> tuple[np.ndarray, np.ndarray]:
    ind = np.full(q, -1, dtype=np.int64)
    powers = np.empty(phi, dtype=np.int64)
    x = 1
    for r in range(phi):
        ind[x] = r
        powers[r] = x
        x = x * g % q
    if x != 1 or (ind >= 0).sum() != phi:
        raise ArithmeticError(f"{g} does not generate the units mod {q}")
    return ind, powers


def cache_path(cache_dir: str | Path, p: int, k: int, g: int) -> Path:
    return Path(cache_dir) / f"ind_p{p}_k{k}_g{g}.npz"


def _load_cached(path: Path, p: int, k: int, g: int) -> np.ndarray | None:
    try:
        with np.load(path) as data:
            header = tuple(int(v) for v in data["header"])
            if header != (CACHE_VERSION, p, k, g):
                log.info("stale character-table cache %s (header %s), rebuilding", path, header)
                return None
            return data["ind"].astype(np.int64)
    except (OSError, KeyError, ValueError):
        return None


class UnitGroup:
    """The cyclic group (Z/p^k)^x with generator g and a discrete-log table.

    ``ind[u]`` is the exponent r with g^r = u (and -1 for non-units);
    ``powers[r]`` is g^r mod q.
    """

    def __init__(self, p: int, k: int, cache_dir: str | Path | None = None):
        check_prime(p)
        check_precision(k)
        self.p = p
        self.k = k
        self.q = p**k
        self.phi = p ** (k - 1) * (p - 1)
        self.g = find_generator(p, k)
        ind = None
        path = None
        if cache_dir is not None:
            path = cache_path(cache_dir, p, k, self.g)
            if path.exists():
                ind = _load_cached(path, p, k, self.g)
        if ind is None:
            ind, powers = _build_tables(self.q, self.phi, self.g)
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                np.savez(path, header=np.array([CACHE_VERSION, p, k, self.g]), ind=ind)
        else:
            powers = np.empty(self.phi, dtype=np.int64)
            units = np.nonzero(ind >= 0)[0]
            powers[ind[units]] = units
        ind.setflags(write=False)
        powers.setflags(write=False)
        self.ind = ind
        self.powers = powers

    def __repr__(self) -> str:
        return f"UnitGroup(p={self.p}, k={self.k}, g={self.g})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UnitGroup) and (self.p, self.k, self.g) == (other.p, other.k, other.g)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.g))

    def index(self, n: int) -> int:
        """Discrete log of n, or -1 when p | n."""
        return int(self.ind[n % self.q])

    def index_array(self, n: np.ndarray) -> np.ndarray:
        return self.ind[np.asarray(n, dtype=np.int64) % self.q]

    @property
    def ind_minus_one(self) -> int:
        return self.phi // 2

    def character(self, gamma: int) -> DirichletCharacter:
        return DirichletCharacter(self, gamma)

    def primitive_gammas(self) -> np.ndarray:
        g = np.arange(self.phi, dtype=np.int64)
        if self.k == 1:
            return g[g != 0]
        return g[g % self.p != 0]


@lru_cache(maxsize=32)
def unit_group(p: int, k: int) -> UnitGroup:
    """Memoised in-memory UnitGroup (no disk cache)."""
    return UnitGroup(p, k)


@dataclass(frozen=True)
class CharValue:
    """chi(n) as an exact phase e(phase), or zero when ``phase`` is None."""

    phase: Fraction | None

    @property
    def is_zero(self) -> bool:
        return self.phase is None

    def __complex__(self) -> complex:
        if self.phase is None:
            return 0j
        t = 2 * math.pi * self.phase
        return complex(math.cos(t), math.sin(t))

    def __abs__(self) -> float:
        return 0.0 if self.phase is None else 1.0


@dataclass(frozen=True)
class DirichletCharacter:
    group: UnitGroup
    gamma: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", self.gamma % self.group.phi)

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
    def iota(self) -> int:
        """Parity bit: chi(-1) = e(gamma * ind(-1) / phi) is +1 or -1."""
        return 2 * self.exponent(-1) // self.group.phi

    @property
    def order(self) -> int:
        return character_order(self)

    def is_primitive(self) -> bool:
        if self.k == 1:
            return self.gamma != 0
        return self.gamma % self.p != 0

    def exponent(self, n: int) -> int:
        """gamma * ind(n) mod phi(q), or -1 if p | n."""
        r = self.group.index(n)
        return -1 if r < 0 else self.gamma * r % self.group.phi

    def exponents(self, n: np.ndarray) -> np.ndarray:
        r = self.group.index_array(n)
        return np.where(r < 0, -1, (self.gamma * r) % self.group.phi)

    def values(self, n: np.ndarray) -> np.ndarray:
        e = self.exponents(n)
        out = np.exp(2j * np.pi * e / self.group.phi)
        out[e < 0] = 0
        return out

    def conj(self) -> DirichletCharacter:
        return DirichletCharacter(self.group, -self.gamma)

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if other.group != self.group:
            raise ValueError("characters to different moduli")
        return DirichletCharacter(self.group, self.gamma + other.gamma)


def evaluate(chi: DirichletCharacter, n: int) -> CharValue:
    e = chi.exponent(n)
    if e < 0:
        return CharValue(None)
    return CharValue(Fraction(e, chi.group.phi))


def character_order(chi: DirichletCharacter) -> int:
    phi = chi.group.phi
    return phi // math.gcd(chi.gamma, phi)


def conductor(chi: DirichletCharacter) -> int:
    """Conductor of chi: smallest p^j to which chi factors (1 for the principal character)."""
    if chi.gamma == 0:
        return 1
    p, k = chi.p, chi.k
    v = vp(chi.gamma, p)
    # chi is trivial on 1 + p^j Z exactly when p^(k-j) | gamma  (j >= 1)
    return p ** max(1, k - v)


@dataclass(frozen=True)
class PostnikovParam:
    """chi = chi0 * chi1 with chi1(1 + pt) = psi(a0 * log_p(1 + pt) / p^k).

    ``a0`` is meaningful mod p^(k-1); ``component0`` is gamma mod (p-1), i.e.
    the restriction of chi to the (p-1)-th roots of unity.
    """

    p: int
    k: int
    a0: int
    component0: int

    @property
    def primitive(self) -> bool:
        return self.a0 % self.p != 0


@lru_cache(maxsize=None)
def _log_generator_unit(p: int, k: int, g: int) -> int:
    """Unit u with log_p(g^(p-1)) = p*u mod p^k."""
    h = pow(g, p - 1, p**k)
    lg = padic_log(PadicInt(p, k, h)).value
    return (lg // p) % p ** max(k - 1, 1)


def postnikov_param(chi: DirichletCharacter) -> PostnikovParam:
    p, k, g = chi.p, chi.k, chi.group.g
    if k == 1:
        return PostnikovParam(p, k, 0, chi.gamma % (p - 1))
    mod = p ** (k - 1)
    u = _log_generator_unit(p, k, g)
    # chi(h) = e(gamma / p^(k-1)) for h = g^(p-1) and log h = p u, so a0 = gamma / u
    a0 = chi.gamma * pow(u, -1, mod) % mod
    return PostnikovParam(p, k, a0, chi.gamma % (p - 1))


def postnikov_eval(param: PostnikovParam, t: int) -> CharValue:
    """chi^(1)(1 + p t) = e(a0 * log_p(1 + p t) / p^k) as an exact phase."""
    p, k = param.p, param.k
    q = p**k
    x = (1 + p * t) % q
    lg = padic_log(PadicInt(p, k, x)).value
    return CharValue(Fraction(param.a0 * lg % q, q))


def postnikov_eval_unit(param: PostnikovParam, x: int) -> CharValue:
    """Same as :func:`postnikov_eval` but takes the unit x = 1 mod p itself."""
    if x % param.p != 1:
        raise ValueError("argument must be 1 mod p")
    return postnikov_eval(param, (x - 1) // param.p)


def conductor_distance(chi1: DirichletCharacter, chi2: DirichletCharacter) -> int:
    """Conductor of the X_k1-component of chi1 * conj(chi2); 1 if they coincide."""
    if chi1.group != chi2.group:
        raise ValueError("modulus mismatch")
    p, k = chi1.p, chi1.k
    if k == 1:
        return 1
    diff = (chi1.gamma - chi2.gamma) % p ** (k - 1)
    if diff == 0:
        return 1
    return p ** (k - vp(diff, p))


def minimal_induction_modulus(chi: DirichletCharacter) -> int:
    """Brute-force conductor: least p^j such that chi(n) depends only on n mod p^j."""
    p, q = chi.p, chi.q
    units = np.array([n for n in range(1, q) if n % p], dtype=np.int64)
    e = chi.exponents(units)
    for j in range(chi.k + 1):
        m = p**j
        # chi factors mod m iff chi is trivial on units = 1 mod m
        if np.all(e[units % m == 1 % m] == 0):
            return m
    return q  # pragma: no cover
