"""Mollifiers M(chi) = sum_{m <= q^theta} a_m chi(m) / sqrt(m)."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy import factorint, mobius

from .characters import DirichletCharacter, UnitGroup


@dataclass(frozen=True)
class MollifierSpec:
    q: int
    p: int
    theta: float
    coefficients: dict[int, float]

    def __post_init__(self) -> None:
        if self.coefficients.get(1) != 1:
            raise ValueError("a_1 must equal 1")

    @property
    def length(self) -> float:
        return self.q**self.theta

    def support(self) -> list[int]:
        return sorted(m for m, a in self.coefficients.items() if a != 0)

    def trivial(self) -> bool:
        return self.support() == [1]

    def sanity_cap(self) -> float:
        """Triangle-inequality bound sum |a_m| / sqrt(m) >= |M(chi)|."""
        return math.fsum(abs(a) / math.sqrt(m) for m, a in self.coefficients.items())


def _prime_of(q: int) -> int:
    f = factorint(q)
    if len(f) != 1:
        raise ValueError(f"q={q} is not a prime power")
    return next(iter(f))


def iwaniec_sarnak_coefficients(q: int, theta: float) -> MollifierSpec:
    """a_m = mu(m) log(M/m) / log(M) for squarefree m <= M = q^theta, p not | m."""
    if not 0 <= theta < 0.5:
        raise ValueError("theta must lie in [0, 1/2)")
    p = _prime_of(q)
    M = q**theta
    coeffs = {1: 1.0}
    if theta > 0:
        logM = math.log(M)
        for m in range(2, int(math.floor(M + 1e-9)) + 1):
            if m % p == 0:
                continue
            mu = int(mobius(m))
            if mu:
                coeffs[m] = mu * math.log(M / m) / logM
    return MollifierSpec(q, p, theta, coeffs)


def trivial_mollifier(q: int) -> MollifierSpec:
    return iwaniec_sarnak_coefficients(q, 0.0)


def load_coefficients(path: str | Path, q: int, theta: float) -> MollifierSpec:
    """Read a custom coefficient table (CSV with columns m, a_m).

    Entries at multiples of p or beyond q^theta are dropped since chi(m)
    vanishes or the mollifier is shorter; coefficients with
    |a_m| > m^0.1 draw a warning.
    """
    p = _prime_of(q)
    M = q**theta
    coeffs: dict[int, float] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#") or row[0].strip() == "m":
                continue
            m, a = int(row[0]), float(row[1])
            if m < 1:
                raise ValueError(f"bad index m={m}")
            if m % p == 0 or m > M + 1e-9:
                continue
            if abs(a) > m**0.1 and m > 1:
                warnings.warn(f"|a_{m}| = {abs(a):.3g} exceeds m^0.1", stacklevel=2)
            coeffs[m] = a
    coeffs.setdefault(1, 1.0)
    return MollifierSpec(q, p, theta, coeffs)


def evaluate_mollifier(spec: MollifierSpec, chi: DirichletCharacter) -> complex:
    if spec.q != chi.q:
        raise ValueError("mollifier and character have different moduli")
    ms = spec.support()
    a = np.array([spec.coefficients[m] for m in ms])
    vals = chi.values(np.array(ms, dtype=np.int64))
    return complex(np.sum(a / np.sqrt(ms) * vals))


def mollifier_family(spec: MollifierSpec, group: UnitGroup, gammas) -> np.ndarray:
    """M(chi_gamma) for each gamma in ``gammas``."""
    if spec.q != group.q:
        raise ValueError("mollifier and group have different moduli")
    gammas = np.asarray(gammas, dtype=np.int64)
    if spec.trivial():
        return np.ones(gammas.size, dtype=complex)
    ms = np.array(spec.support(), dtype=np.int64)
    w = np.array([spec.coefficients[int(m)] for m in ms]) / np.sqrt(ms)
    r = group.ind[ms % group.q]
    e = np.outer(gammas, r) % group.phi
    return np.exp(2j * np.pi * e / group.phi) @ w
