"""Mollified first and second moments over full and thin Galois orbits.

Moments are averages over a family of per-character central values; the
family's L-values come from one :func:`afe_family` pass and are reused for
every orbit and mollifier.  All reductions run in increasing gamma order
through ``math.fsum`` so results do not depend on how the L-values were
computed in parallel.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import digamma

from .characters import UnitGroup
from .lvalue import AfeConfig, LValueTable, afe_family
from .mollifier import MollifierSpec, mollifier_family
from .orbits import Orbit, OrbitSpec, ThinOrbitSpec, thin_orbits

EULER_GAMMA = float(np.euler_gamma)
ENVELOPE_EPS = 0.05
ENVELOPE_FLOOR = 0.5
ENVELOPE_BASE_Q = 81  # the envelope equals ENVELOPE_FLOOR here
INEFFECTIVE_CAVEAT = ("implied constants are ineffective; envelopes are calibrated trend "
                      "checks, not certified error terms")


def main_term_constant(p: int, iota: int) -> float:
    """C = psi((1 + 2 iota)/4) + 2 gamma + 2 log p / (p - 1)."""
    return float(digamma((1 + 2 * iota) / 4)) + 2 * EULER_GAMMA + 2 * math.log(p) / (p - 1)


def c_kappa(kappa: int, k: int) -> float:
    """Target non-vanishing proportion for thin orbits O_kappa mod p^k."""
    r = kappa / k
    return (r - 0.5) / (r + 0.5)


def predicted_second_main_term(p: int, q: int, iota: int, mollifier: MollifierSpec) -> float:
    """(p-1)/p sum a_m1 a_m2 / [m1, m2] (log(q (m1, m2)^2 / (pi m1 m2)) + C)."""
    if mollifier.theta >= 0.5:
        raise ValueError("the main term needs theta < 1/2")
    ms = np.array(mollifier.support(), dtype=np.int64)
    a = np.array([mollifier.coefficients[int(m)] for m in ms])
    g = np.gcd.outer(ms, ms)
    m1, m2 = np.meshgrid(ms, ms, indexing="ij")
    lcm = m1 * m2 // g
    C = main_term_constant(p, iota)
    terms = np.outer(a, a) / lcm * (np.log(q * g.astype(float) ** 2 / (math.pi * m1 * m2)) + C)
    return (p - 1) / p * math.fsum(terms.ravel())


def moment_envelopes(p: int, q: int) -> dict[str, float]:
    """Trend envelopes for |M1 - 1| and |M2/pred - 1|.

    Each is A q^(-e + eps) with A fixed so the envelope equals the floor at
    q = 81.  ``first_effective`` uses the effective exponent 1/(2(p-1)).
    """
    def env(e: float) -> float:
        return ENVELOPE_FLOOR * (q / ENVELOPE_BASE_Q) ** (-e + ENVELOPE_EPS)

    return {"first": env(0.25), "first_effective": env(1 / (2 * (p - 1))), "second": env(0.25)}


@dataclass
class MomentReport:
    family: dict
    theta: float
    size: int
    empirical_first: complex
    empirical_second: float
    predicted_first: float
    predicted_second: float
    error_ratios: dict
    envelopes: dict
    nonvanishing_count: int
    undetermined_count: int
    lower_bound: float
    target_ratio: float
    in_regime: bool = True
    flags: list[str] = field(default_factory=list)
    caveat: str = INEFFECTIVE_CAVEAT

    @property
    def first_error(self) -> float:
        return abs(self.empirical_first - self.predicted_first)

    @property
    def second_rel_error(self) -> float:
        return abs(self.empirical_second / self.predicted_second - 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        z = self.empirical_first
        d["empirical_first"] = {"re": z.real, "im": z.imag}
        return d


def family_table(group: UnitGroup, config: AfeConfig = AfeConfig(), workers: int = 1) -> LValueTable:
    return afe_family(group, config, workers=workers)


def _orbit_data(orbit: Orbit, mollifier: MollifierSpec, table: LValueTable):
    if table.group != orbit.group:
        raise ValueError("L-value table and orbit have different moduli")
    gam = np.asarray(orbit.gammas, dtype=np.int64)
    L = table.values[gam]
    if np.isnan(L).any():
        raise ValueError("orbit contains imprimitive characters")
    M = mollifier_family(mollifier, orbit.group, gam)
    return gam, L, M, table.bounds[gam]


def _mean_complex(z: np.ndarray) -> complex:
    n = z.size
    return complex(math.fsum(z.real) / n, math.fsum(z.imag) / n)


def first_moment(orbit: Orbit, mollifier: MollifierSpec, table: LValueTable) -> complex:
    """(1/|O|) sum_{chi in O} L(1/2, chi) M(chi)."""
    _, L, M, _ = _orbit_data(orbit, mollifier, table)
    return _mean_complex(L * M)


def second_moment(orbit: Orbit, mollifier: MollifierSpec, table: LValueTable) -> float:
    """(1/|O|) sum_{chi in O} |L(1/2, chi)|^2 |M(chi)|^2."""
    if mollifier.theta >= 0.5:
        raise ValueError("second moment needs theta < 1/2")
    _, L, M, _ = _orbit_data(orbit, mollifier, table)
    w = np.abs(L) ** 2 * np.abs(M) ** 2
    return math.fsum(w) / w.size


def nonvanishing_bound(report: MomentReport) -> tuple[float, int]:
    """Cauchy-Schwarz ratio |M1|^2/M2 and the certified non-vanishing count."""
    if not report.empirical_second > 0:
        raise ValueError("degenerate second moment")
    return abs(report.empirical_first) ** 2 / report.empirical_second, report.nonvanishing_count


def _regime(orbit: Orbit, theta: float) -> tuple[bool, list[str], float]:
    if isinstance(orbit, OrbitSpec):
        flags = [] if theta < 0.5 else ["theta-outside-second-moment-range"]
        return not flags, flags, theta / (1 + theta)
    r = orbit.kappa / orbit.k
    flags = []
    if r <= 0.5:
        flags.append("kappa-not-above-k/2")
    if theta >= 2 * (r - 0.5):
        flags.append("theta-outside-first-moment-range")
    if theta >= r - 0.5:
        flags.append("theta-outside-second-moment-range")
    return not flags, flags, max(c_kappa(orbit.kappa, orbit.k), 0.0)


def moment_report(orbit: Orbit, mollifier: MollifierSpec, table: LValueTable) -> MomentReport:
    """First and second mollified moments of one orbit with predictions and ratio."""
    if mollifier.q != orbit.q:
        raise ValueError("mollifier and orbit have different moduli")
    _, L, M, bnd = _orbit_data(orbit, mollifier, table)
    m1 = _mean_complex(L * M)
    sq = np.abs(L) ** 2 * np.abs(M) ** 2
    m2 = math.fsum(sq) / sq.size
    pred2 = predicted_second_main_term(orbit.p, orbit.q, orbit.iota, mollifier)
    absL = np.abs(L)
    nonzero = int(np.count_nonzero(absL > bnd))
    env = moment_envelopes(orbit.p, orbit.q)
    in_regime, flags, target = _regime(orbit, mollifier.theta)
    if not m2 > 0:
        raise ValueError("degenerate second moment")
    ratio = abs(m1) ** 2 / m2
    return MomentReport(
        family=orbit.describe() | {"iota": orbit.iota},
        theta=mollifier.theta,
        size=len(orbit),
        empirical_first=m1,
        empirical_second=m2,
        predicted_first=1.0,
        predicted_second=pred2,
        error_ratios={
            "first": abs(m1 - 1) / env["first"],
            "first_effective": abs(m1 - 1) / env["first_effective"],
            "second": abs(m2 / pred2 - 1) / env["second"],
        },
        envelopes=env,
        nonvanishing_count=nonzero,
        undetermined_count=len(orbit) - nonzero,
        lower_bound=ratio,
        target_ratio=target,
        in_regime=in_regime,
        flags=flags,
    )


def thin_moments(thin: ThinOrbitSpec, mollifier: MollifierSpec, table: LValueTable) -> MomentReport:
    """Moment report over a thin orbit; out-of-regime runs carry flags instead of failing."""
    return moment_report(thin, mollifier, table)


def thin_theta(kappa: int, k: int, margin: float = 1e-6) -> float:
    """Largest admissible mollifier length for O_kappa, just inside theta < kappa/k - 1/2."""
    return max(kappa / k - 0.5 - margin, 0.0)


def thin_consistency(orbit: OrbitSpec, kappa: int, mollifier: MollifierSpec,
                     table: LValueTable) -> tuple[float, float]:
    """Gap between full-orbit moments and the size-weighted thin-orbit average."""
    parts = thin_orbits(orbit, kappa)
    n = len(orbit)
    f1 = [first_moment(t, mollifier, table) * len(t) / n for t in parts]
    f2 = [second_moment(t, mollifier, table) * len(t) / n for t in parts]
    w1 = complex(math.fsum(z.real for z in f1), math.fsum(z.imag for z in f1))
    w2 = math.fsum(f2)
    return abs(first_moment(orbit, mollifier, table) - w1), abs(second_moment(orbit, mollifier, table) - w2)


# --- off-diagonal census -----------------------------------------------------


@dataclass(frozen=True)
class Census:
    p: int
    k: int
    modulus_exponent: int
    bound: int
    diagonal: int
    plus_offdiagonal: int
    minus_class: int
    other_classes: dict[int, int]

    @property
    def other_total(self) -> int:
        return sum(self.other_classes.values())


def offdiagonal_census(p: int, k: int, kappa: int | None = None, theta: float = 0.0,
                       bound: int | None = None) -> Census:
    """Pairs (a, b) in [1, X]^2 with p not | ab and a^(p-1) = b^(p-1) mod p^e.

    e = k-1 for full orbits and kappa~ + 1 for thin orbits O_kappa.  The
    congruence forces a = zeta b mod p^e for a Teichmuller root zeta, and the
    class of zeta is read off from (a/b) mod p.  ``other_classes`` is keyed by
    the residue c = zeta mod p with c != +-1.
    """
    e = k - 1 if kappa is None else min(kappa, k - 2) + 1
    q = p**k
    if bound is None:
        bound = int(q ** ((1 + 2 * theta) / 2 + ENVELOPE_EPS))
    mod = p**e
    n = np.arange(1, bound + 1, dtype=np.int64)
    n = n[n % p != 0]
    key = np.array([pow(int(x), p - 1, mod) for x in n], dtype=np.int64) if mod > 1 else np.zeros(n.size, np.int64)
    res = n % p
    # counts[h, r]: how many n share n^(p-1) = h mod p^e and n = r mod p
    uk, kinv = np.unique(key, return_inverse=True)
    counts = np.zeros((uk.size, p), dtype=np.int64)
    np.add.at(counts, (kinv, res), 1)
    classes = {}
    for c in range(1, p):
        # a = c b mod p  <=>  residue(a) = c * residue(b)
        src = (np.arange(p) * c) % p
        classes[c] = int(np.sum(counts[:, src] * counts))
    diagonal = int(n.size)
    plus = classes.pop(1) - diagonal
    minus = classes.pop(p - 1) if p > 2 else 0
    return Census(p, k, e, bound, diagonal, plus, minus, classes)
