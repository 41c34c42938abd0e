"""Named property suites used by ``orbit-lvalues verify`` and the acceptance tests.

Each suite returns a plain dict with at least ``suite``, ``passed``,
``checked`` and ``mismatches`` so results serialise directly to JSON.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .characters import unit_group
from .dioph import max_box_length, box_pair_count, random_boxes, lattice_guarantee
from .lvalue import AfeConfig, afe_family, hurwitz_family
from .orbits import (char_average_closed, char_average_exact, enumerate_orbit, orbit_divisors,
                     survives_full, survives_thin, thin_orbits)
from .padic import refine_check, teichmuller_values


def _result(suite: str, checked: int, mismatches: list, **extra) -> dict:
    return {"suite": suite, "passed": not mismatches, "checked": checked,
            "mismatches": len(mismatches), "examples": mismatches[:5], **extra}


def orthogonality(p: int, k: int) -> dict:
    """Exact full-orbit sums against the closed form, plus the vanishing condition."""
    group = unit_group(p, k)
    ns = range(1, group.q + 1)
    bad, checked = [], 0
    for d in orbit_divisors(p, k):
        orbit = enumerate_orbit(p, k, d, group)
        exact = char_average_exact(orbit, ns)
        for n, val in zip(ns, exact):
            checked += 1
            if val != char_average_closed(orbit, n):
                bad.append({"d": d, "n": n, "kind": "closed-form"})
            elif not survives_full(n, p, k) and not val.is_zero():
                bad.append({"d": d, "n": n, "kind": "vanishing"})
    return _result("orthogonality", checked, bad, p=p, k=k)


def thin_orthogonality(p: int, k: int) -> dict:
    """Every thin orbit O_kappa, 0 < kappa <= k-1: closed form and vanishing for n <= q."""
    group = unit_group(p, k)
    ns = range(1, group.q + 1)
    bad, checked = [], 0
    for d in orbit_divisors(p, k):
        orbit = enumerate_orbit(p, k, d, group)
        for kappa in range(1, k):
            for thin in thin_orbits(orbit, kappa):
                exact = char_average_exact(thin, ns)
                for n, val in zip(ns, exact):
                    checked += 1
                    if val != char_average_closed(thin, n):
                        bad.append({"d": d, "kappa": kappa, "base": thin.base.gamma, "n": n,
                                    "kind": "closed-form"})
                    elif not survives_thin(n, p, k, kappa) and not val.is_zero():
                        bad.append({"d": d, "kappa": kappa, "base": thin.base.gamma, "n": n,
                                    "kind": "vanishing"})
    return _result("thin-orthogonality", checked, bad, p=p, k=k)


def oracle_equivalence(p: int, k: int, lams=(0.05, 0.1, 0.2), tol: float = 1e-6,
                       oracle_bound: int = 10_000, workers: int = 1) -> dict:
    """AFE central values against the Hurwitz oracle for every primitive character."""
    group = unit_group(p, k)
    gam = group.primitive_gammas()
    ref = hurwitz_family(group, gam, oracle_bound)[0]
    bad, worst = [], 0.0
    for lam in lams:
        vals = afe_family(group, AfeConfig(lam=lam), workers=workers).values[gam]
        diff = np.abs(vals - ref)
        worst = max(worst, float(diff.max()))
        for i in np.nonzero(diff > tol)[0]:
            bad.append({"lambda": lam, "gamma": int(gam[i]), "diff": float(diff[i])})
    return _result("oracle-equivalence", int(gam.size) * len(lams), bad, p=p, k=k,
                   max_abs_diff=worst, tolerance=tol)


def teichmuller(p: int, k: int) -> dict:
    """Roots are (p-1)-th roots of unity, lift their residues, and agree across precisions."""
    bad, checked = [], 0
    roots = teichmuller_values(p, k)
    q = p**k
    for r, z in enumerate(roots, start=1):
        checked += 1
        if z % p != r or pow(z, p - 1, q) != 1:
            bad.append({"residue": r, "root": z})
        if k > 1 and z % p ** (k - 1) != teichmuller_values(p, k - 1)[r - 1]:
            bad.append({"residue": r, "root": z, "kind": "precision"})
    if len(set(roots)) != p - 1:
        bad.append({"kind": "count"})
    return _result("teichmuller", checked, bad, p=p, k=k)


def refine_lemma(p: int, k_max: int) -> dict:
    """p^k | m^p - 1 implies p^(k-1) | m - 1, exhaustively over m <= p^k."""
    bad, checked = [], 0
    for k in range(1, k_max + 1):
        for m in range(1, p**k + 1):
            checked += 1
            hyp, concl = refine_check(m, p, k)
            if hyp and not concl:
                bad.append({"k": k, "m": m})
    return _result("refine-lemma", checked, bad, p=p, k_max=k_max)


def roth_box(p: int, k: int, delta: float = 0.1, count: int = 100, seed: int = 0) -> dict:
    """Random boxes of side (p^k)^(1/2-delta): at most p-3 qualifying pairs each."""
    L = max_box_length(p, k, delta)
    bad, totals = [], []
    for i, scan in enumerate(random_boxes(p, k, delta, count, seed)):
        _, total = box_pair_count(scan)
        totals.append(total)
        if total > p - 3:
            bad.append({"box": i, "a": scan.interval_a, "b": scan.interval_b, "count": total})
    return _result("roth-box", count, bad, p=p, k=k, delta=delta, length=L,
                   max_count=max(totals), bound=p - 3,
                   lattice_guarantee=lattice_guarantee(p, k, L))


SUITES: dict[str, Callable[..., dict]] = {
    "orthogonality": orthogonality,
    "thin-orthogonality": thin_orthogonality,
    "oracle-equivalence": oracle_equivalence,
    "teichmuller": teichmuller,
    "roth-box": roth_box,
    "refine-lemma": refine_lemma,
}

