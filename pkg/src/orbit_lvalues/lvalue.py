"""Central values L(1/2, chi) for primitive characters mod p^k.

Two independent routes:

* the approximate functional equation (AFE) with smoothing kernel U for
  L(1/2, chi) and kernel V for |L(1/2, chi)|^2;
* the finite Hurwitz identity L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q), with
  zeta(1/2, x) from Euler-Maclaurin summation.

The kernels are inverse Mellin transforms

    U(x) = 1/(2 pi i) int_(c) G(s)   (sqrt(pi) x)^-s ds/s
    V(x) = 1/(2 pi i) int_(c) G(s)^2 (pi x)^-s      ds/s

with G(s) = Gamma((s + iota)/2 + 1/4) / Gamma(iota/2 + 1/4).  For U the
substitution s = 2u gives U(x) = Q(iota/2 + 1/4, pi x^2) (regularised upper
incomplete gamma), which is the fast path; V is integrated numerically.

Bounds reported here are tracked truncation bounds plus a rounding allowance,
not rigorous interval arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli, gammaincc, gammaln, k0, loggamma

from .characters import DirichletCharacter, UnitGroup

EPS = np.finfo(float).eps
BLOCK = 1 << 15  # fixed work unit; results never depend on the worker count


class KernelToleranceError(ArithmeticError):
    """A kernel could not be evaluated within the requested tolerance."""


class OracleBoundError(ValueError):
    """The modulus exceeds the configured oracle bound."""


@dataclass(frozen=True)
class AfeConfig:
    lam: float = 0.1
    tolerance: float = 1e-12  # truncation budget for each Dirichlet sum
    quad_tolerance: float = 1e-13  # tail budget for contour quadrature
    dual_term: bool = True  # include the root-number sum of the AFE

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not (self.tolerance > 0 and self.quad_tolerance > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class CentralValue:
    value: complex
    abs_error_bound: float
    method: str


def _alpha(iota: int) -> float:
    if iota not in (0, 1):
        raise ValueError("iota must be 0 or 1")
    return iota / 2 + 0.25


def _positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("kernel argument must be positive")
    return x


# --- kernels -----------------------------------------------------------------


def kernel_U(x, iota: int):
    """U(x) = Q(iota/2 + 1/4, pi x^2)."""
    xa = _positive(x)
    out = gammaincc(_alpha(iota), np.pi * xa * xa)
    return float(out) if np.ndim(x) == 0 else out


def _contour(x: np.ndarray, iota: int, power: int, tol: float) -> np.ndarray:
    """Trapezoid rule for 1/(2 pi i) int G(s)^power (pi^(power/2) x)^-s ds/s.

    The abscissa is c = 2 when pi^(power/2) x >= 1.  Smaller arguments would
    cancel catastrophically on that line, so the contour is moved to
    c = -1/4 (left of the pole at s = 0, right of the first Gamma pole at
    s = -1/2 - iota) and the residue 1 is added back.
    """
    a = _alpha(iota)
    base = np.pi ** (power / 2) * x
    out = np.empty_like(x)
    for c, sel in ((2.0, base >= 1), (-0.25, base < 1)):
        if not sel.any():
            continue
        b = base[sel]
        # nearest singularity to the line: s = 0, or the Gamma pole at -1/2 - iota
        dist = min(abs(c), abs(c + 0.5 + iota))
        h = dist / 10.0  # trapezoid error ~ exp(-2 pi dist / h)
        logb_max = float(np.log(b.max() if c < 0 else b.min()))
        T = _truncation_height(c, a, iota, power, logb_max, tol)
        t = np.arange(0.0, T + h, h)
        s = c + 1j * t
        g = power * (loggamma((s + iota) / 2 + 0.25) - gammaln(a)) - np.log(s)
        w = np.full(t.shape, h)
        w[0] = h / 2
        vals = np.empty(b.shape)
        for lo in range(0, b.size, 2048):
            lb = np.log(b[lo:lo + 2048])
            f = np.exp(g[None, :] - s[None, :] * lb[:, None])
            # f(-t) = conj f(t): integral over the line is 2 Re of the half line
            vals[lo:lo + 2048] = (f.real @ w) / np.pi
        out[sel] = vals + (1.0 if c < 0 else 0.0)
    return out


def _truncation_height(c: float, a: float, iota: int, power: int, logb: float, tol: float) -> float:
    """Height T past which the Stirling-decaying integrand contributes < tol."""
    T = 8.0
    while True:
        s = complex(c, T)
        logf = power * (loggamma((s + iota) / 2 + 0.25).real - gammaln(a)) - c * logb - math.log(abs(s))
        # |G(c+it)|^power decays like exp(-power * pi t / 4); geometric tail estimate, doubled
        tail = 2.0 * math.exp(logf) * 4.0 / (power * math.pi) / math.pi
        if tail < tol:
            return T
        T += 4.0
        if T > 4000:
            raise KernelToleranceError("contour truncation did not reach tolerance")


def kernel_U_contour(x, iota: int, tol: float = 1e-13):
    """U by direct contour quadrature (independent of the incomplete-gamma identity)."""
    xa = np.atleast_1d(_positive(x))
    out = _contour(xa, iota, 1, tol)
    return float(out[0]) if np.ndim(x) == 0 else out


def kernel_V(x, iota: int, tol: float = 1e-13):
    """V(x) by numerical contour integration."""
    xa = np.atleast_1d(_positive(x))
    out = _contour(xa, iota, 2, tol)
    return float(out[0]) if np.ndim(x) == 0 else out


def kernel_V_bessel(x: float, iota: int) -> float:
    """V(x) = 4^(1-a)/Gamma(a)^2 int_(2 pi x)^inf u^(2a-1) K_0(u) du (real-line form)."""
    from scipy.integrate import quad

    if not x > 0:
        raise ValueError("kernel argument must be positive")
    a = _alpha(iota)
    z = 2 * np.pi * x
    f = lambda u: u ** (2 * a - 1) * k0(u)  # noqa: E731
    val = 0.0
    lo = z
    for hi in (z + 1, z + 5, z + 20, z + 60):
        part, _ = quad(f, lo, hi, limit=200, epsabs=1e-15, epsrel=1e-13)
        val += part
        lo = hi
    return float(4 ** (1 - a) / math.exp(2 * gammaln(a)) * val)


def kernel_V_bound(x: float, iota: int) -> float:
    """Upper bound V(x) <= 4^(1-a) sqrt(pi/2) / Gamma(a)^2 (2 pi x)^(2a - 3/2) e^(-2 pi x)."""
    a = _alpha(iota)
    z = 2 * math.pi * x
    return 4 ** (1 - a) * math.sqrt(math.pi / 2) / math.exp(2 * gammaln(a)) * z ** (2 * a - 1.5) * math.exp(-z)


# --- truncation rules ---------------------------------------------------------


def _u_tail(N: int, scale: float, iota: int) -> float:
    """Bound for sum_{n > N} n^-1/2 U(n / scale).

    Uses Q(a, z) <= z^(a-1) e^-z / Gamma(a) and
    sum_{n > N} e^(-pi n^2/scale^2) <= scale^2/(2 pi N) e^(-pi N^2/scale^2).
    """
    a = _alpha(iota)
    z = math.pi * N * N / (scale * scale)
    return z ** (a - 1) / math.gamma(a) * N**-0.5 * scale * scale / (2 * math.pi * N) * math.exp(-z)


def u_cutoff(scale: float, iota: int, tol: float) -> int:
    """Smallest N with the U-sum tail beyond N certified below tol (the bound is decreasing in N)."""
    hi = max(1, int(scale))
    while _u_tail(hi, scale, iota) >= tol:
        hi *= 2
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _u_tail(mid, scale, iota) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def _v_tail(M: int, q: int, iota: int) -> float:
    """Bound for 2 sum_{n1 n2 > M} (n1 n2)^-1/2 |V(n1 n2/q)| using d(m) <= 2 sqrt(m)."""
    x = M / q
    return 4.0 * kernel_V_bound(x, iota) / (1 - math.exp(-2 * math.pi / q))


def v_cutoff(q: int, iota: int, tol: float) -> int:
    M = q
    while _v_tail(M, q, iota) >= tol:
        M += max(1, q // 4)
    return M


# --- Hurwitz oracle -----------------------------------------------------------

_EM_TERMS = 12
_EM_SHIFT = 16
_B2J = [float(b) for b in bernoulli(2 * _EM_TERMS + 2)]


def hurwitz_zeta(s: float, x) -> tuple[np.ndarray, np.ndarray]:
    """zeta(s, x) for real s > 0, s != 1, by Euler-Maclaurin.

    Returns (values, error bounds).  For f(t) = (t + x)^-s every derivative
    is completely monotone, so the remainder is bounded by the first omitted
    correction term.
    """
    if not (s > 0 and s != 1):
        raise ValueError("need real s > 0, s != 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    N = _EM_SHIFT
    n = np.arange(N)[:, None]
    head = ((n + x[None, :]) ** -s).sum(axis=0)
    y = N + x
    total = head + y ** (1 - s) / (s - 1) + 0.5 * y**-s
    rising = s  # s (s+1) ... (s + 2j - 2)
    fact = 2.0  # (2j)!
    corr = np.zeros_like(x)
    for j in range(1, _EM_TERMS + 2):
        term = _B2J[2 * j] / fact * rising * y ** (-s - 2 * j + 1)
        if j <= _EM_TERMS:
            corr += term
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            fact *= (2 * j + 1) * (2 * j + 2)
        else:
            err = np.abs(term)
    total = total + corr
    err = err + 4 * EPS * (np.abs(head) + np.abs(y ** (1 - s) / (s - 1)))
    return total, err


def _check_oracle(q: int, oracle_bound: int) -> None:
    if q > oracle_bound:
        raise OracleBoundError(f"q={q} exceeds the oracle bound {oracle_bound}")


def central_value_hurwitz(chi: DirichletCharacter, oracle_bound: int = 10_000) -> CentralValue:
    """L(1/2, chi) = q^-1/2 sum_{a=1}^{q} chi(a) zeta(1/2, a/q)."""
    if not chi.is_primitive():
        raise ValueError("the Hurwitz oracle requires a primitive character")
    q = chi.q
    _check_oracle(q, oracle_bound)
    a = np.array([a for a in range(1, q + 1) if a % chi.p], dtype=np.int64)
    z, zerr = hurwitz_zeta(0.5, a / q)
    vals = chi.values(a)
    total = complex(np.sum(vals * z)) / math.sqrt(q)
    bound = (float(zerr.sum()) + 4 * EPS * a.size * float(np.abs(z).sum())) / math.sqrt(q)
    return CentralValue(total, bound, "hurwitz")


def hurwitz_family(group: UnitGroup, gammas, oracle_bound: int = 10_000, chunk: int = 256):
    """Oracle central values for many characters: returns (values, bounds)."""
    q, phi = group.q, group.phi
    _check_oracle(q, oracle_bound)
    gammas = np.asarray(gammas, dtype=np.int64)
    if np.any(gammas % group.p == 0) and group.k > 1:
        raise ValueError("the Hurwitz oracle requires primitive characters")
    a = np.array([a for a in range(1, q + 1) if a % group.p], dtype=np.int64)
    r = group.ind[a]
    z, zerr = hurwitz_zeta(0.5, a / q)
    out = np.empty(gammas.size, dtype=complex)
    for lo in range(0, gammas.size, chunk):
        e = np.outer(gammas[lo:lo + chunk], r) % phi
        out[lo:lo + chunk] = np.exp(2j * np.pi * e / phi) @ z
    out /= math.sqrt(q)
    bound = (float(zerr.sum()) + 4 * EPS * a.size * float(np.abs(z).sum())) / math.sqrt(q)
    return out, np.full(gammas.size, bound)


# --- AFE: single character ----------------------------------------------------


def gauss_sum(chi: DirichletCharacter) -> complex:
    q = chi.q
    a = np.arange(1, q, dtype=np.int64)
    return complex(np.sum(chi.values(a) * np.exp(2j * np.pi * a / q)))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^iota sqrt(q))."""
    return gauss_sum(chi) / (1j**chi.iota * math.sqrt(chi.q))


def _afe_lengths(q: int, iota: int, config: AfeConfig) -> tuple[float, int, float, int]:
    X = q ** (1 + config.lam)
    N = u_cutoff(X, iota, config.tolerance)
    Y = q ** (-config.lam)
    N2 = u_cutoff(Y, iota, config.tolerance)
    return X, N, Y, N2


def central_value_afe(chi: DirichletCharacter, config: AfeConfig = AfeConfig()) -> CentralValue:
    """L(1/2, chi) = sum chi(n) n^-1/2 U(n/q^(1+lam)) + eps(chi) sum conj chi(n) n^-1/2 U(n q^lam).

    The second (dual) sum is the term the asymptotic statement absorbs as
    O(q^-100); it is evaluated here unless ``config.dual_term`` is False, in
    which case its size bound is added to the error instead.
    """
    if not chi.is_primitive():
        raise ValueError("the AFE needs a primitive character")
    q, iota = chi.q, chi.iota
    X, N, Y, N2 = _afe_lengths(q, iota, config)
    n = np.arange(1, N + 1, dtype=np.int64)
    w = n**-0.5 * kernel_U(n / X, iota)
    main = complex(np.sum(chi.values(n) * w))
    bound = _u_tail(N, X, iota) + 4 * EPS * N * float(w.sum())
    n2 = np.arange(1, N2 + 1, dtype=np.int64)
    w2 = n2**-0.5 * kernel_U(n2 / Y, iota)
    if config.dual_term:
        dual = root_number(chi) * complex(np.sum(np.conj(chi.values(n2)) * w2))
        bound += _u_tail(N2, Y, iota) + 4 * EPS * (q + N2) * float(w2.sum())
    else:
        dual = 0j
        bound += float(w2.sum()) + _u_tail(N2, Y, iota)
    return CentralValue(main + dual, bound, "afe")


def _pairs(M: int) -> tuple[np.ndarray, np.ndarray]:
    """All (n1, n2) with n1 n2 <= M."""
    n1 = np.arange(1, M + 1, dtype=np.int64)
    cnt = M // n1
    a = np.repeat(n1, cnt)
    start = np.cumsum(cnt) - cnt
    b = np.arange(a.size, dtype=np.int64) - np.repeat(start, cnt) + 1
    return a, b


def central_value_sq_afe(chi: DirichletCharacter, config: AfeConfig = AfeConfig()) -> CentralValue:
    """|L(1/2, chi)|^2 = 2 sum chi(n1) conj chi(n2) (n1 n2)^-1/2 V(n1 n2 / q)."""
    if not chi.is_primitive():
        raise ValueError("the AFE needs a primitive character")
    q, iota = chi.q, chi.iota
    M = v_cutoff(q, iota, config.tolerance)
    Vm = kernel_V(np.arange(1, M + 1) / q, iota, config.quad_tolerance)
    n1, n2 = _pairs(M)
    keep = (n1 % chi.p != 0) & (n2 % chi.p != 0)
    n1, n2 = n1[keep], n2[keep]
    m = n1 * n2
    w = Vm[m - 1] / np.sqrt(m)
    e = (chi.exponents(n1) - chi.exponents(n2)) % chi.group.phi
    val = 2 * float(np.sum(np.cos(2 * np.pi * e / chi.group.phi) * w))
    bound = _v_tail(M, q, iota) + 2 * M * config.quad_tolerance * math.log(M + 1) + 8 * EPS * m.size * float(np.abs(w).sum())
    return CentralValue(complex(val), bound, "afe-sq")


# --- AFE: whole family by FFT over the index ----------------------------------


@dataclass
class LValueTable:
    """Central values for every character mod q, indexed by gamma.

    Entries for imprimitive gamma are NaN.  ``sq`` holds |L|^2 from the
    V-kernel identity when it was requested, else None.
    """

    group: UnitGroup
    config: AfeConfig
    values: np.ndarray
    bounds: np.ndarray
    sq: np.ndarray | None = None
    sq_bounds: np.ndarray | None = None
    lengths: dict | None = None

    def value(self, gamma: int) -> complex:
        return complex(self.values[gamma % self.group.phi])


def _binned(group: UnitGroup, N: int, weight, workers: int) -> np.ndarray:
    """sum over n <= N of weight(n), binned by ind(n); fixed blocks, reduced in order."""
    phi, q = group.phi, group.q
    starts = list(range(1, N + 1, BLOCK))

    def work(lo: int) -> np.ndarray:
        n = np.arange(lo, min(lo + BLOCK, N + 1), dtype=np.int64)
        r = group.ind[n % q]
        u = r >= 0
        return np.bincount(r[u], weights=weight(n[u]), minlength=phi)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(lo) for lo in starts]
    total = np.zeros(phi)
    for part in parts:
        total += part
    return total


def gauss_sums(group: UnitGroup) -> np.ndarray:
    """tau(chi_gamma) for every gamma, via one FFT over the index."""
    phi = group.phi
    t = np.exp(2j * np.pi * group.powers / group.q)
    return phi * np.fft.ifft(t)


def afe_family(group: UnitGroup, config: AfeConfig = AfeConfig(), workers: int = 1,
               with_sq: bool = False) -> LValueTable:
    """All primitive central values mod q at once.

    With chi_gamma(n) = e(gamma ind(n)/phi), each Dirichlet sum is a discrete
    Fourier transform of the weights binned by ind(n).
    """
    q, phi = group.q, group.phi
    gam = np.arange(phi)
    iota = gam % 2
    primitive = (gam % group.p != 0) if group.k > 1 else (gam != 0)
    values = np.full(phi, np.nan, dtype=complex)
    bounds = np.full(phi, np.nan)
    tau = gauss_sums(group)
    lengths = {}
    for par in (0, 1):
        sel = primitive & (iota == par)
        if not sel.any():
            continue
        X, N, Y, N2 = _afe_lengths(q, par, config)
        lengths[f"iota{par}"] = {"X": X, "N": N, "N_dual": N2}
        b1 = _binned(group, N, lambda n: n**-0.5 * kernel_U(n / X, par), workers)
        main = phi * np.fft.ifft(b1)
        b2 = _binned(group, N2, lambda n: n**-0.5 * kernel_U(n / Y, par), workers)
        dual_sum = np.fft.fft(b2)
        eps = tau / (1j**par * math.sqrt(q))
        w1 = float(b1.sum())
        w2 = float(b2.sum())
        err = _u_tail(N, X, par) + 4 * EPS * (N + phi) * w1
        if config.dual_term:
            values[sel] = main[sel] + eps[sel] * dual_sum[sel]
            err += _u_tail(N2, Y, par) + 4 * EPS * (q + N2 + phi) * w2
        else:
            values[sel] = main[sel]
            err += w2 + _u_tail(N2, Y, par)
        bounds[sel] = err
    table = LValueTable(group, config, values, bounds, lengths=lengths)
    if with_sq:
        table.sq, table.sq_bounds = sq_family(group, config, workers)
    return table


def sq_family(group: UnitGroup, config: AfeConfig = AfeConfig(), workers: int = 1):
    """|L(1/2, chi)|^2 for every primitive chi from the V-kernel double sum."""
    q, phi, p = group.q, group.phi, group.p
    gam = np.arange(phi)
    primitive = (gam % p != 0) if group.k > 1 else (gam != 0)
    out = np.full(phi, np.nan)
    bnd = np.full(phi, np.nan)
    for par in (0, 1):
        sel = primitive & (gam % 2 == par)
        if not sel.any():
            continue
        M = v_cutoff(q, par, config.tolerance)
        Vm = kernel_V(np.arange(1, M + 1) / q, par, config.quad_tolerance)
        n1, n2 = _pairs(M)
        r1, r2 = group.ind[n1 % q], group.ind[n2 % q]
        keep = (r1 >= 0) & (r2 >= 0)
        m = n1[keep] * n2[keep]
        w = Vm[m - 1] / np.sqrt(m)
        bins = np.bincount((r1[keep] - r2[keep]) % phi, weights=w, minlength=phi)
        vals = 2 * phi * np.fft.ifft(bins)
        out[sel] = vals.real[sel]
        bnd[sel] = (_v_tail(M, q, par) + 2 * M * config.quad_tolerance * math.log(M + 1)
                    + 8 * EPS * (m.size + phi) * float(np.abs(w).sum()))
    return out, bnd
