"""Command-line interface: ``orbit-lvalues <command> [options]``.

Reports are deterministic for a given configuration: everything that can
vary between identical runs (wall time, worker count, host) goes into a
``<out>.meta.json`` sidecar rather than the report itself.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from sympy import isprime

from . import __version__
from .characters import UnitGroup
from .dioph import (CSV_COLUMNS, best_approximations, box_pair_count, max_box_length, random_boxes,
                    scan_rows, INEFFECTIVE_THRESHOLD)
from .lvalue import AfeConfig, KernelToleranceError, OracleBoundError, afe_family
from .mollifier import iwaniec_sarnak_coefficients, load_coefficients
from .moments import c_kappa, moment_report, ENVELOPE_EPS, ENVELOPE_FLOOR
from .orbits import (char_average, char_average_closed, char_average_exact, enumerate_orbit,
                     enumerate_thin_orbit, orbit_divisors, thin_orbits)
from .verify import SUITES

SIG_DIGITS = 15
# keys that describe how a run was executed rather than what it computes
RUNTIME_KEYS = ("workers", "cache_dir", "out", "format", "config")


@dataclass
class RunConfig:
    p: int = 3
    k: int = 4
    d: int | None = None
    kappa: int | None = None
    thin: bool = False
    theta: tuple[float, ...] = (0.0,)
    lam: float = 0.1
    delta: float = 0.1
    tolerance: float = 1e-12
    oracle_bound: int = 10_000
    workers: int = 1
    cache_dir: str | None = None
    out: str | None = None
    format: str = "json"
    coefficients: str | None = None
    count: int = 100
    seed: int = 0
    height: int | None = None
    zeta: int | None = None
    n: tuple[int, ...] = ()
    check: bool = False

    def validate(self) -> None:
        if not (self.p > 2 and isprime(self.p)):
            raise ValueError(f"p={self.p} must be an odd prime")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for t in self.theta:
            if not 0 <= t < 0.5:
                raise ValueError(f"theta={t} outside [0, 1/2)")
        if self.kappa is not None and not 0 < self.kappa <= self.k - 1:
            raise ValueError(f"kappa must satisfy 0 < kappa <= k-1={self.k - 1}")
        if self.thin and self.kappa is None:
            raise ValueError("--thin needs --kappa")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.d is not None and (self.p - 1) % self.d:
            raise ValueError(f"d={self.d} does not divide p-1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    # flat key=value text; tuples are comma separated, None is an empty value
    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                s = ""
            elif isinstance(v, tuple):
                s = ",".join(repr(x) for x in v)
            else:
                s = repr(v) if isinstance(v, float) else str(v)
            lines.append(f"{f.name}={s}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        return cls(**parse_config_text(text))

    def echo(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if k not in RUNTIME_KEYS}


_CASTS = {"p": int, "k": int, "d": int, "kappa": int, "thin": "bool", "theta": (float,),
          "lam": float, "delta": float, "tolerance": float, "oracle_bound": int, "workers": int,
          "cache_dir": str, "out": str, "format": str, "coefficients": str, "count": int,
          "seed": int, "height": int, "zeta": int, "n": (int,), "check": "bool"}


def parse_config_text(text: str) -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        key, val = key.strip().replace("-", "_"), val.strip()
        if key == "lambda":
            key = "lam"
        if key not in _CASTS:
            raise ValueError(f"unknown config key {key!r}")
        cast = _CASTS[key]
        if isinstance(cast, tuple):
            out[key] = tuple(cast[0](x) for x in val.split(",") if x.strip())
        elif cast == "bool":
            out[key] = val.lower() in ("1", "true", "yes")
        else:
            out[key] = cast(val) if val else None
    return out


# --- formatting --------------------------------------------------------------


def _round(x):
    if isinstance(x, float):
        if math.isfinite(x):
            return float(f"{x:.{SIG_DIGITS}g}")
        return None
    if isinstance(x, complex):
        return {"re": _round(x.real), "im": _round(x.imag)}
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return _round(x.item())
    return x


def dumps_json(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(_round(v), sort_keys=True, separators=(",", ":"))
    return "" if v is None else str(v)


def dumps_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _flatten(report: dict) -> dict:
    row = {}
    for k, v in report.items():
        if isinstance(v, dict) and k in ("family", "envelopes", "error_ratios", "empirical_first"):
            for kk, vv in v.items():
                row[f"{k}.{kk}"] = vv
        else:
            row[k] = v
    return row


def emit(cfg: RunConfig, payload, rows: list[dict] | None, started: float, stream=None) -> None:
    """Write the report (stdout or --out) and, with --out, the runtime sidecar."""
    if cfg.format == "csv":
        text = dumps_csv(rows if rows is not None else [payload])
    else:
        text = dumps_json(payload)
    if cfg.out:
        Path(cfg.out).write_text(text)
        meta = {"wall_time_s": round(time.perf_counter() - started, 3), "workers": cfg.workers,
                "cache_dir": cfg.cache_dir, "version": __version__}
        Path(cfg.out + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        (stream or sys.stdout).write(text)


def _header(cfg: RunConfig, command: str) -> dict:
    return {"command": command, "version": __version__, "config": cfg.echo(),
            "envelope": {"eps": ENVELOPE_EPS, "floor": ENVELOPE_FLOOR}}


# --- commands ----------------------------------------------------------------


def _group(cfg: RunConfig) -> UnitGroup:
    return UnitGroup(cfg.p, cfg.k, cfg.cache_dir)


def cmd_orbits(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    group = _group(cfg)
    rows = []
    for d in orbit_divisors(cfg.p, cfg.k):
        orbit = enumerate_orbit(cfg.p, cfg.k, d, group)
        parts = {kappa: len(thin_orbits(orbit, kappa)) for kappa in range(1, cfg.k)}
        rows.append({"p": cfg.p, "k": cfg.k, "d": d, "order": orbit.order, "size": len(orbit),
                     "iota": orbit.iota, "thin_partition": parts})
    total = sum(r["size"] for r in rows)
    expected = group.phi - (group.phi // cfg.p if cfg.k > 1 else 1)
    payload = _header(cfg, "orbits") | {"orbits": rows, "primitive_total": total,
                                         "primitive_expected": expected}
    return payload, rows, 0 if total == expected else 1


def _mollifier(cfg: RunConfig, q: int, theta: float):
    if cfg.coefficients:
        return load_coefficients(cfg.coefficients, q, theta)
    return iwaniec_sarnak_coefficients(q, theta)


def _families(cfg: RunConfig, group: UnitGroup):
    ds = [cfg.d] if cfg.d is not None else orbit_divisors(cfg.p, cfg.k)
    for d in ds:
        orbit = enumerate_orbit(cfg.p, cfg.k, d, group)
        if cfg.thin:
            yield from thin_orbits(orbit, cfg.kappa)
        else:
            yield orbit


def _moment_reports(cfg: RunConfig) -> list[dict]:
    group = _group(cfg)
    table = afe_family(group, AfeConfig(lam=cfg.lam, tolerance=cfg.tolerance), workers=cfg.workers)
    reports = []
    for theta in cfg.theta:
        moll = _mollifier(cfg, group.q, theta)
        for fam in _families(cfg, group):
            rep = moment_report(fam, moll, table)
            d = rep.to_dict()
            if cfg.thin:
                d["c_kappa"] = c_kappa(cfg.kappa, cfg.k)
            reports.append(d)
    return reports


def _breach(rep: dict, tol: float) -> bool:
    r = rep["error_ratios"]
    return r["first"] > 1 or r["second"] > 1 or rep["lower_bound"] > 1 + tol or rep["empirical_second"] < -tol


def cmd_moment(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    reports = _moment_reports(cfg)
    status = 1 if cfg.check and any(_breach(r, 1e-9) for r in reports) else 0
    payload = _header(cfg, "moment") | {"reports": reports}
    return payload, [_flatten(r) for r in reports], status


def cmd_nonvanish(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    rows = []
    for r in _moment_reports(cfg):
        rows.append({"family": r["family"], "theta": r["theta"], "size": r["size"],
                     "lower_bound": r["lower_bound"], "target_ratio": r["target_ratio"],
                     "nonvanishing_count": r["nonvanishing_count"],
                     "undetermined_count": r["undetermined_count"],
                     "fraction": r["nonvanishing_count"] / r["size"], "flags": r["flags"]})
    status = 0
    if cfg.check and any(row["fraction"] < row["target_ratio"] for row in rows):
        status = 1
    payload = _header(cfg, "nonvanish") | {"families": rows}
    return payload, [_flatten(r) for r in rows], status


def cmd_roth_scan(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    if cfg.height is not None:
        if cfg.zeta is None:
            raise ValueError("--height needs --zeta (the residue of the Teichmuller root)")
        s = best_approximations(cfg.zeta, cfg.p, cfg.k, cfg.height)
        payload = _header(cfg, "roth-scan") | {
            "zeta": s.zeta, "best_valuation": s.best_valuation, "pairs": s.pairs,
            "records": [dataclasses.asdict(r) for r in s.records], "caveat": s.caveat}
        rows = [{"a": a, "b": b, "valuation": v} for a, b, v in s.pairs]
        return payload, rows, 0
    L = max_box_length(cfg.p, cfg.k, cfg.delta)
    all_rows, totals = [], []
    for scan in random_boxes(cfg.p, cfg.k, cfg.delta, cfg.count, cfg.seed):
        _, total = box_pair_count(scan)
        totals.append(total)
        all_rows.extend(scan_rows(scan))
    status = 1 if cfg.check and max(totals) > cfg.p - 3 else 0
    payload = _header(cfg, "roth-scan") | {
        "length": L, "boxes": len(totals), "max_count": max(totals), "bound": cfg.p - 3,
        "exceptions": sum(t > cfg.p - 3 for t in totals), "pairs": all_rows,
        "caveat": INEFFECTIVE_THRESHOLD}
    rows = [dict(zip(CSV_COLUMNS, r)) for r in all_rows]
    return payload, rows, status


def cmd_char_avg(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    group = _group(cfg)
    if cfg.d is None:
        raise ValueError("char-avg needs --d")
    orbit = enumerate_orbit(cfg.p, cfg.k, cfg.d, group)
    if cfg.kappa is not None:
        orbit = enumerate_thin_orbit(orbit.members[0], cfg.kappa)
    ns = cfg.n or tuple(range(1, group.q + 1))
    exact = char_average_exact(orbit, ns)
    rows, bad = [], 0
    for n, val in zip(ns, exact):
        closed = char_average_closed(orbit, n)
        bad += val != closed
        z = char_average(orbit, n)
        rows.append({"n": n, "exact_integer": val.as_integer(), "is_zero": val.is_zero(),
                     "re": z.real, "im": z.imag, "closed_form_match": val == closed})
    payload = _header(cfg, "char-avg") | {"family": orbit.describe(), "size": len(orbit),
                                          "values": rows, "mismatches": bad}
    return payload, rows, 1 if bad else 0


def cmd_verify(cfg: RunConfig, suite: str) -> tuple[dict, list[dict], int]:
    fn = SUITES[suite]
    if suite == "refine-lemma":
        res = fn(cfg.p, cfg.k)
    elif suite == "roth-box":
        res = fn(cfg.p, cfg.k, cfg.delta, cfg.count, cfg.seed)
    elif suite == "oracle-equivalence":
        res = fn(cfg.p, cfg.k, lams=(cfg.lam,), oracle_bound=cfg.oracle_bound, workers=cfg.workers)
    else:
        res = fn(cfg.p, cfg.k)
    payload = _header(cfg, "verify") | {"result": res}
    return payload, [{k: v for k, v in res.items() if k != "examples"}], 0 if res["passed"] else 1


# --- argument parsing --------------------------------------------------------


def _common(sp: argparse.ArgumentParser) -> None:
    # defaults are None so that config-file values survive unless overridden
    sp.add_argument("--config", help="key=value config file; flags override it")
    sp.add_argument("--p", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--thin", action="store_true", default=None)
    sp.add_argument("--theta", type=float, nargs="+")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--tolerance", type=float)
    sp.add_argument("--oracle-bound", dest="oracle_bound", type=int)
    sp.add_argument("--workers", type=int, help="default: all available cores")
    sp.add_argument("--cache-dir", dest="cache_dir")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"))
    sp.add_argument("--coefficients", help="CSV of (m, a_m) overriding the default mollifier")
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--height", type=int)
    sp.add_argument("--zeta", type=int)
    sp.add_argument("--n", type=int, nargs="+")
    sp.add_argument("--assert", dest="check", action="store_true", default=None,
                    help="exit nonzero when a tolerance or bound is breached")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbit-lvalues",
                                     description="Central values of Dirichlet L-functions over Galois orbits.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("orbits", "list Galois orbits mod p^k"),
                        ("moment", "mollified first and second moments"),
                        ("nonvanish", "non-vanishing counts and Cauchy-Schwarz ratio"),
                        ("roth-scan", "p-adic approximation and box scans"),
                        ("char-avg", "exact orbit character sums")):
        _common(sub.add_parser(name, help=help_))
    vp = sub.add_parser("verify", help="run a named property suite")
    vp.add_argument("suite", choices=sorted(SUITES))
    _common(vp)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_text(Path(args.config).read_text()))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = tuple(v) if isinstance(v, list) else v
    values.setdefault("workers", os.cpu_count() or 1)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


COMMANDS = {"orbits": cmd_orbits, "moment": cmd_moment, "nonvanish": cmd_nonvanish,
            "roth-scan": cmd_roth_scan, "char-avg": cmd_char_avg}


def main(argv: list[str] | None = None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    started = time.perf_counter()
    try:
        if args.command == "verify":
            payload, rows, status = cmd_verify(cfg, args.suite)
        else:
            payload, rows, status = COMMANDS[args.command](cfg)
    except (OracleBoundError, KernelToleranceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    emit(cfg, payload, rows, started, stream)
    return status


def main_entry() -> None:
    sys.exit(main())
