import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from orbit_lvalues.cli import RunConfig, build_parser, config_from_args, dumps_json, main


def run(argv):
    buf = io.StringIO()
    code = main(argv, stream=buf)
    return code, buf.getvalue()


def test_orbits_table():
    code, out = run(["orbits", "--p", "3", "--k", "3"])
    data = json.loads(out)
    assert code == 0
    assert [(r["d"], r["size"]) for r in data["orbits"]] == [(1, 6), (2, 6)]
    assert data["primitive_total"] == data["primitive_expected"] == 12
    code, out = run(["orbits", "--p", "5", "--k", "2", "--format", "csv"])
    lines = out.strip().splitlines()
    assert lines[0].startswith("p,k,d,order,size")
    assert [l.split(",")[4] for l in lines[1:]] == ["4", "4", "8"]


def test_orbits_rejects_bad_prime():
    with pytest.raises(SystemExit) as e:
        run(["orbits", "--p", "9", "--k", "2"])
    assert e.value.code == 2


def test_verify_suites():
    code, out = run(["verify", "orthogonality", "--p", "3", "--k", "5"])
    res = json.loads(out)["result"]
    assert code == 0 and res["passed"] and res["mismatches"] == 0
    code, out = run(["verify", "refine-lemma", "--p", "3", "--k", "6"])
    assert code == 0 and json.loads(out)["result"]["passed"]
    code, _ = run(["verify", "teichmuller", "--p", "7", "--k", "5"])
    assert code == 0


def test_verify_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as e:
        run(["verify", "nonsense"])
    assert e.value.code == 2


def test_thin_moment_reports_c_kappa():
    code, out = run(["moment", "--p", "3", "--k", "6", "--d", "1", "--thin", "--kappa", "4"])
    reps = json.loads(out)["reports"]
    assert code == 0 and len(reps) == 2
    assert all(r["c_kappa"] == pytest.approx(1 / 7) for r in reps)


def test_theta_zero_equals_unmollified(tmp_path):
    coef = tmp_path / "one.csv"
    coef.write_text("m,a_m\n1,1\n")
    a = run(["moment", "--p", "3", "--k", "5", "--theta", "0"])[1]
    b = run(["moment", "--p", "3", "--k", "5", "--theta", "0.3", "--coefficients", str(coef)])[1]
    ra, rb = json.loads(a)["reports"], json.loads(b)["reports"]
    for x, y in zip(ra, rb):
        assert x["empirical_first"] == y["empirical_first"]
        assert x["empirical_second"] == y["empirical_second"]


def test_assert_mode_exit_codes():
    code, _ = run(["moment", "--p", "3", "--k", "7", "--theta", "0", "--assert"])
    assert code == 0
    code, _ = run(["roth-scan", "--p", "5", "--k", "10", "--count", "20", "--assert"])
    assert code == 0
    code, _ = run(["nonvanish", "--p", "3", "--k", "6", "--theta", "0.3", "--assert"])
    assert code == 0


def test_determinism_and_sidecar(tmp_path):
    outs = []
    for w in ("1", "3"):
        path = tmp_path / f"r{w}.json"
        code, _ = run(["nonvanish", "--p", "3", "--k", "7", "--d", "1", "--theta", "0.1", "0.2",
                       "--workers", w, "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
        meta = json.loads((tmp_path / f"r{w}.json.meta.json").read_text())
        assert meta["workers"] == int(w) and "wall_time_s" in meta
    assert outs[0] == outs[1]


def test_warm_and_cold_cache_identical(tmp_path):
    cache = tmp_path / "cache"
    a = run(["moment", "--p", "3", "--k", "6", "--theta", "0.2", "--cache-dir", str(cache)])[1]
    assert any(cache.iterdir())
    b = run(["moment", "--p", "3", "--k", "6", "--theta", "0.2", "--cache-dir", str(cache)])[1]
    c = run(["moment", "--p", "3", "--k", "6", "--theta", "0.2"])[1]
    assert a == b == c


def test_roth_scan_outputs():
    code, out = run(["roth-scan", "--p", "5", "--k", "6", "--zeta", "2", "--height", "47", "--format", "csv"])
    assert code == 0 and out.splitlines() == ["a,b,valuation", "41,38,5", "-38,41,5"]
    code, out = run(["roth-scan", "--p", "7", "--k", "8", "--count", "5"])
    data = json.loads(out)
    assert data["max_count"] <= 4 and "finite-range" in data["caveat"]


def test_char_avg():
    code, out = run(["char-avg", "--p", "3", "--k", "3", "--d", "1", "--n", "1", "2", "10"])
    vals = json.loads(out)["values"]
    assert code == 0
    assert [v["exact_integer"] for v in vals] == [6, 0, -3]
    code, out = run(["char-avg", "--p", "3", "--k", "4", "--d", "2", "--kappa", "2", "--n", "1", "28"])
    assert code == 0 and json.loads(out)["size"] == 9


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\np=3\nk=5\ntheta=0.1,0.2\nlambda=0.2\n")
    args = build_parser().parse_args(["moment", "--config", str(cfg), "--k", "6"])
    rc = config_from_args(args)
    assert (rc.p, rc.k, rc.theta, rc.lam) == (3, 6, (0.1, 0.2), 0.2)
    cfg.write_text("bogus=1\n")
    with pytest.raises(SystemExit):
        run(["moment", "--config", str(cfg)])


@settings(max_examples=40)
@given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 9),
       st.lists(st.floats(0, 0.4999, allow_nan=False), min_size=1, max_size=4),
       st.floats(1e-3, 5, allow_nan=False), st.one_of(st.none(), st.integers(1, 8)),
       st.booleans(), st.integers(1, 64))
def test_config_roundtrip(p, k, thetas, lam, kappa, check, workers):
    if kappa is not None and kappa > k - 1:
        kappa = None
    c = RunConfig(p=p, k=k, theta=tuple(thetas), lam=lam, kappa=kappa, check=check, workers=workers)
    c.validate()
    assert RunConfig.from_text(c.to_text()) == c


@pytest.mark.parametrize("kw", [dict(p=2), dict(p=15), dict(theta=(0.5,)), dict(k=3, kappa=3),
                                dict(lam=0.0), dict(delta=0.5), dict(d=3), dict(thin=True)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw).validate()


def test_json_precision():
    assert json.loads(dumps_json({"x": 1 / 3}))["x"] == float("%.15g" % (1 / 3))
    assert "0.333333333333333" in dumps_json([1 / 3])
