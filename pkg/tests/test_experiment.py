import math
from dataclasses import replace

import numpy as np
import pytest

from relaymon import cli
from relaymon import experiment as ex
from relaymon.experiment import (
    ConfigError,
    ExperimentConfig,
    SweepSpec,
    parse_config,
    read_raw_csv,
    read_summary_csv,
    run_point,
    run_records,
    run_trial,
    summarize,
    sweep,
    write_csv,
)


def small(kind="single", trials=20, **kw):
    values = {"power": (0.0, 30.0, 60.0), "position": (0.0, 2.0, 4.0)}.get(kind, ())
    return ExperimentConfig(trials=trials, sweep=SweepSpec(kind, values), **kw)


def test_default_noise_and_powers():
    c = parse_config()
    assert c.noise_w == pytest.approx(7.96e-14, rel=1e-3)
    assert 10 * math.log10(c.noise_w * 1e3) == pytest.approx(-100.99, abs=0.01)
    p = c.params()
    assert p.ps_w == pytest.approx(10.0) and p.pr_w == pytest.approx(10.0)
    assert (p.tau, p.n_relay, p.m_monitor) == (3.0, 4, 4)
    assert c.topology.pos_e == (2.0, 3.0)


def test_p_dbm_conversion():
    assert parse_config({"p-dbm": "40"}).params().p_max_w == pytest.approx(10.0)
    assert ex.dbm_to_w(float("-inf")) == 0.0


def test_n0_override():
    assert parse_config({"n0_w": "1e-12"}).params().n0_w == 1e-12


def test_plain_pathloss_model():
    assert parse_config({"pathloss": "plain"}).params().ref_gain == 1.0
    assert parse_config().params().ref_gain == pytest.approx((ex.SPEED_OF_LIGHT / (4 * math.pi * 5e12)) ** 2)


@pytest.mark.parametrize("values, message", [
    ({"tau": "1.5"}, "tau"),
    ({"trials": "0"}, "trials"),
    ({"n": "2.5"}, "integer"),
    ({"ps_dbm": "ten"}, "malformed"),
    ({"bogus": "1"}, "unknown key"),
    ({"schemes": "s1,xx"}, "unknown scheme"),
    ({"pos_e": "1"}, "x,y"),
    ({"pos_e": "0,0"}, "co-located"),
    ({"pathloss": "hata"}, "pathloss"),
])
def test_config_errors(values, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(values)


def test_config_file_precedence(tmp_path):
    f = tmp_path / "scenario.cfg"
    f.write_text("# reference scenario\ntrials = 7\np-dbm = 20  # budget\npos_e = 1, 3\n\n")
    c = parse_config({"trials": "9"}, f)
    assert c.trials == 9
    assert c.p_dbm == 20.0
    assert c.topology.pos_e == (1.0, 3.0)


def test_config_file_errors(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("trials 7\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(config_file=f)
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(config_file=tmp_path / "missing.cfg")


def test_sweep_grids():
    assert parse_config(kind="power").sweep.values == tuple(float(x) for x in range(0, 61, 5))
    c = parse_config({"ex_step": "1", "ey": "4"}, kind="position")
    assert c.sweep.values == (0.0, 1.0, 2.0, 3.0, 4.0) and c.sweep.ey_km == 4.0
    with pytest.raises(ConfigError):
        SweepSpec("power", (1.0, 1.0))
    with pytest.raises(ConfigError):
        SweepSpec("position", ())


def test_single_sweep_cardinality():
    c = small(trials=1)
    assert len(run_records(c)) == len(ex.SCHEMES)


def test_run_trial_pairs_schemes():
    c = small("power")
    for k in range(50):
        s2 = run_trial(c, 30.0, "strategy2", k)
        assert s2.rate_bps_hz >= run_trial(c, 30.0, "bench_ee", k).rate_bps_hz
        assert s2.rate_bps_hz >= run_trial(c, 30.0, "bench_ej", k).rate_bps_hz
    a = run_point(c, 30.0, 3)
    b = run_point(c, 30.0, 3)
    assert a == b


def test_zero_budget_strategy1_is_unjammed():
    from relaymon.channel import distances, sample_fading, trial_rng
    from relaymon.rates import effective_rate, gammas_jam_first

    c = ExperimentConfig(trials=30, sweep=SweepSpec("power", (float("-inf"),), schemes=("s1",)))
    rows = sweep(c)
    params, topo = c.point(float("-inf"))
    assert params.p_max_w == 0.0
    rates = [effective_rate(gammas_jam_first(sample_fading(params, trial_rng(c.seed, k), distances(topo)),
                                             params, np.zeros(4)))[1] for k in range(30)]
    assert rows[0].mean_rate == pytest.approx(np.mean(rates), rel=1e-12)


def test_position_sweep_moves_monitor():
    c = small("position", trials=3)
    recs = run_records(c)
    assert {r.sweep_value for r in recs} == {0.0, 2.0, 4.0}
    p, topo = c.point(4.0)
    assert topo.pos_e == (4.0, 3.0)


def test_summary_matches_raw():
    recs = run_records(small("power", trials=40))
    rows = summarize(recs)
    for row in rows:
        rates = np.array([r.rate_bps_hz for r in recs if (r.sweep_value, r.scheme) == (row.sweep_value, row.scheme)])
        assert row.trials == rates.size
        assert row.mean_rate == pytest.approx(rates.mean(), abs=1e-12)
        assert row.stderr == pytest.approx(rates.std(ddof=1) / math.sqrt(rates.size), abs=1e-12)


def test_csv_empty_and_single(tmp_path):
    f = tmp_path / "empty.csv"
    write_csv([], f)
    assert f.read_text() == ",".join(ex.RAW_HEADER) + "\n"
    rec = run_records(small(trials=1))[:1]
    write_csv(rec, f)
    data = f.read_bytes()
    assert data.count(b"\n") == 2 and b"\r" not in data


def test_csv_round_trip(tmp_path):
    rows = summarize(run_records(small("position", trials=15)))
    f = tmp_path / "summary.csv"
    write_csv(rows, f)
    back = read_summary_csv(f)
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        assert (a.sweep_kind, a.sweep_value, a.scheme, a.trials) == (b.sweep_kind, b.sweep_value, b.scheme, b.trials)
        # files carry 9 significant digits; the read-back must equal that rounding exactly
        assert b.mean_rate == float(format(a.mean_rate, ".9g"))
        assert b.stderr == float(format(a.stderr, ".9g"))
    raw = run_records(small(trials=3))
    write_csv(raw, tmp_path / "raw.csv")
    assert [r.rate_bps_hz for r in read_raw_csv(tmp_path / "raw.csv")] == pytest.approx([r.rate_bps_hz for r in raw])


def test_csv_write_failure_names_path(tmp_path):
    target = tmp_path / "no" / "such" / "dir.csv"
    with pytest.raises(OSError, match="dir.csv"):
        write_csv([], target)


def test_numerical_failure_is_flagged(monkeypatch):
    def boom(ch, params):
        raise ex.jam_first.ConvergenceError("forced")

    monkeypatch.setattr(ex.jam_first, "solve", boom)
    rec = run_trial(small(), 40.0, "strategy1", 0)
    assert rec.failed and rec.branch == ex.FAILURE_LABEL and rec.rate_bps_hz == 0.0


def test_workers_do_not_change_output(tmp_path):
    c = small("power", trials=30)
    write_csv(run_records(c, workers=1), tmp_path / "a.csv")
    write_csv(run_records(c, workers=2, chunk=7), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


# -- CLI ----------------------------------------------------------------------

def test_cli_single(capsys):
    assert cli.main(["single", "--trial", "2", "--schemes", "s1,s2"]) == 0
    out = capsys.readouterr().out
    assert "T6=" in out and "branch=" in out and "f_min=" in out
    assert "single,40,strategy1" in out and "bench_ee" not in out.split("sweep_kind")[1]


def test_cli_sweep_power_csv(tmp_path):
    f = tmp_path / "power.csv"
    rc = cli.main(["sweep-power", "--trials", "5", "--p-dbm-min", "0", "--p-dbm-max", "20",
                   "--p-dbm-step", "10", "--out", str(f)])
    assert rc == 0
    rows = read_summary_csv(f)
    assert len(rows) == 3 * 4 and {r.trials for r in rows} == {5}


def test_cli_sweep_position_raw(tmp_path):
    f = tmp_path / "pos.csv"
    rc = cli.main(["sweep-position", "--trials", "2", "--ex-step", "2", "--ey", "4", "--raw",
                   "--schemes", "s2,ee", "--out", str(f)])
    assert rc == 0
    recs = read_raw_csv(f)
    assert len(recs) == 3 * 2 * 2


def test_cli_config_error_exit_code(capsys):
    assert cli.main(["single", "--tau", "1.5"]) == 2
    assert "tau" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        cli.main(["single", "--bogus"])
    assert exc.value.code == 2


def test_cli_numerical_failure_exit_code(monkeypatch, capsys):
    def boom(ch, params):
        raise ex.jam_first.ConvergenceError("forced")

    monkeypatch.setattr(ex.jam_first, "solve", boom)
    assert cli.main(["sweep-power", "--trials", "2", "--p-dbm-max", "0", "--schemes", "s1"]) == 3
