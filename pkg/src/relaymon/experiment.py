"""Monte-Carlo harness: configuration, paired trials, sweeps and CSV output.

Every trial index owns an independent random stream derived from
``(master_seed, trial_index)``. All schemes and all grid points of a sweep
see the same fading draw for a given trial, so comparisons are paired and
results do not depend on execution order or worker count.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import benchmarks, eavesdrop_first, jam_first
from .channel import DegenerateGeometryError, RankDeficiencyError, SystemParams, Topology, distances, sample_fading, trial_rng

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0

SCHEMES = ("strategy1", "strategy2", "bench_ee", "bench_ej")
SCHEME_ALIASES = {"s1": "strategy1", "s2": "strategy2", "ee": "bench_ee", "ej": "bench_ej"}
SWEEP_KINDS = ("power", "position", "single")
PATHLOSS_MODELS = ("fspl", "plain")

RAW_HEADER = ("sweep_kind", "sweep_value", "scheme", "trial", "rate_bps_hz", "c_sd", "c_se", "branch", "power_used_w")
SUMMARY_HEADER = ("sweep_kind", "sweep_value", "scheme", "mean_rate", "stderr", "trials")

FAILURE_LABEL = "NumericalFailure"


class ConfigError(ValueError):
    pass


def dbm_to_w(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def noise_power_w(density_dbm_hz: float, bandwidth_hz: float) -> float:
    return dbm_to_w(density_dbm_hz + 10.0 * math.log10(bandwidth_hz))


def free_space_gain(carrier_hz: float, ref_km: float = 1.0) -> float:
    """Free-space power gain ``(lambda / (4 pi d0))**2`` at ``ref_km``."""
    return (SPEED_OF_LIGHT / (4.0 * math.pi * carrier_hz * ref_km * 1e3)) ** 2


def canonical_scheme(name: str) -> str:
    name = SCHEME_ALIASES.get(name, name)
    if name not in SCHEMES:
        raise ConfigError(f"unknown scheme {name!r}; expected one of {', '.join(SCHEMES)}")
    return name


@dataclass(frozen=True)
class SweepSpec:
    kind: str = "single"
    values: tuple = ()
    ey_km: float = 3.0
    schemes: tuple = SCHEMES

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ConfigError(f"unknown sweep kind {self.kind!r}")
        object.__setattr__(self, "schemes", tuple(canonical_scheme(s) for s in self.schemes))
        if not self.schemes:
            raise ConfigError("no schemes selected")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("duplicate schemes")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.kind != "single":
            if not vals:
                raise ConfigError("sweep grid is empty")
            if any(math.isnan(v) for v in vals):
                raise ConfigError("sweep grid contains NaN")
            if self.kind == "position" and not all(math.isfinite(v) for v in vals):
                raise ConfigError("position grid must be finite")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigError("sweep grid must be strictly increasing")


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenario in natural units; defaults reproduce the reference setup."""

    ps_dbm: float = 40.0
    pr_dbm: float = 40.0
    p_dbm: float = 40.0
    noise_dbm_hz: float = -174.0
    bandwidth_hz: float = 20e6
    n0_w: Optional[float] = None
    carrier_hz: float = 5e9
    pathloss: str = "fspl"
    tau: float = 3.0
    n: int = 4
    m: int = 4
    topology: Topology = field(default_factory=Topology)
    trials: int = 1000
    seed: int = 1
    sweep: SweepSpec = field(default_factory=SweepSpec)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.pathloss not in PATHLOSS_MODELS:
            raise ConfigError(f"unknown pathloss model {self.pathloss!r}")
        if not self.bandwidth_hz > 0 or not self.carrier_hz > 0:
            raise ConfigError("bandwidth and carrier frequency must be positive")
        if self.n0_w is not None and not self.n0_w > 0:
            raise ConfigError(f"n0_w must be positive, got {self.n0_w}")
        try:
            self.params()
            distances(self.topology)
        except DegenerateGeometryError as exc:
            raise ConfigError(str(exc)) from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def noise_w(self) -> float:
        if self.n0_w is not None:
            return float(self.n0_w)
        return noise_power_w(self.noise_dbm_hz, self.bandwidth_hz)

    @property
    def ref_gain(self) -> float:
        return free_space_gain(self.carrier_hz) if self.pathloss == "fspl" else 1.0

    def params(self, p_dbm: Optional[float] = None) -> SystemParams:
        p = self.p_dbm if p_dbm is None else p_dbm
        return SystemParams(
            ps_w=dbm_to_w(self.ps_dbm),
            pr_w=dbm_to_w(self.pr_dbm),
            p_max_w=dbm_to_w(p),
            n0_w=self.noise_w,
            tau=self.tau,
            n_relay=self.n,
            m_monitor=self.m,
            ref_gain=self.ref_gain,
        )

    def point(self, sweep_value: float):
        """SystemParams and Topology at one grid point."""
        kind = self.sweep.kind
        if kind == "power":
            return self.params(sweep_value), self.topology
        if kind == "position":
            return self.params(), self.topology.with_monitor(sweep_value, self.sweep.ey_km)
        return self.params(), self.topology

    def grid(self) -> tuple:
        return (self.p_dbm,) if self.sweep.kind == "single" else self.sweep.values


@dataclass(frozen=True)
class TrialRecord:
    sweep_kind: str
    sweep_value: float
    scheme: str
    trial: int
    rate_bps_hz: float
    c_sd: float
    c_se: float
    branch: str
    power_used_w: float
    failed: bool = False

    def row(self):
        return (self.sweep_kind, _fmt(self.sweep_value), self.scheme, str(self.trial),
                _fmt(self.rate_bps_hz), _fmt(self.c_sd), _fmt(self.c_se), self.branch, _fmt(self.power_used_w))


@dataclass(frozen=True)
class SummaryRow:
    sweep_kind: str
    sweep_value: float
    scheme: str
    mean_rate: float
    stderr: float
    trials: int

    def row(self):
        return (self.sweep_kind, _fmt(self.sweep_value), self.scheme,
                _fmt(self.mean_rate), _fmt(self.stderr), str(self.trials))


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def evaluate(scheme: str, ch, params: SystemParams):
    """Solve one scheme on one realization; returns (outcome, label, power)."""
    if scheme == "strategy1":
        sol = jam_first.solve(ch, params)
        return sol.outcome, sol.case_id.value, sol.outcome.power_used_w
    if scheme == "strategy2":
        sol = eavesdrop_first.solve(ch, params)
        return sol.outcome, sol.branch.value, sol.pe_w
    if scheme == "bench_ee":
        out = benchmarks.eval_ee(ch, params)
        return out, out.label, 0.0
    if scheme == "bench_ej":
        out = benchmarks.eval_ej(ch, params)
        return out, out.label, params.p_max_w
    raise ConfigError(f"unknown scheme {scheme!r}")


def run_point(config: ExperimentConfig, sweep_value: float, trial_index: int,
              schemes: Optional[Sequence[str]] = None) -> list[TrialRecord]:
    """All requested schemes on the one fading draw of ``trial_index``."""
    params, topo = config.point(sweep_value)
    ch = sample_fading(params, trial_rng(config.seed, trial_index), distances(topo))
    records = []
    for scheme in schemes or config.sweep.schemes:
        scheme = canonical_scheme(scheme)
        try:
            out, label, power = evaluate(scheme, ch, params)
            rec = TrialRecord(config.sweep.kind, sweep_value, scheme, trial_index, out.rate,
                              out.rates.c_sd, out.rates.c_se, label, power)
        except (jam_first.ConvergenceError, eavesdrop_first.BracketError, RankDeficiencyError,
                FloatingPointError, ValueError) as exc:
            log.warning("trial %d, %s at %s: %s", trial_index, scheme, sweep_value, exc)
            rec = TrialRecord(config.sweep.kind, sweep_value, scheme, trial_index, 0.0,
                              math.nan, math.nan, FAILURE_LABEL, math.nan, failed=True)
        records.append(rec)
    return records


def run_trial(config: ExperimentConfig, sweep_value: float, scheme: str, trial_index: int) -> TrialRecord:
    return run_point(config, sweep_value, trial_index, [scheme])[0]


def _record_key(r: TrialRecord):
    return (r.sweep_value, r.scheme, r.trial)


def _run_chunk(args):
    config, sweep_value, start, stop = args
    out = []
    for k in range(start, stop):
        out.extend(run_point(config, sweep_value, k))
    return out


def run_records(config: ExperimentConfig, workers: int = 1, chunk: int = 250) -> list[TrialRecord]:
    """Raw records for the whole grid, sorted by (sweep_value, scheme, trial)."""
    tasks = [(config, v, s, min(s + chunk, config.trials))
             for v in config.grid() for s in range(0, config.trials, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    records = [r for part in parts for r in part]
    records.sort(key=_record_key)
    return records


def summarize(records: Iterable[TrialRecord]) -> list[SummaryRow]:
    groups: dict = {}
    for r in sorted(records, key=_record_key):
        groups.setdefault((r.sweep_kind, r.sweep_value, r.scheme), []).append(r.rate_bps_hz)
    rows = []
    for (kind, value, scheme), rates in groups.items():
        a = np.asarray(rates, dtype=float)
        stderr = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
        rows.append(SummaryRow(kind, value, scheme, float(a.mean()), stderr, int(a.size)))
    return rows


def sweep(config: ExperimentConfig, workers: int = 1) -> list[SummaryRow]:
    """Mean rate and standard error per grid point and scheme."""
    return summarize(run_records(config, workers))


def write_csv(rows, path, raw: Optional[bool] = None):
    """Write TrialRecords (raw) or SummaryRows (summary) as UTF-8 CSV with LF endings.

    ``raw`` picks the header for an empty list; otherwise it is inferred.
    """
    rows = list(rows)
    if raw is None:
        raw = not rows or isinstance(rows[0], TrialRecord)
    header = RAW_HEADER if raw else SUMMARY_HEADER
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in rows:
                writer.writerow(r.row())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_summary_csv(path) -> list[SummaryRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SUMMARY_HEADER:
            raise ValueError(f"{path}: not a summary CSV")
        return [SummaryRow(r["sweep_kind"], float(r["sweep_value"]), r["scheme"], float(r["mean_rate"]),
                           float(r["stderr"]), int(r["trials"])) for r in reader]


def read_raw_csv(path) -> list[TrialRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RAW_HEADER:
            raise ValueError(f"{path}: not a raw CSV")
        return [TrialRecord(r["sweep_kind"], float(r["sweep_value"]), r["scheme"], int(r["trial"]),
                            float(r["rate_bps_hz"]), float(r["c_sd"]), float(r["c_se"]), r["branch"],
                            float(r["power_used_w"]), r["branch"] == FAILURE_LABEL) for r in reader]


# -- configuration parsing ---------------------------------------------------

def _float(key, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: malformed number {text!r}") from None


def _int(key, text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: malformed integer {text!r}") from None
    if not value.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(value)


def _point(key, text):
    parts = str(text).split(",") if isinstance(text, str) else list(text)
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'x,y', got {text!r}")
    return (_float(key, parts[0]), _float(key, parts[1]))


def _schemes(key, text):
    items = text.split(",") if isinstance(text, str) else text
    return tuple(canonical_scheme(s.strip()) for s in items if s.strip())


def _pathloss(key, text):
    if text not in PATHLOSS_MODELS:
        raise ConfigError(f"{key}: expected one of {', '.join(PATHLOSS_MODELS)}, got {text!r}")
    return text


# key -> (converter, minimum or None)
KEYS = {
    "ps_dbm": (_float, None), "pr_dbm": (_float, None), "p_dbm": (_float, None),
    "noise_dbm_hz": (_float, None), "bandwidth_hz": (_float, None), "n0_w": (_float, None),
    "carrier_hz": (_float, None), "pathloss": (_pathloss, None), "tau": (_float, 2.0),
    "n": (_int, 1), "m": (_int, 1),
    "pos_s": (_point, None), "pos_r": (_point, None), "pos_d": (_point, None), "pos_e": (_point, None),
    "trials": (_int, 1), "seed": (_int, 0), "schemes": (_schemes, None),
    "p_dbm_min": (_float, None), "p_dbm_max": (_float, None), "p_dbm_step": (_float, None),
    "ex_min": (_float, None), "ex_max": (_float, None), "ex_step": (_float, None), "ey": (_float, None),
}

SWEEP_DEFAULTS = {"p_dbm_min": 0.0, "p_dbm_max": 60.0, "p_dbm_step": 5.0,
                  "ex_min": 0.0, "ex_max": 4.0, "ex_step": 0.5, "ey": 3.0}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def convert(raw: dict) -> dict:
    """Validate and convert string (or already typed) values by key."""
    out = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        conv, minimum = KEYS[key]
        value = conv(key, value)
        if conv is _float and not math.isfinite(value) and key not in ("p_dbm", "p_dbm_min"):
            raise ConfigError(f"{key}: value must be finite, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigError(f"{key}: {value} is below the minimum {minimum}")
        out[key] = value
    return out


def _grid(lo, hi, step, key):
    if not step > 0:
        raise ConfigError(f"{key}_step must be positive")
    if hi < lo:
        raise ConfigError(f"{key}_max must not be below {key}_min")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 12) for i in range(count))


def build_config(values: dict, kind: str = "single") -> ExperimentConfig:
    """ExperimentConfig from converted key/values layered over the defaults."""
    v = dict(SWEEP_DEFAULTS)
    v.update(values)
    kwargs = {k: v[k] for k in ("ps_dbm", "pr_dbm", "p_dbm", "noise_dbm_hz", "bandwidth_hz", "n0_w",
                                "carrier_hz", "pathloss", "tau", "n", "m", "trials", "seed") if k in v}
    topo = Topology()
    topo = Topology(*(v.get(k, getattr(topo, k)) for k in ("pos_s", "pos_r", "pos_d", "pos_e")))
    schemes = v.get("schemes", SCHEMES)
    if kind == "power":
        sweep_spec = SweepSpec("power", _grid(v["p_dbm_min"], v["p_dbm_max"], v["p_dbm_step"], "p_dbm"),
                               schemes=schemes)
    elif kind == "position":
        sweep_spec = SweepSpec("position", _grid(v["ex_min"], v["ex_max"], v["ex_step"], "ex"),
                               ey_km=v["ey"], schemes=schemes)
    else:
        sweep_spec = SweepSpec("single", schemes=schemes)
    return ExperimentConfig(topology=topo, sweep=sweep_spec, **kwargs)


def parse_config(cli_values: Optional[dict] = None, config_file=None, kind: str = "single") -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by CLI values.

    ``cli_values`` maps keys (dashes or underscores) to strings or numbers;
    ``None`` values are treated as absent.
    """
    merged = {}
    if config_file is not None:
        merged.update(convert(read_config_file(config_file)))
    cli = {k.replace("-", "_"): val for k, val in (cli_values or {}).items() if val is not None}
    merged.update(convert(cli))
    return build_config(merged, kind)


def with_trials(config: ExperimentConfig, trials: int) -> ExperimentConfig:
    return replace(config, trials=trials)
