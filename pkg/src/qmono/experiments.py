"""Monte Carlo and grid experiments on three-qubit pure states.

Every sample is a pure function of ``(seed, index)``; workers only change
wall time. Output files carry no timing or host information, so identical
configs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from math import pi, sqrt

import numpy as np

from . import __version__
from .measures import (
    BACKWARD, FORWARD, OptimizerFailure, concurrence, deficit_functional, discord,
    discord_functional, eof_two_qubit, kw_residual, measure_qubit, one_way_deficit, tangle_ckw,
)
from .monogamy import SIGN_TOL, ScoreTriple, delta_score
from .optimizer import DEFAULT_CONFIG, MeasurementBasis, OptimizerConfig
from .qmat import PureState, partial_trace, shannon_entropy, vn_entropy
from .states import (
    FAMILIES, FAMILY_LAWS, PRNG_NAME, GenWParams, SeededSampler, generalized_w,
    haar_random_pure, random_density_matrix, sample_wclass,
)

log = logging.getLogger(__name__)

MEASURES = ("discord", "deficit_fwd", "deficit_bwd", "eof", "tangle")
FORMATS = ("csv", "json")
FRACTION_COLUMNS = ("power", "frac_nonmono", "stderr", "n_valid", "n_failed")


def score_state(psi: PureState, measure: str, cfg: OptimizerConfig = DEFAULT_CONFIG):
    """Score triple (Q_A:BC, Q_AB, Q_AC) of a three-qubit pure state.

    Returns ``(ScoreTriple, converged)``. Discord and the backward deficit
    measure the non-nodal party; the forward deficit measures A. For the
    pure A:BC cut, discord, both deficits and E^f all equal S(rho_A).
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")
    rab = partial_trace(psi, [0, 1])
    rac = partial_trace(psi, [0, 2])
    if measure == "tangle":
        x = 4.0 * np.linalg.det(partial_trace(psi, [0]).data).real
        return ScoreTriple(max(x, 0.0), concurrence(rab) ** 2, concurrence(rac) ** 2), True
    x = vn_entropy(partial_trace(psi, [0]))
    if measure == "eof":
        return ScoreTriple(x, eof_two_qubit(rab), eof_two_qubit(rac)), True
    if measure == "discord":
        y, z = discord(rab, 1, cfg=cfg), discord(rac, 1, cfg=cfg)
    else:
        kind = FORWARD if measure == "deficit_fwd" else BACKWARD
        y = one_way_deficit(rab, kind, cfg=cfg)
        z = one_way_deficit(rac, kind, cfg=cfg)
    return ScoreTriple(x, y.value, z.value), y.converged and z.converged


@dataclass(frozen=True)
class SweepConfig:
    family: str = "genw"
    measure: str = "deficit_fwd"
    powers: tuple = (1, 2, 3, 4, 5)
    samples: int = 10_000
    grid: tuple | None = None  # (n_theta, n_phi) for genw grid mode
    seed: int = 0
    optimizer: OptimizerConfig = DEFAULT_CONFIG
    out_path: str | None = None
    format: str = "csv"
    mono_tol: float = SIGN_TOL
    threads: int = 1
    gnuplot_path: str | None = None
    gnuplot_power: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {tuple(FAMILIES)}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}; choose from {MEASURES}")
        powers = tuple(int(m) for m in self.powers)
        if not powers or min(powers) < 1:
            raise ValueError("powers must be a non-empty list of positive integers")
        object.__setattr__(self, "powers", powers)
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.grid is not None:
            g = tuple(int(v) for v in self.grid)
            if len(g) != 2 or min(g) < 1:
                raise ValueError(f"grid must be two positive integers, got {self.grid}")
            object.__setattr__(self, "grid", g)
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class SweepResult:
    manifest: dict
    fractions: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # grid rows, one dict per point
    records: list = field(default_factory=list)  # (index, x, y, z, converged)
    wall_time: float = 0.0

    def fraction(self, power):
        for f in self.fractions:
            if f["power"] == power:
                return f["frac_nonmono"]
        raise KeyError(power)


def _manifest(cfg: SweepConfig, kind: str, **extra):
    m = {
        "experiment": kind,
        "family": cfg.family,
        "measure": cfg.measure,
        "distribution": FAMILY_LAWS[cfg.family] if kind != "genw_grid" else
        "uniform grid theta_i = (i+1) pi/(4 n_theta), phi_j = (j+1) 2pi/n_phi",
        "powers": list(cfg.powers),
        "seed": int(cfg.seed),
        "prng": PRNG_NAME,
        "optimizer": cfg.optimizer.as_dict(),
        "mono_tol": cfg.mono_tol,
        "version": __version__,
    }
    if kind == "genw_grid":
        m["grid"] = list(cfg.grid)
    else:
        m["samples"] = cfg.samples
    m.update(extra)
    return m


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    chunk = max(1, len(items) // (threads * 16))
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _eval_state(psi, measure, opt):
    try:
        t, ok = score_state(psi, measure, opt)
        return (t.x, t.y, t.z, ok)
    except OptimizerFailure:
        return (float("nan"),) * 3 + (False,)


def _eval_sample(index, family, seed, measure, opt):
    psi = FAMILIES[family](SeededSampler(seed, index))
    return (index,) + _eval_state(psi, measure, opt)


def _eval_grid_point(tp, measure, opt):
    return _eval_state(generalized_w(GenWParams(*tp)), measure, opt)


def _fractions(records, powers, tol, exclude_premise=False):
    out = []
    valid = [r for r in records if r[4]]
    n_failed = len(records) - len(valid)
    if exclude_premise:
        valid = [r for r in valid if r[2] <= r[1] and r[3] <= r[1]]
    for m in powers:
        n = len(valid)
        bad = sum(1 for r in valid if delta_score(ScoreTriple(*r[1:4]), m) < -tol)
        f = bad / n if n else float("nan")
        out.append({
            "power": m,
            "frac_nonmono": f,
            "stderr": sqrt(f * (1 - f) / n) if n else float("nan"),
            "n_valid": n,
            "n_failed": n_failed,
        })
    return out


def _premise_violations(records):
    return sum(1 for r in records if r[4] and (r[2] > r[1] or r[3] > r[1]))


def genw_grid_points(n_theta, n_phi):
    th = (np.arange(n_theta) + 1) * (pi / 4 / n_theta)
    ph = (np.arange(n_phi) + 1) * (2 * pi / n_phi)
    return th, ph


def sweep_genw_grid(cfg: SweepConfig) -> SweepResult:
    """Monogamy scores on a (theta, phi] grid of generalized W states."""
    if cfg.family != "genw" or cfg.grid is None:
        raise ValueError("sweep_genw_grid needs family='genw' and a grid")
    t0 = time.perf_counter()
    th, ph = genw_grid_points(*cfg.grid)
    pts = [(float(a), float(b)) for a in th for b in ph]
    vals = _pmap(partial(_eval_grid_point, measure=cfg.measure, opt=cfg.optimizer), pts, cfg.threads)
    rows, records = [], []
    for i, ((a, b), (x, y, z, ok)) in enumerate(zip(pts, vals)):
        row = {"theta": a, "phi": b}
        for m in cfg.powers:
            row[f"delta_p{m}"] = (x**m - y**m - z**m) if ok else float("nan")
        rows.append(row)
        records.append((i, x, y, z, ok))
    fr = _fractions(records, cfg.powers, cfg.mono_tol)
    res = SweepResult(
        _manifest(cfg, "genw_grid", n_failed=fr[0]["n_failed"],
                  n_premise_violations=_premise_violations(records)),
        fr, rows, records, time.perf_counter() - t0)
    _persist(res, cfg, "grid")
    return res


def _sample_sweep(cfg: SweepConfig, kind: str, exclude_premise: bool) -> SweepResult:
    t0 = time.perf_counter()
    fn = partial(_eval_sample, family=cfg.family, seed=cfg.seed, measure=cfg.measure,
                 opt=cfg.optimizer)
    records = _pmap(fn, range(cfg.samples), cfg.threads)
    fr = _fractions(records, cfg.powers, cfg.mono_tol, exclude_premise)
    extra = {"n_failed": fr[0]["n_failed"], "n_premise_violations": _premise_violations(records)}
    if exclude_premise:
        extra["premise_rule"] = "records with Q_AB > Q_A:BC or Q_AC > Q_A:BC excluded from fractions"
    res = SweepResult(_manifest(cfg, kind, **extra), fr, [], records, time.perf_counter() - t0)
    _persist(res, cfg, "fractions")
    return res


def estimate_fraction(cfg: SweepConfig) -> SweepResult:
    """Fraction of sampled states with delta < -mono_tol at each power."""
    return _sample_sweep(cfg, "fraction", exclude_premise=False)


def histogram_powers(cfg: SweepConfig) -> SweepResult:
    """Non-monogamous fraction of Haar three-qubit states across powers."""
    if cfg.family != "haar3":
        raise ValueError("histogram_powers needs family='haar3'")
    return _sample_sweep(cfg, "haar_histogram", exclude_premise=True)


# -- persistence -------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _json_clean(v):
    if isinstance(v, float) and not np.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_clean(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_clean(u) for u in v]
    return v


def render_json(obj):
    return json.dumps(_json_clean(obj), indent=1, sort_keys=False, allow_nan=False) + "\n"


def render_gnuplot(res: SweepResult, cfg: SweepConfig, power: int):
    n_t, n_p = cfg.grid
    key = f"delta_p{power}"
    lines = []
    for i in range(n_t):
        vals = [res.rows[i * n_p + j][key] for j in range(n_p)]
        lines.append(" ".join(f"{v:.10e}" for v in vals))
    return "\n".join(lines) + "\n"


def atomic_write(path, text):
    """Write `text` to `path` via a temp file; no partial file is left on failure."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def serialize(res: SweepResult, cfg: SweepConfig, what: str):
    """Main output text plus an optional sidecar manifest (csv mode)."""
    if what == "grid":
        columns = ["theta", "phi"] + [f"delta_p{m}" for m in cfg.powers]
        body_rows, key = res.rows, "rows"
    else:
        columns, body_rows, key = list(FRACTION_COLUMNS), res.fractions, "fractions"
    if cfg.format == "json":
        obj = {"manifest": res.manifest, key: body_rows}
        if what == "grid":
            obj["fractions"] = res.fractions
        return render_json(obj), None
    return render_csv(columns, body_rows), render_json(res.manifest)


def _persist(res, cfg, what):
    log.info("%s sweep finished in %.1f s", res.manifest["experiment"], res.wall_time)
    if cfg.out_path:
        text, sidecar = serialize(res, cfg, what)
        atomic_write(cfg.out_path, text)
        if sidecar is not None:
            atomic_write(cfg.out_path + ".manifest.json", sidecar)
    if cfg.gnuplot_path and what == "grid":
        power = cfg.gnuplot_power or cfg.powers[-1]
        if power not in cfg.powers:
            raise ValueError(f"gnuplot power {power} is not among the sweep powers")
        atomic_write(cfg.gnuplot_path, render_gnuplot(res, cfg, power))


# -- validation --------------------------------------------------------------

def random_basis(s: SeededSampler) -> MeasurementBasis:
    u = s.rng("basis").random(2)
    return MeasurementBasis(float(np.arccos(1 - 2 * u[0])), float(2 * pi * u[1]))


def kw_stats(seed, n, cfg=DEFAULT_CONFIG):
    r = np.array([kw_residual(haar_random_pure(SeededSampler(seed, i), 3), cfg) for i in range(n)])
    return {"n": n, "max_abs": float(np.max(np.abs(r))), "mean": float(np.mean(r)),
            "n_above_1e-3": int(np.sum(np.abs(r) > 1e-3))}


def eq6_residuals(seed, n, n_bases=10):
    """|D_func - S_B - Delta_func + H(p)| at fixed bases, measurement on B."""
    out = []
    for i in range(n):
        s = SeededSampler(seed, i)
        rho = random_density_matrix(s, (2, 2))
        sb = vn_entropy(partial_trace(rho, [1]))
        for k in range(n_bases):
            b = random_basis(SeededSampler(seed, i * n_bases + k))
            probs = measure_qubit(rho, 1, b).probs
            out.append(discord_functional(rho, 1, b) - sb - deficit_functional(rho, 1, b)
                       + shannon_entropy(probs))
    return np.abs(np.array(out))


def eq6_stats(seed, n, n_bases=10):
    r = eq6_residuals(seed, n, n_bases)
    return {"n_states": n, "n_bases": n_bases, "max_abs": float(r.max())}


def ckw_stats(seed, n_haar, n_wclass):
    th = np.array([tangle_ckw(haar_random_pure(SeededSampler(seed, i), 3)) for i in range(n_haar)])
    tw = np.array([tangle_ckw(sample_wclass(SeededSampler(seed, i))) for i in range(n_wclass)])
    return {"n_haar": n_haar, "min_tangle_haar": float(th.min()),
            "n_violations": int(np.sum(th < -1e-8)),
            "n_wclass": n_wclass, "max_abs_tangle_wclass": float(np.max(np.abs(tw)))}


def _theorem3_sample(i, seed, cfg):
    psi = haar_random_pure(SeededSampler(seed, i), 3)
    tw, ok_w = score_state(psi, "deficit_bwd", cfg)
    td, ok_d = score_state(psi, "discord", cfg)
    return (delta_score(tw), delta_score(td), tw.y, tw.z, td.y, td.z, ok_w and ok_d)


def theorem3_stats(seed, n, cfg=DEFAULT_CONFIG, threads=1):
    """Contingency of sign(delta_deficit_bwd) against sign(delta_discord)."""
    rows = _pmap(partial(_theorem3_sample, seed=seed, cfg=cfg), range(n), threads)
    table = {"wd_mono_d_mono": 0, "wd_mono_d_non": 0, "wd_non_d_mono": 0, "wd_non_d_non": 0}
    d_above_wd = 0
    for dw, dd, wy, wz, dy, dz, _ in rows:
        a = "wd_mono" if dw >= 0 else "wd_non"
        b = "d_non" if dd < -1e-6 else "d_mono"
        table[f"{a}_{b}"] += 1
        d_above_wd += (dy > wy + 1e-6) + (dz > wz + 1e-6)
    return {"n": n, "table": table, "violations": table["wd_mono_d_non"],
            "n_pairs_discord_above_deficit": int(d_above_wd),
            "n_failed": sum(1 for r in rows if not r[-1])}


def validate_suite(seed, n, cfg=DEFAULT_CONFIG, threads=1):
    return {
        "seed": int(seed),
        "kw_residual": kw_stats(seed, n, cfg),
        "eq6_identity": eq6_stats(seed, n),
        "ckw": ckw_stats(seed, n, n),
        "theorem3": theorem3_stats(seed, n, cfg, threads),
        "prng": PRNG_NAME,
        "optimizer": cfg.as_dict(),
    }
