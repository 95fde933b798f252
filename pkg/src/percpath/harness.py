"""Experiment orchestration: seeded replica sweeps, calibration, summary
statistics, and deterministic table output.

Replica r of an experiment always runs on seed base_seed + r, and every
reduction iterates replicas in index order, so output tables are
byte-identical across reruns.  Output files start with '#' key=value
header lines embedding the parameters, the generator identity, the git
describe string, and a wall clock stamp (overridable through
SOURCE_DATE_EPOCH for reproducible artifacts).
"""

from __future__ import annotations

import datetime
import itertools
import json
import math
import os
import random
import statistics
import subprocess
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence, TextIO

from .animals import animal_scaling
from .bypass import covering_process
from .config import Params, sample_config
from .distances import (
    D_star,
    T_n,
    cluster_labels,
    d_and_t_star,
    extract_geodesic,
    regularize,
    truncated_T,
)
from .errors import (
    CalibrationFailed,
    InsufficientReps,
    InvalidParams,
    PreconditionViolated,
    RadiusNotFound,
    StuckIteration,
)
from .geometry import canonical_edge
from .radius import (
    METHOD_GOOD_BOX,
    default_goodbox_grid,
    radius_field,
    survival_curve,
)

EXPERIMENT_KINDS = (
    "variance_sweep",
    "concentration_tail",
    "discrepancy_tail",
    "radius_tail",
    "animal_scaling",
    "covering_audit",
    "fm_average",
    "calibrate",
)

RHO_GRID = tuple(1.5 + 0.5 * k for k in range(14))  # 1.5 .. 8.0


class SupercriticalityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment run: a kind, the base parameters, the replica
    count, and output plumbing.  Replica r uses seed base.seed + r."""

    kind: str
    params: Params
    reps: int
    n_list: tuple[int, ...] = ()
    Ms: tuple[int, ...] = (1, 2)
    Ls: tuple[int, ...] = (4, 8)
    out: Optional[str] = None
    fmt: str = "csv"
    raw: bool = False

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise InvalidParams(f"unknown experiment kind {self.kind!r}")
        if self.fmt not in ("csv", "jsonl"):
            raise InvalidParams(f"unknown format {self.fmt!r}")
        if self.reps < 1:
            raise InvalidParams("reps must be positive")


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def dicts(self):
        return [dict(zip(self.columns, r)) for r in self.rows]


_GIT_DESCRIBE = None


def git_describe() -> str:
    global _GIT_DESCRIBE
    if _GIT_DESCRIBE is None:
        try:
            _GIT_DESCRIBE = subprocess.run(
                ["git", "describe", "--always", "--dirty"],
                cwd=os.path.dirname(os.path.abspath(__file__)),
                capture_output=True,
                text=True,
                timeout=10,
            ).stdout.strip() or "unknown"
        except Exception:
            _GIT_DESCRIBE = "unknown"
    return _GIT_DESCRIBE


def _wallclock() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        dt = datetime.datetime.fromtimestamp(
            int(epoch), tz=datetime.timezone.utc
        )
    else:
        dt = datetime.datetime.now(tz=datetime.timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def header_lines(params: Params) -> list[str]:
    out = [f"# {line}" for line in params.to_kv().splitlines()]
    out.append(f"# git={git_describe()}")
    out.append(f"# wallclock={_wallclock()}")
    return out


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(table: Table, params: Params, out: TextIO, fmt: str):
    for line in header_lines(params):
        out.write(line + "\n")
    if fmt == "csv":
        out.write(",".join(table.columns) + "\n")
        for row in table.rows:
            out.write(",".join(_fmt_cell(v) for v in row) + "\n")
    else:
        for row in table.rows:
            rec = {
                c: (v if not isinstance(v, bool) else int(v))
                for c, v in zip(table.columns, row)
            }
            out.write(json.dumps(rec) + "\n")


def _check_supercritical(cfg):
    labels = cluster_labels(cfg)
    frac = labels.largest_size() / cfg.grid.nv
    if frac < 0.10:
        warnings.warn(
            f"SUPERCRITICALITY_WARNING: largest cluster covers "
            f"{frac:.3f} of the box (p={cfg.params.p} may not be "
            f"supercritical); continuing",
            SupercriticalityWarning,
            stacklevel=3,
        )


def _variance(vals: Sequence[float]) -> float:
    if len(vals) < 2:
        return 0.0
    return statistics.variance(vals)


def _loglin_fit(ts, survivors, total, min_survivors=30):
    """Least-squares slope/R^2 of log survival over thresholds keeping at
    least min_survivors; (0, 0, 0) when fewer than three points qualify."""
    pts = [
        (t, math.log(s / total))
        for t, s in zip(ts, survivors)
        if s >= min_survivors
    ]
    if len(pts) < 3:
        return 0.0, 0.0, len(pts)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return 0.0, 0.0, len(pts)
    slope = sxy / sxx
    r2 = sxy * sxy / (sxx * syy)
    return slope, r2, len(pts)


# --- experiments -----------------------------------------------------------


def variance_sweep(spec: ExperimentSpec) -> tuple[Table, Table]:
    """Per-n mean and variance of D*_n and T_n, with the variance ratio
    columns Var * ln(n) / n.  Returns (summary, raw) tables."""
    if list(spec.n_list) != sorted(spec.n_list) or not spec.n_list:
        raise InvalidParams("n_list must be a nonempty ascending list")
    if spec.reps < 30:
        raise InsufficientReps("variance_sweep needs reps >= 30")
    raw_rows = []
    rows = []
    for n in spec.n_list:
        cell = replace(spec.params, n=n)
        ds, tns = [], []
        for r in range(spec.reps):
            cfg = sample_config(cell.with_seed(cell.seed + r))
            if r == 0:
                _check_supercritical(cfg)
            dstar = D_star(cfg)
            tn = T_n(cfg).value()
            ds.append(float(dstar))
            tns.append(tn)
            raw_rows.append((n, r, cell.seed + r, dstar, tn))
        scale = math.log(n) / n
        rows.append(
            (
                n,
                spec.reps,
                statistics.mean(ds),
                _variance(ds),
                _variance(ds) * scale,
                statistics.mean(tns),
                _variance(tns),
                _variance(tns) * scale,
            )
        )
    summary = Table(
        (
            "n", "count", "mean_dstar", "var_dstar", "ratio_dstar",
            "mean_tn", "var_tn", "ratio_tn",
        ),
        tuple(rows),
    )
    raw = Table(("n", "rep", "seed", "dstar", "tn"), tuple(raw_rows))
    return summary, raw


def concentration_tail(spec: ExperimentSpec) -> tuple[Table, Table]:
    """Empirical survival of |stat - mean| on the sqrt(n / ln n) scale
    for both T_n and D*_n, with the log-linear fit per statistic."""
    if spec.reps < 500:
        raise InsufficientReps("concentration_tail needs reps >= 500")
    p = spec.params
    raw_rows = []
    ds, tns = [], []
    for r in range(spec.reps):
        cfg = sample_config(p.with_seed(p.seed + r))
        if r == 0:
            _check_supercritical(cfg)
        dstar = D_star(cfg)
        tn = T_n(cfg).value()
        ds.append(float(dstar))
        tns.append(tn)
        raw_rows.append((r, p.seed + r, dstar, tn))
    scale = math.sqrt(p.n / math.log(p.n))
    kappas = [0.25 * j for j in range(41)]
    rows = []
    for name, vals in (("T_n", tns), ("D_star", ds)):
        mean = statistics.mean(vals)
        devs = [abs(v - mean) / scale for v in vals]
        surv = [sum(1 for x in devs if x >= k) for k in kappas]
        slope, r2, pts = _loglin_fit(kappas[1:], surv[1:], spec.reps)
        for k, s in zip(kappas, surv):
            rows.append((name, k, s, spec.reps, s / spec.reps, slope, r2, pts))
    summary = Table(
        (
            "stat", "kappa", "survivors", "total", "survival",
            "fit_slope", "fit_r2", "fit_points",
        ),
        tuple(rows),
    )
    raw = Table(("rep", "seed", "dstar", "tn"), tuple(raw_rows))
    return summary, raw


def discrepancy_tail(spec: ExperimentSpec) -> tuple[Table, Table]:
    """Distribution of D*_n - T* on shared regularized endpoints:
    quantiles plus survival over an L grid starting at W = (ln n)^2."""
    if spec.reps < 200:
        raise InsufficientReps("discrepancy_tail needs reps >= 200")
    p = spec.params
    raw_rows = []
    diffs = []
    for r in range(spec.reps):
        cfg = sample_config(p.with_seed(p.seed + r))
        if r == 0:
            _check_supercritical(cfg)
        dstar, tstar = d_and_t_star(cfg)
        diff = max(0.0, dstar - tstar.value())
        diffs.append(diff)
        raw_rows.append((r, p.seed + r, dstar, tstar.value(), diff))
    qs = sorted(diffs)

    def quant(q):
        i = min(len(qs) - 1, int(math.ceil(q * len(qs))) - 1)
        return qs[max(0, i)]

    W = p.W
    l_grid = [int(math.ceil(W * k / 2)) for k in range(2, 9)]
    rows = []
    for L in l_grid:
        s = sum(1 for x in diffs if x >= L)
        rows.append(
            (
                p.n, spec.reps, L, s, s / spec.reps,
                quant(0.5), quant(0.9), quant(0.95), quant(0.99), qs[-1],
            )
        )
    summary = Table(
        (
            "n", "count", "L", "survivors", "survival",
            "q50", "q90", "q95", "q99", "qmax",
        ),
        tuple(rows),
    )
    raw = Table(("rep", "seed", "dstar", "tstar", "diff"), tuple(raw_rows))
    return summary, raw


def radius_tail(spec: ExperimentSpec) -> tuple[Table, Table]:
    """GoodBox radius survival over the certificate grid for reps edges
    sampled uniformly in Lambda_n, with the log-linear tail fit."""
    p = spec.params
    cfg = sample_config(p)
    _check_supercritical(cfg)
    rng = random.Random(p.seed)
    edges = []
    for _ in range(spec.reps):
        x = tuple(rng.randint(-p.n, p.n - 1) for _ in range(p.d))
        axis = rng.randrange(p.d)
        y = tuple(c + (1 if k == axis else 0) for k, c in enumerate(x))
        edges.append(canonical_edge(x, y, cfg.domain))
    records = radius_field(cfg, edges, mode=METHOD_GOOD_BOX)
    ts = default_goodbox_grid(cfg)
    curve = survival_curve(records, ts)
    survs = [row[2] for row in curve]
    slope, r2, pts = _loglin_fit(ts, survs, len(edges))
    rows = [
        (method, t, s, total, s / total, slope, r2, pts)
        for method, t, s, total in curve
    ]
    summary = Table(
        (
            "method", "t", "survivors", "total", "survival",
            "fit_slope", "fit_r2", "fit_points",
        ),
        tuple(rows),
    )
    raw = Table(
        ("edge_x", "edge_y", "radius"),
        tuple(
            (repr(rec.edge.x_e), repr(rec.edge.y_e),
             -1 if rec.N is None else rec.N)
            for rec in records
        ),
    )
    return summary, raw


def covering_audit(spec: ExperimentSpec) -> tuple[Table, Table]:
    """Covering-procedure audit per replica: |Gamma|, radius sum,
    discrepancy and its bound, invariant pass flags, and the abort
    count.  Separation and the discrepancy bound are asserted inside
    covering_process, so non-aborted replicas pass by construction."""
    if spec.reps < 100:
        raise InsufficientReps("covering_audit needs reps >= 100")
    p = spec.params
    raw_rows = []
    aborted = 0
    gamma_sizes, discs, radius_flags = [], [], []
    for r in range(spec.reps):
        cfg = sample_config(p.with_seed(p.seed + r))
        if r == 0:
            _check_supercritical(cfg)
        try:
            x0 = regularize(cfg, (0,) * p.d)
            x1 = regularize(cfg, (p.n,) + (0,) * (p.d - 1))
            fieldT = truncated_T(cfg, None, x0, target=x1)
            gamma = extract_geodesic(fieldT, x1)
            res = covering_process(cfg, gamma)
        except (RadiusNotFound, PreconditionViolated, StuckIteration) as exc:
            aborted += 1
            raw_rows.append((r, p.seed + r, 1, type(exc).__name__,
                             0, 0, 0.0, 0.0, 0, 0, 0))
            continue
        sum_r = sum(N for _, N in res.Gamma)
        bound = 2 * p.c_star_op * sum_r
        rflag = all(
            p.c_star_op * N >= p.W / 2 for _, N in res.Gamma
        )
        gamma_sizes.append(len(res.Gamma))
        discs.append(res.discrepancy)
        radius_flags.append(rflag)
        raw_rows.append(
            (r, p.seed + r, 0, "", len(res.Gamma), sum_r,
             float(res.discrepancy), bound, 1, 1, int(rflag))
        )
    done = spec.reps - aborted
    rows = [
        (
            p.n, spec.reps, done, aborted, aborted / spec.reps,
            statistics.mean(gamma_sizes) if gamma_sizes else 0.0,
            statistics.mean(discs) if discs else 0.0,
            1.0 if done else 0.0,
            1.0 if done else 0.0,
            (sum(radius_flags) / done) if done else 0.0,
        )
    ]
    summary = Table(
        (
            "n", "reps", "completed", "aborted", "abort_rate",
            "mean_gamma", "mean_discrepancy", "pass_iia", "pass_iib",
            "radius_floor_rate",
        ),
        tuple(rows),
    )
    raw = Table(
        (
            "rep", "seed", "aborted", "abort_kind", "gamma_size",
            "sum_radius", "discrepancy", "bound", "iia", "iib",
            "radius_floor",
        ),
        tuple(raw_rows),
    )
    return summary, raw


def fm_average(spec: ExperimentSpec) -> tuple[Table, Table]:
    """Spatial average F_m of translated passage times against T_n, with
    the per-replica subadditivity bound asserted."""
    p = spec.params
    m = int(p.n ** 0.25)
    if m < 1:
        raise InvalidParams("fm_average needs floor(n^(1/4)) >= 1")
    e1 = (p.n,) + (0,) * (p.d - 1)
    zs = [
        tuple(v) for v in itertools.product(range(-m, m + 1), repeat=p.d)
    ]
    raw_rows = []
    tns, fms = [], []
    for r in range(spec.reps):
        cfg = sample_config(p.with_seed(p.seed + r))
        if r == 0:
            _check_supercritical(cfg)
        tn = T_n(cfg).value()
        total = 0.0
        for z in zs:
            tgt = tuple(a + b for a, b in zip(z, e1))
            total += truncated_T(cfg, None, z, target=tgt).distance(tgt).value()
        fm = total / len(zs)
        f0 = truncated_T(cfg, None, (0,) * p.d)
        f1 = truncated_T(cfg, None, e1)
        bound = sum(
            f0.distance(z).value()
            + f1.distance(tuple(a + b for a, b in zip(z, e1))).value()
            for z in zs
        ) / len(zs)
        assert abs(tn - fm) <= bound + 1e-9
        tns.append(tn)
        fms.append(fm)
        raw_rows.append((r, p.seed + r, tn, fm, abs(tn - fm), bound))
    rows = [
        (
            p.n, m, spec.reps,
            statistics.mean(tns), _variance(tns),
            statistics.mean(fms), _variance(fms),
            statistics.mean([abs(a - b) for a, b in zip(tns, fms)]),
            max(abs(a - b) for a, b in zip(tns, fms)),
        )
    ]
    summary = Table(
        (
            "n", "m", "count", "mean_tn", "var_tn", "mean_fm", "var_fm",
            "mean_absdiff", "max_absdiff",
        ),
        tuple(rows),
    )
    raw = Table(("rep", "seed", "tn", "fm", "absdiff", "bound"),
                tuple(raw_rows))
    return summary, raw


def animal_sweep(spec: ExperimentSpec) -> tuple[Table, Table]:
    rows = animal_scaling(spec.params, spec.Ms, spec.Ls, spec.reps)
    cols = (
        "d", "p", "M", "L", "reps", "mean", "qhat", "normalized_ratio",
        "tail_t", "tail_freq",
    )
    summary = Table(cols, tuple(tuple(r[c] for c in cols) for r in rows))
    return summary, summary


def calibrate_rho(
    p: float,
    d: int,
    reps: int,
    base_seed: int = 0,
    grid: Sequence[float] = RHO_GRID,
) -> float:
    """Smallest grid rho with empirical frequency of
    {D*(0, x) > rho * linf(x)} below 1% over sampled x with
    linf(x) in [16, 64]."""
    if reps < 200:
        raise InsufficientReps("calibrate_rho needs reps >= 200")
    params = Params(d=d, p=p, n=64, box_factor=2, seed=base_seed)
    ratios = []
    for r in range(reps):
        cfg = sample_config(params.with_seed(base_seed + r))
        rng = random.Random((base_seed + r) * 0x9E3779B1 + 17)
        t = rng.randint(16, 64)
        x = [rng.randint(-t, t) for _ in range(d)]
        axis = rng.randrange(d)
        x[axis] = t if rng.random() < 0.5 else -t
        x = tuple(x)
        labels = cluster_labels(cfg)
        a = regularize(cfg, (0,) * d, labels)
        b = regularize(cfg, x, labels)
        from .distances import bfs_distance

        dist = bfs_distance(cfg, None, [a], target=b).distance(b)
        ratios.append(dist / t)
    for rho in grid:
        bad = sum(1 for q in ratios if q > rho)
        if bad / reps < 0.01:
            return rho
    raise CalibrationFailed(
        f"no rho on the grid bounds D*/linf at the 1% level (p={p}, d={d})"
    )


def calibrate_table(spec: ExperimentSpec) -> tuple[Table, Table]:
    p = spec.params
    rho = calibrate_rho(p.p, p.d, spec.reps, base_seed=p.seed)
    summary = Table(
        ("d", "p", "reps", "seed", "rho"),
        ((p.d, p.p, spec.reps, p.seed, rho),),
    )
    return summary, summary


_DISPATCH = {
    "variance_sweep": variance_sweep,
    "concentration_tail": concentration_tail,
    "discrepancy_tail": discrepancy_tail,
    "radius_tail": radius_tail,
    "animal_scaling": animal_sweep,
    "covering_audit": covering_audit,
    "fm_average": fm_average,
    "calibrate": calibrate_table,
}


def run_experiment(spec: ExperimentSpec) -> Table:
    """Run the experiment; the returned (and written) table is the raw
    per-replica dump when spec.raw is set, else the summary."""
    summary, raw = _DISPATCH[spec.kind](spec)
    table = raw if spec.raw else summary
    if spec.out is not None:
        with open(spec.out, "w", encoding="utf-8") as fh:
            write_table(table, spec.params, fh, spec.fmt)
    return table


def parse_kv_config(text: str, allowed: Sequence[str]) -> dict[str, str]:
    """Flat key=value experiment config: one key per line, '#' comments;
    unknown keys are errors."""
    out = {}
    for rawline in text.splitlines():
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"malformed config line {rawline!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in allowed:
            raise InvalidParams(f"unknown config key {key!r}")
        out[key] = value
    return out
