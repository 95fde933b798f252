"""Command line interface.

Subcommands map onto the library: `sample` (configuration summary),
`dist` (distance statistics for one replica), `radius` (radius survival
table), `cover` (covering audit), `animals` (lattice-animal sweep),
`sweep` (replica sweeps: variance, concentration, discrepancy, spatial
average), and `calibrate` (rho calibration).  Flags may also be supplied
through a flat key=value config file via --config; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import Params, sample_config
from .distances import D_star, T_n, T_star, cluster_labels, crossing_check
from .geometry import BoxSpec, enumerate_edges
from .harness import (
    ExperimentSpec,
    Table,
    calibrate_rho,
    parse_kv_config,
    run_experiment,
    write_table,
)

_CONFIG_KEYS = (
    "d", "p", "n", "box_factor", "seed", "reps", "out", "format", "raw",
    "kind", "n_list", "Ms", "Ls",
)


def _add_common(sub):
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--box-factor", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--reps", type=int, default=None)
    sub.add_argument("--out", type=str, default=None)
    sub.add_argument("--format", choices=("csv", "jsonl"), default=None)
    sub.add_argument("--raw", action="store_true", default=None)
    sub.add_argument("--config", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="percpath",
        description="percolation chemical-distance simulation toolkit",
    )
    subs = ap.add_subparsers(dest="command", required=True)

    for name in ("sample", "dist", "calibrate"):
        _add_common(subs.add_parser(name))

    radius = subs.add_parser("radius")
    _add_common(radius)

    cover = subs.add_parser("cover")
    _add_common(cover)

    animals = subs.add_parser("animals")
    _add_common(animals)
    animals.add_argument("--Ms", type=str, default=None,
                         help="comma separated scale list")
    animals.add_argument("--Ls", type=str, default=None,
                         help="comma separated animal-length list")

    sweep = subs.add_parser("sweep")
    _add_common(sweep)
    sweep.add_argument(
        "--kind",
        choices=(
            "variance_sweep", "concentration_tail", "discrepancy_tail",
            "fm_average",
        ),
        default=None,
    )
    sweep.add_argument("--n-list", type=str, default=None,
                       help="comma separated ascending n list")
    return ap


def _merge_config(args) -> dict:
    """Flag values over config-file values over defaults."""
    merged = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            merged.update(parse_kv_config(fh.read(), _CONFIG_KEYS))
    for key in _CONFIG_KEYS:
        attr = key if key != "format" else "format"
        val = getattr(args, attr.replace("-", "_"), None)
        if val is not None:
            merged[key] = val
    return merged


def _ints(text) -> tuple[int, ...]:
    if isinstance(text, tuple):
        return text
    return tuple(int(s) for s in str(text).split(",") if s.strip())


def _params(merged) -> Params:
    return Params(
        d=int(merged.get("d", 2)),
        p=float(merged.get("p", 0.7)),
        n=int(merged.get("n", 64)),
        box_factor=int(merged.get("box_factor", 2)),
        seed=int(merged.get("seed", 0)),
    )


def _emit(table: Table, params: Params, merged):
    fmt = str(merged.get("format", "csv"))
    out = merged.get("out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            write_table(table, params, fh, fmt)
    else:
        write_table(table, params, sys.stdout, fmt)


def _spec(kind, params, merged, **kw) -> ExperimentSpec:
    return ExperimentSpec(
        kind=kind,
        params=params,
        reps=int(merged.get("reps", 100)),
        out=merged.get("out"),
        fmt=str(merged.get("format", "csv")),
        raw=bool(merged.get("raw", False)),
        **kw,
    )


def cmd_sample(merged) -> int:
    params = _params(merged)
    cfg = sample_config(params)
    box = BoxSpec((0,) * params.d, params.n)
    edges = enumerate_edges(box)
    n_open = sum(1 for e in edges if cfg.is_open(e))
    labels = cluster_labels(cfg)
    table = Table(
        (
            "d", "p", "n", "seed", "edges", "open_edges", "open_frac",
            "largest_cluster_frac", "crossing",
        ),
        (
            (
                params.d, params.p, params.n, params.seed, len(edges),
                n_open, n_open / len(edges),
                labels.largest_size() / cfg.grid.nv,
                crossing_check(cfg, box),
            ),
        ),
    )
    _emit(table, params, merged)
    return 0


def cmd_dist(merged) -> int:
    params = _params(merged)
    cfg = sample_config(params)
    dstar = D_star(cfg)
    tn = T_n(cfg)
    tstar = T_star(cfg)
    table = Table(
        ("d", "p", "n", "seed", "dstar", "tn", "tstar", "discrepancy"),
        (
            (
                params.d, params.p, params.n, params.seed, dstar,
                tn.value(), tstar.value(),
                max(0.0, dstar - tstar.value()),
            ),
        ),
    )
    _emit(table, params, merged)
    return 0


def cmd_radius(merged) -> int:
    params = _params(merged)
    spec = _spec("radius_tail", params, merged)
    table = run_experiment(spec)
    if not spec.out:
        write_table(table, params, sys.stdout, spec.fmt)
    return 0


def cmd_cover(merged) -> int:
    params = _params(merged)
    spec = _spec("covering_audit", params, merged)
    table = run_experiment(spec)
    if not spec.out:
        write_table(table, params, sys.stdout, spec.fmt)
    return 0


def cmd_animals(merged) -> int:
    params = _params(merged)
    kw = {}
    if merged.get("Ms"):
        kw["Ms"] = _ints(merged["Ms"])
    if merged.get("Ls"):
        kw["Ls"] = _ints(merged["Ls"])
    spec = _spec("animal_scaling", params, merged, **kw)
    table = run_experiment(spec)
    if not spec.out:
        write_table(table, params, sys.stdout, spec.fmt)
    return 0


def cmd_sweep(merged) -> int:
    params = _params(merged)
    kind = str(merged.get("kind", "variance_sweep"))
    kw = {}
    if kind == "variance_sweep":
        kw["n_list"] = _ints(merged.get("n_list", "64,128"))
    spec = _spec(kind, params, merged, **kw)
    table = run_experiment(spec)
    if not spec.out:
        write_table(table, params, sys.stdout, spec.fmt)
    return 0


def cmd_calibrate(merged) -> int:
    params = _params(merged)
    reps = int(merged.get("reps", 200))
    rho = calibrate_rho(params.p, params.d, reps, base_seed=params.seed)
    table = Table(
        ("d", "p", "reps", "seed", "rho"),
        ((params.d, params.p, reps, params.seed, rho),),
    )
    _emit(table, replace(params, rho=rho), merged)
    return 0


_COMMANDS = {
    "sample": cmd_sample,
    "dist": cmd_dist,
    "radius": cmd_radius,
    "cover": cmd_cover,
    "animals": cmd_animals,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    merged = _merge_config(args)
    return _COMMANDS[args.command](merged)


if __name__ == "__main__":
    raise SystemExit(main())
