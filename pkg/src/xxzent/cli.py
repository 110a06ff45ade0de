"""Command-line front end.

Subcommands: ``negativity``, ``profile``, ``border``, ``verify``, ``partitions``.
Exit codes: 0 ok, 1 runtime error, 2 configuration error, 3 verification
failure.  ``XXZENT_WORKERS`` caps the number of worker processes used by the
sweep commands.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed

from .config import ConfigError, load_config, parse_grid
from .entanglement import EPS_NEG, Bipartition, negativity
from .errors import CapacityError, XXZError
from .limits import all_global_bipartitions, all_reduced_bipartitions, limit_temperature, negativity_profile
from .records import (BORDER_COLUMNS, PROFILE_COLUMNS, RAW_NAMES, ensure_dir, fmt, fmt_intervals, versions,
                      write_json, write_table)
from .spectral import decompose, thermal_state, zero_T_limit
from .spinchain import TOPOLOGIES, ChainSpec

log = logging.getLogger("xxzent")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3
WORKERS_ENV = "XXZENT_WORKERS"


def worker_count(n_tasks: int) -> int:
    cap = os.environ.get(WORKERS_ENV)
    limit = os.cpu_count() or 1
    if cap is not None:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from None
    return max(1, min(limit, n_tasks))


# ------------------------------------------------------------------ tasks


def _border_task(cfg, part_label, b_bar):
    part = Bipartition.parse(part_label, cfg.n)
    rows = []
    for d in cfg.deltas:
        spec = ChainSpec.from_reduced(cfg.n, d, b_bar, cfg.v_sign, cfg.topology)
        lt = limit_temperature(spec, part, cfg.t_min, cfg.t_max, cfg.scan_points, cfg.tol, cfg.eps_neg)
        rows.append((d, lt.t_limit or 0.0, lt.k_at_limit, lt.reentry_intervals))
    return rows


def _profile_task(cfg, part_label, delta, b_bar):
    part = Bipartition.parse(part_label, cfg.n)
    spec = ChainSpec.from_reduced(cfg.n, delta, b_bar, cfg.v_sign, cfg.topology)
    prof = negativity_profile(spec, part, cfg.t_grid, cfg.eps_neg)
    return list(zip(prof.t.tolist(), prof.values.tolist(), prof.k.tolist()))


def _run_pool(tasks, fn, write):
    """Evaluate ``fn(*args)`` for every task, handing each result to ``write``.

    Results are written as they complete, so a failure leaves the finished
    files on disk.  The first exception is re-raised after the pool drains.
    """
    workers = worker_count(len(tasks))
    failure = None
    if workers == 1:
        for key, args in tasks:
            try:
                write(key, fn(*args))
            except XXZError as exc:
                failure = failure or exc
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(fn, *args): key for key, args in tasks}
            for fut in as_completed(futures):
                try:
                    write(futures[fut], fut.result())
                except XXZError as exc:
                    failure = failure or exc
    if failure is not None:
        raise failure


def _b_tag(b_bar: float) -> str:
    return fmt(b_bar)


def _manifest(cfg, command, files, status):
    return {"command": command, "config": cfg.to_dict(), "files": sorted(files), "status": status,
            "versions": versions(), "units": "raw" if cfg.raw_units else "reduced"}


def _finish(cfg, command, out, files, results):
    if "json" in cfg.formats:
        name = f"{command}.json"
        write_json(out / name, {k: results[k] for k in sorted(results)})
        files.append(name)
    write_json(out / "manifest.json", _manifest(cfg, command, files, "complete"))


def cmd_border(cfg) -> list[str]:
    out = ensure_dir(cfg.directory)
    parts = cfg.bipartitions()
    tasks = [((p.label, bb), (cfg, p.label, bb)) for p in parts for bb in cfg.b_bars]
    files, results = [], {}
    scale = cfg.v_abs if cfg.raw_units else 1.0
    cols = [RAW_NAMES.get(c, c) if cfg.raw_units else c for c in BORDER_COLUMNS]

    def write(key, rows):
        label, bb = key
        name = f"border_{label}_b{_b_tag(bb)}.csv"
        scaled = [(d * scale, t * scale, k, fmt_intervals([(a * scale, b * scale) for a, b in iv]))
                  for d, t, k, iv in rows]
        write_table(out / name, cols, scaled)
        files.append(name)
        results[name] = [{"delta": d, "t_limit": t, "k_at_limit": k, "reentry_intervals": iv}
                         for d, t, k, iv in rows]

    try:
        _run_pool(tasks, _border_task, write)
    except XXZError:
        write_json(out / "manifest.json", _manifest(cfg, "border", files, "partial"))
        raise
    _finish(cfg, "border", out, files, results)
    return sorted(files)


def cmd_profile(cfg) -> list[str]:
    out = ensure_dir(cfg.directory)
    parts = cfg.bipartitions()
    tasks = [((p.label, d, bb), (cfg, p.label, d, bb)) for p in parts for d in cfg.deltas for bb in cfg.b_bars]
    files, results = [], {}
    scale = cfg.v_abs if cfg.raw_units else 1.0
    cols = [RAW_NAMES.get(c, c) if cfg.raw_units else c for c in PROFILE_COLUMNS]

    def write(key, rows):
        label, d, bb = key
        name = f"profile_{label}_d{fmt(d)}_b{_b_tag(bb)}.csv"
        write_table(out / name, cols, [(t * scale, v, k) for t, v, k in rows])
        files.append(name)
        results[name] = [{"t": t, "negativity": v, "k": k} for t, v, k in rows]

    try:
        _run_pool(tasks, _profile_task, write)
    except XXZError:
        write_json(out / "manifest.json", _manifest(cfg, "profile", files, "partial"))
        raise
    _finish(cfg, "profile", out, files, results)
    return sorted(files)


def negativity_record(n, topology, vx, vz, b, T, partition, eps_neg=EPS_NEG) -> dict:
    spec = ChainSpec(n=n, topology=topology, v_x=vx, v_z=vz, b=b)
    part = Bipartition.parse(partition, n)
    decomp = decompose(spec)
    rho = zero_T_limit(decomp) if T == 0 else thermal_state(decomp, T)
    rep = negativity(rho, part, eps_neg, T=T)
    return {"value": rep.value, "k": rep.k, "partition": part.label,
            "params": {"n": n, "topology": topology, "v_x": vx, "v_z": vz, "b": b, "T": T,
                       "eps_neg": eps_neg}}


# ----------------------------------------------------------------- parser


def _add_model_flags(p):
    p.add_argument("--config", help="INI file with [model] [sweep] [numeric] [output] sections")
    p.add_argument("--n", type=int)
    p.add_argument("--topology", choices=TOPOLOGIES)
    p.add_argument("--v-sign", type=int, choices=(1, -1))
    p.add_argument("--v-abs", type=float, help="coupling magnitude, used with --raw-units")
    p.add_argument("--b-bar", help="reduced field(s): list or start:stop:count")
    p.add_argument("--delta", help="anisotropies: list or start:stop:count")
    p.add_argument("--partitions", help="all-global, all-reduced or comma-separated labels")
    p.add_argument("--tol", type=float)
    p.add_argument("--eps-neg", type=float)
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--scan-points", type=int)
    p.add_argument("--out", dest="directory")
    p.add_argument("--formats", help="comma-separated subset of csv,json")
    p.add_argument("--raw-units", action="store_true", default=None,
                   help="write energies and temperatures in units of the coupling (times --v-abs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xxzent", description="Thermal entanglement of XXZ spin rings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("negativity", help="negativity of one thermal state")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, default="cyclic-nn")
    p.add_argument("--vx", type=float, default=1.0)
    p.add_argument("--vz", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--T", type=float, required=True, help="temperature (energy units); 0 gives the ground mixture")
    p.add_argument("--partition", required=True)
    p.add_argument("--eps-neg", type=float, default=EPS_NEG)

    p = sub.add_parser("border", help="limit temperatures versus anisotropy")
    _add_model_flags(p)

    p = sub.add_parser("profile", help="negativity versus temperature")
    _add_model_flags(p)
    p.add_argument("--t-grid", help="temperatures: list or start:stop:count[:log|lin]")

    p = sub.add_parser("verify", help="closed-form versus numerical cross-checks")
    p.add_argument("--config")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--samples", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.add_argument("--eps-neg", type=float)
    p.add_argument("--report", help="write the JSON report here instead of stdout")

    p = sub.add_parser("partitions", help="list bipartition classes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, default="cyclic-nn")
    p.add_argument("--reduced", action="store_true", help="list reduced-system splits instead")
    return parser


def _overrides(args) -> dict:
    o = {k: getattr(args, k, None) for k in ("n", "topology", "v_sign", "v_abs", "tol", "eps_neg", "t_min",
                                             "t_max", "scan_points", "directory", "raw_units")}
    if getattr(args, "b_bar", None) is not None:
        o["b_bars"] = parse_grid(args.b_bar)
    if getattr(args, "delta", None) is not None:
        o["deltas"] = parse_grid(args.delta)
    if getattr(args, "t_grid", None) is not None:
        o["t_grid"] = parse_grid(args.t_grid, log_default=True)
    if getattr(args, "partitions", None) is not None:
        o["partitions"] = tuple(p.strip() for p in args.partitions.split(",") if p.strip())
    if getattr(args, "formats", None) is not None:
        o["formats"] = tuple(p.strip() for p in args.formats.split(",") if p.strip())
    return o


def _run(args) -> int:
    if args.command == "negativity":
        if args.T < 0:
            raise ConfigError("temperature must be non-negative")
        rec = negativity_record(args.n, args.topology, args.vx, args.vz, args.b, args.T, args.partition,
                                args.eps_neg)
        print(json.dumps(rec, sort_keys=True))
        return EXIT_OK
    if args.command == "partitions":
        fn = all_reduced_bipartitions if args.reduced else all_global_bipartitions
        if args.topology == "single-pair" and args.n != 2:
            raise ConfigError("single-pair topology requires n = 2")
        for p in fn(args.n, args.topology):
            print(p.label)
        return EXIT_OK
    if args.command == "verify":
        from .verify import report, run_checks

        cfg = load_config(args.config, {"tol": args.tol, "eps_neg": args.eps_neg})
        if not 2 <= args.max_n <= 8 or args.samples < 1:
            raise ConfigError("--max-n must lie in [2, 8] and --samples be positive")
        rep = report(run_checks(args.max_n, args.samples, args.seed, cfg.eps_neg, cfg.tol))
        text = json.dumps(rep, indent=2, sort_keys=True)
        if args.report:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return EXIT_OK if rep["passed"] else EXIT_VERIFY
    cfg = load_config(args.config, _overrides(args))
    files = (cmd_border if args.command == "border" else cmd_profile)(cfg)
    for f in files:
        print(os.path.join(cfg.directory, f))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, CapacityError) as exc:
        print(f"xxzent: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:  # validation of model parameters and labels
        print(f"xxzent: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except XXZError as exc:
        print(f"xxzent: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"xxzent: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
