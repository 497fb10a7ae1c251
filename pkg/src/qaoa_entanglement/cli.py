"""Command-line front end: ``qaoae <subcommand> [options]``.

Sweeps write ``sweep.csv`` (records), ``summary.json`` and ``manifest.json``
into ``--output``. Passing a manifest back through ``--config`` replays the
sweep; the CSV is identical apart from its timestamp comment line.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 invalid configuration.
"""

import argparse
import datetime as _dt
import json
import os
import sys

from . import __version__
from . import graphs
from .experiments import (ExperimentConfig, linear_fit, max_entropy_vs_n,
                          mean_curves, power_fit, problem_seed, read_records_csv,
                          records_to_csv, run_sweep, saturation_layer, summarize, window,
                          write_json, mean_stderr, derive_seed)
from .figures import FIGURES, emit_plot_data
from .selftest import run_selftest

EXIT_RUNTIME, EXIT_USAGE, EXIT_CONFIG = 1, 2, 3

SUBCOMMAND_MODE = {"randomized": "randomized", "optimized": "optimized", "anneal": "annealing"}

PRESETS = {
    "desk": {
        "randomized": dict(graph_kind="complete", sizes=[10, 12], depths=[12], n_problems=200,
                           spectrum_layers=[-1]),
        "optimized": dict(graph_kind="regular3", sizes=[8, 10, 12, 14], depths=[2, 4],
                          n_problems=30, restarts=100),
        "annealing": dict(graph_kind="regular3", sizes=[8, 10, 12, 14], times=[2, 5, 10, 20],
                          dt=0.1, n_problems=100),
    },
    "paper": {
        "randomized": dict(graph_kind="complete", sizes=list(range(10, 23, 2)), depths=[100],
                           n_problems=1000, spectrum_layers=[-1]),
        "optimized": dict(graph_kind="regular3", sizes=list(range(8, 23, 2)),
                          depths=list(range(1, 11)), n_problems=100, restarts=1000),
        "annealing": dict(graph_kind="regular3", sizes=list(range(8, 23, 2)),
                          times=[1, 2, 5, 10, 20, 50], dt=0.1, n_problems=1000),
    },
}


class ConfigError(ValueError):
    pass


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _window(text):
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'")
    return vals


def _common(p, output=True):
    p.add_argument("--config", help="JSON config or manifest to start from")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--graph", choices=graphs.KINDS)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--problems", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker processes (0 = all cores)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (value parsed as JSON when possible)")
    if output:
        p.add_argument("--output", default=".", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="qaoae", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-graphs", help="generate and save problem instances")
    _common(p)

    for name in ("randomized", "optimized", "anneal"):
        p = sub.add_parser(name, help=f"run a {SUBCOMMAND_MODE[name]} sweep")
        _common(p)
        p.add_argument("--bipartition", choices=("auto", "contiguous", "random"))
        p.add_argument("--record-layers", type=_int_list)
        p.add_argument("--spectrum-layers", type=_int_list)
        if name == "anneal":
            p.add_argument("--time-list", type=_float_list)
            p.add_argument("--dt", type=float)
        else:
            p.add_argument("--depth", type=_int_list,
                           help="max depth (randomized) or list of depths (optimized)")
        if name == "optimized":
            p.add_argument("--restarts", type=int)

    p = sub.add_parser("analyze", help="fit scaling laws and export plot data")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--summary", help="summary JSON (needed for spectral figures)")
    p.add_argument("--fit", choices=("page", "growth", "kappa", "max", "alpha", "none"),
                   default="none")
    p.add_argument("--window", type=_window, help="fit window 'lo,hi' in layers or time")
    p.add_argument("--figure", action="append", default=[], choices=sorted(FIGURES))
    p.add_argument("--output", default=".")

    p = sub.add_parser("graph-stats", help="average shortest path of a graph ensemble")
    _common(p)

    sub.add_parser("selftest", help="oracle and invariant checks")
    return parser


def resolve_threads(value):
    if value is None:
        env = os.environ.get("QAOAE_THREADS")
        value = int(env) if env else 0
    if value < 0:
        raise ConfigError("--threads must be >= 0")
    return value or (os.cpu_count() or 1)


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(args, mode):
    data = {"mode": mode}
    if getattr(args, "preset", None):
        data.update(PRESETS[args.preset][mode])
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        loaded = loaded.get("config", loaded)
        if loaded.get("mode", mode) != mode:
            raise ConfigError(f"config is for mode {loaded['mode']!r}, not {mode!r}")
        data.update(loaded)
    flags = {"graph": "graph_kind", "sizes": "sizes", "problems": "n_problems",
             "seed": "master_seed", "restarts": "restarts", "bipartition": "bipartition",
             "time_list": "times", "dt": "dt", "depth": "depths",
             "record_layers": "record_layers", "spectrum_layers": "spectrum_layers"}
    for flag, key in flags.items():
        val = getattr(args, flag, None)
        if val is not None:
            data[key] = val
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, val = item.split("=", 1)
        data[key.strip()] = _parse_value(val)
    data.setdefault("graph_kind", "complete")
    data.setdefault("sizes", [8])
    try:
        cfg = ExperimentConfig.from_dict(data)
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _manifest(subcommand, cfg):
    return {"subcommand": subcommand, "version": __version__,
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "config": cfg.to_dict()}


def cmd_sweep(args):
    mode = SUBCOMMAND_MODE[args.subcommand]
    cfg = load_config(args, mode)
    workers = resolve_threads(args.threads)
    os.makedirs(args.output, exist_ok=True)
    records = run_sweep(cfg, workers=workers)
    records_to_csv(records, os.path.join(args.output, "sweep.csv"))
    write_json(os.path.join(args.output, "summary.json"), summarize(records, cfg))
    write_json(os.path.join(args.output, "manifest.json"), _manifest(args.subcommand, cfg))
    if mode == "optimized":
        results = [r.optimization.to_dict(problem_id=r.problem_id, restarts=cfg.restarts,
                                          seed=r.seed)
                   for r in records if r.optimization is not None]
        write_json(os.path.join(args.output, "optimized.json"), results)
    print(f"{len(records)} records -> {args.output}")
    return 0


def _ensemble(args):
    cfg = load_config(args, "randomized")
    os.makedirs(args.output, exist_ok=True)
    return cfg


def cmd_gen_graphs(args):
    cfg = _ensemble(args)
    out = []
    for n in cfg.sizes:
        for pid in range(cfg.n_problems):
            seed = problem_seed(cfg.master_seed, n, pid)
            g = graphs.generate(cfg.graph_kind, n, derive_seed(seed, 0))
            out.append({"problem_id": pid, "seed": seed, "graph": g.to_dict()})
    write_json(os.path.join(args.output, "graphs.json"), out)
    write_json(os.path.join(args.output, "manifest.json"), _manifest("gen-graphs", cfg))
    print(f"{len(out)} graphs -> {args.output}")
    return 0


def shortest_path_stats(kind, sizes, n_problems, master_seed):
    rows = []
    for n in sizes:
        vals = []
        for pid in range(n_problems):
            seed = problem_seed(master_seed, n, pid)
            vals.append(graphs.avg_shortest_path(graphs.generate(kind, n, derive_seed(seed, 0))))
        m, se = mean_stderr(vals)
        rows.append({"N": n, "mean": m, "stderr": se, "count": len(vals)})
    return rows


def cmd_graph_stats(args):
    cfg = _ensemble(args)
    rows = shortest_path_stats(cfg.graph_kind, cfg.sizes, cfg.n_problems, cfg.master_seed)
    summary = {"shortest_paths": rows, "config": cfg.to_dict()}
    write_json(os.path.join(args.output, "graph_stats.json"), summary)
    emit_plot_data(summary, "fig2d", args.output)
    for r in rows:
        print(f"N={r['N']:4d}  <d> = {r['mean']:.6f} +/- {r['stderr']:.6f}")
    return 0


def fit_records(records, kind, win=None):
    """Named scaling fits used by ``analyze``; returns ``{label: FitResult}``."""
    curves = mean_curves(records)
    fits = {}
    if kind == "page":
        ns, ss = [], []
        for (n, _), (xs, ms, _) in sorted(curves.items()):
            ns.append(n)
            ss.append(ms[-1])
        fits["page"] = linear_fit(ns, ss)
    elif kind in ("growth", "kappa"):
        lo, hi = win or ((4, 60) if kind == "growth" else (0.5, 2.0))
        for (n, pt), (xs, ms, _) in sorted(curves.items()):
            x, y = window(xs, ms, lo, hi)
            fits[f"N={n},p_or_T={pt}"] = power_fit(x, y)
    elif kind in ("max", "alpha"):
        for pt, (ns, ms) in sorted(max_entropy_vs_n(records).items()):
            if len(ns) >= 2:
                fits[f"p_or_T={pt}"] = linear_fit(ns, ms)
        if kind == "alpha":
            ts = sorted(pt for pt, (ns, _) in max_entropy_vs_n(records).items() if len(ns) >= 2)
            fits["alpha"] = power_fit(ts, [fits[f"p_or_T={t}"].slope for t in ts])
    return fits


def cmd_analyze(args):
    records = read_records_csv(args.input)
    if not records:
        raise ConfigError("input CSV has no records")
    os.makedirs(args.output, exist_ok=True)
    result = {}
    if args.fit != "none":
        fits = fit_records(records, args.fit, args.window)
        result["fits"] = {k: v.to_dict() for k, v in fits.items()}
        if args.fit == "page":
            result["saturation_layer"] = {
                f"N={n},p_or_T={pt}": saturation_layer(ms)
                for (n, pt), (_, ms, _) in sorted(mean_curves(records).items())}
        if args.fit == "alpha":
            result["alpha"] = -fits["alpha"].exponent
        write_json(os.path.join(args.output, f"fit_{args.fit}.json"), result)
    if args.figure:
        if args.summary:
            with open(args.summary, encoding="utf-8") as fh:
                summary = json.load(fh)
        else:
            summary = summarize(records)
        written = []
        for fig in args.figure:
            written += emit_plot_data(summary, fig, args.output)
        result["figures"] = written
    print(json.dumps(result, indent=2, default=str))
    return 0


def cmd_selftest(args):
    return 0 if run_selftest() else EXIT_RUNTIME


COMMANDS = {"gen-graphs": cmd_gen_graphs, "randomized": cmd_sweep, "optimized": cmd_sweep,
            "anneal": cmd_sweep, "analyze": cmd_analyze, "graph-stats": cmd_graph_stats,
            "selftest": cmd_selftest}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        return COMMANDS[args.subcommand](args)
    except ConfigError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported as a categorized failure
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
