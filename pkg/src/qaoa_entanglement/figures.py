"""Plot-ready CSV series built from a sweep summary (no rendering)."""

import csv
import os

import numpy as np

from .entanglement import poisson_pdf
from .errors import InsufficientDataError, ParameterError
from .experiments import linear_fit, power_fit, write_json


class MissingSeriesError(ParameterError):
    """The summary lacks the data a figure needs."""


def _need(summary, key, figure_id):
    if not summary.get(key):
        raise MissingSeriesError(f"{figure_id} needs the {key!r} series in the summary")
    return summary[key]


def _write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def _curves(summary):
    out = {}
    for g in _need(summary, "groups", "curve figure"):
        out.setdefault((g["N"], g["p_or_T"]), []).append(
            (g["layer_or_time"], g["S_mean"], g["S_stderr"]))
    return {k: sorted(v) for k, v in sorted(out.items())}


def _max_vs_n(summary):
    table = {}
    for (n, pt), rows in _curves(summary).items():
        table.setdefault(pt, []).append((n, max(r[1] for r in rows)))
    return {pt: sorted(v) for pt, v in table.items()}


def _fits_vs_n(table):
    fits = {}
    for key, rows in table.items():
        if len(rows) >= 2:
            fits[key] = linear_fit([r[0] for r in rows], [r[1] for r in rows])
    return fits


def emit_curves(summary, figure_id, outdir):
    """Entropy against layer (or time): one file per ``(N, p_or_T)``."""
    paths = []
    for (n, pt), rows in _curves(summary).items():
        name = f"{figure_id}_N{n}_p{pt}.csv"
        paths.append(_write(os.path.join(outdir, name), ["ell", "S_mean", "S_stderr"], rows))
    return paths


def emit_max_vs_n(summary, figure_id, outdir):
    """Maximum over layers of the mean entropy against N, with linear fits per depth/time."""
    table = _max_vs_n(summary)
    rows = [(pt, n, s) for pt, v in sorted(table.items()) for n, s in v]
    paths = [_write(os.path.join(outdir, f"{figure_id}.csv"), ["p_or_T", "N", "max_S"], rows)]
    fits = {repr(k): f.to_dict() for k, f in _fits_vs_n(table).items()}
    meta = os.path.join(outdir, f"{figure_id}_fits.json")
    write_json(meta, fits)
    return paths + [meta]


def emit_fixed_layer_vs_n(summary, figure_id, outdir):
    """Entropy against N at every fixed layer, and the fitted slope ``b(layer)``."""
    table = {}
    for (n, _), rows in _curves(summary).items():
        for x, m, _ in rows:
            table.setdefault(x, []).append((n, m))
    rows = [(x, n, m) for x, v in sorted(table.items()) for n, m in sorted(v)]
    paths = [_write(os.path.join(outdir, f"{figure_id}.csv"), ["ell", "N", "S_mean"], rows)]
    fits = _fits_vs_n({x: sorted(v) for x, v in table.items()})
    paths.append(_write(os.path.join(outdir, f"{figure_id}_slopes.csv"), ["ell", "a", "b"],
                        [(x, f.intercept, f.slope) for x, f in sorted(fits.items())]))
    return paths


def emit_shortest_paths(summary, figure_id, outdir):
    rows = [(s["N"], s["mean"], s["stderr"]) for s in _need(summary, "shortest_paths", figure_id)]
    return [_write(os.path.join(outdir, f"{figure_id}.csv"), ["N", "avg_shortest_path", "stderr"], rows)]


def emit_gap_histogram(summary, figure_id, outdir):
    """Pooled ``P(r)`` histogram per group with the Poisson reference density."""
    paths = []
    for s in _need(summary, "spectra", figure_id):
        centers = np.asarray(s["r_centers"])
        rows = zip(centers, s["r_density"], poisson_pdf(centers))
        name = f"{figure_id}_N{s['N']}_l{s['layer_or_time']}.csv"
        paths.append(_write(os.path.join(outdir, name), ["r", "density", "poisson_reference"], rows))
    return paths


def emit_spectrum(summary, figure_id, outdir):
    """Rescaled mean spectrum against ``x = k / 2**(N/2)`` with the Marchenko-Pastur curve."""
    paths = []
    for s in _need(summary, "spectra", figure_id):
        rows = zip(s["x"], s["scaled_lambda2"], s["mp_reference"])
        name = f"{figure_id}_N{s['N']}_l{s['layer_or_time']}.csv"
        paths.append(_write(os.path.join(outdir, name),
                            ["x", "scaled_lambda2_mean", "mp_reference"], rows))
    return paths


def emit_gap_vs_n(summary, figure_id, outdir):
    rows = [(s["N"], s["layer_or_time"], s["r_mean"], s["r_stderr"], s["r_block_mean"])
            for s in _need(summary, "spectra", figure_id)]
    return [_write(os.path.join(outdir, f"{figure_id}.csv"),
                   ["N", "layer", "r_mean", "r_stderr", "r_block_mean"], rows)]


def emit_slope_vs_time(summary, figure_id, outdir):
    """Slope ``b(T)`` of max entropy against N, with the power-law exponent as metadata."""
    fits = _fits_vs_n(_max_vs_n(summary))
    if len(fits) < 3:
        raise MissingSeriesError(f"{figure_id} needs at least three total times with two sizes each")
    ts = sorted(fits)
    bs = [fits[t].slope for t in ts]
    paths = [_write(os.path.join(outdir, f"{figure_id}.csv"), ["T", "b_of_T"], zip(ts, bs))]
    meta = {"fits_vs_N": {repr(t): fits[t].to_dict() for t in ts}}
    try:
        pf = power_fit(ts, bs)
        meta["powerfit_alpha"] = -pf.exponent
        meta["powerfit"] = pf.to_dict()
    except (InsufficientDataError, ValueError) as exc:
        meta["powerfit_error"] = str(exc)
    mpath = os.path.join(outdir, f"{figure_id}_meta.json")
    write_json(mpath, meta)
    return paths + [mpath]


FIGURES = {
    "fig2a": emit_curves, "fig2b": emit_curves, "fig2c": emit_curves,
    "fig2d": emit_shortest_paths,
    "fig2e": emit_fixed_layer_vs_n, "fig2f": emit_fixed_layer_vs_n,
    "fig3a": emit_gap_histogram, "fig3b": emit_gap_histogram, "fig3c": emit_gap_histogram,
    "fig3d": emit_spectrum, "fig3e": emit_gap_vs_n,
    "fig4a": emit_curves, "fig4b": emit_curves, "fig4c": emit_curves,
    "fig4d": emit_max_vs_n, "fig4e": emit_max_vs_n, "fig4f": emit_max_vs_n,
    "fig5a": emit_curves, "fig5b": emit_curves, "fig5c": emit_curves,
    "fig5d": emit_max_vs_n, "fig5e": emit_max_vs_n, "fig5f": emit_max_vs_n,
    "fig5g": emit_slope_vs_time,
}


def emit_plot_data(summary, figure_id, outdir):
    """Write the CSV series for ``figure_id``; returns the written paths."""
    try:
        emit = FIGURES[figure_id]
    except KeyError:
        raise ParameterError(f"unknown figure {figure_id!r}; known: {sorted(FIGURES)}") from None
    os.makedirs(outdir, exist_ok=True)
    return emit(summary, figure_id, outdir)
