"""Ensemble sweeps over problem instances, aggregation and scaling fits.

Three modes share one record format:

* ``randomized`` -- fresh uniform angles for every layer of every problem
* ``optimized``  -- best-of-restarts BFGS circuit at each depth p, replayed layer by layer
* ``annealing``  -- Trotterized linear schedule for each total time T

Each problem ``(n, problem_id)`` gets a seed derived from the master seed,
and its graph, bipartition and angles are drawn from child streams of that
seed. Results are therefore independent of the worker count and of
execution order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
import csv
import datetime as _dt
import io
import json
import math

import numpy as np

from . import entanglement as ent
from . import graphs
from .errors import InsufficientDataError, ParameterError, RankError, DomainError
from .optimize import minimize_multistart
from .rng import derive_seed, make_rng
from .simulator import (annealing_schedule, apply_layer, build_cost_diagonal,
                        cost_expectation, init_plus_state, run_qaoa)

MODES = ("randomized", "optimized", "annealing")
BIPARTITIONS = ("auto", "contiguous", "random")
CSV_COLUMNS = ("mode", "graph_kind", "problem_id", "N", "p_or_T", "layer_or_time",
               "S", "r_mean", "cost", "seed")

_GRAPH_STREAM, _PART_STREAM, _ANGLE_STREAM = 0, 1, 2


@dataclass
class ExperimentConfig:
    """Parameters of one sweep.

    ``depths`` -- randomized: circuits run to ``max(depths)`` layers;
    optimized: the circuit depths p. ``times``/``dt`` -- annealing only.
    ``record_layers`` restricts which layers (or annealing steps) produce
    records; ``None`` records all of them. ``spectrum_layers`` lists the
    layers where the spectrum, gap ratios and parity-block gap ratios are
    also computed (negative values count from the end).
    """

    mode: str
    graph_kind: str
    sizes: list
    depths: list = field(default_factory=lambda: [10])
    times: list = field(default_factory=list)
    dt: float = 0.1
    n_problems: int = 100
    restarts: int = 1000
    master_seed: int = 0
    bipartition: str = "auto"
    record_layers: list = None
    spectrum_layers: list = field(default_factory=list)
    gap_floor: float = ent.LEVEL_FLOOR
    budget: int = 500
    pad_previous: bool = False
    workers: int = 1

    def validate(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.graph_kind not in graphs.KINDS:
            raise ParameterError(f"graph kind must be one of {graphs.KINDS}, got {self.graph_kind!r}")
        if self.bipartition not in BIPARTITIONS:
            raise ParameterError(f"bipartition must be one of {BIPARTITIONS}")
        if not self.sizes or any(int(n) % 2 or int(n) < 2 for n in self.sizes):
            raise ParameterError(f"sizes must be even and >= 2, got {self.sizes}")
        if self.graph_kind == "regular3" and min(self.sizes) < 4:
            raise ParameterError("3-regular graphs need n >= 4")
        if self.n_problems < 1:
            raise ParameterError("n_problems must be >= 1")
        if self.mode in ("randomized", "optimized"):
            if not self.depths or min(self.depths) < (1 if self.mode == "optimized" else 0):
                raise ParameterError(f"invalid depths {self.depths}")
        if self.mode == "optimized" and self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.mode == "annealing":
            if not self.dt > 0:
                raise ParameterError("dt must be positive in annealing mode")
            if not self.times:
                raise ParameterError("annealing mode needs at least one total time")
            for T in self.times:
                annealing_schedule(T, self.dt)
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def bipartition_for(self, n, seed):
        policy = self.bipartition
        if policy == "auto":
            policy = "contiguous" if self.graph_kind == "linear" else "random"
        if policy == "contiguous":
            return ent.contiguous_bipartition(n)
        return ent.random_bipartition(n, seed)


@dataclass
class ExperimentRecord:
    mode: str
    graph_kind: str
    problem_id: int
    n: int
    p_or_t: float
    layer_or_time: float
    entropy: float
    r_mean: float = math.nan
    cost: float = math.nan
    seed: int = 0
    spectrum: np.ndarray = field(default=None, repr=False, compare=False)
    r_blocks: tuple = field(default=None, compare=False)
    optimization: object = field(default=None, repr=False, compare=False)

    def csv_row(self):
        return [self.mode, self.graph_kind, str(self.problem_id), str(self.n),
                _fmt(self.p_or_t), _fmt(self.layer_or_time), _fmt(self.entropy),
                _fmt(self.r_mean), _fmt(self.cost), str(self.seed)]


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def problem_seed(master_seed, n, problem_id):
    return derive_seed(master_seed, n, problem_id)


# --------------------------------------------------------------------------
# per-problem runners
# --------------------------------------------------------------------------

class _Recorder:
    """Observer turning simulator states into records."""

    def __init__(self, cfg, part, diag, base, n_layers, time_step=None):
        self.cfg = cfg
        self.part = part
        self.diag = diag
        self.base = base
        self.time_step = time_step
        self.want = None if cfg.record_layers is None else {
            (k if k >= 0 else n_layers + 1 + k) for k in cfg.record_layers}
        self.spec = {(k if k >= 0 else n_layers + 1 + k) for k in cfg.spectrum_layers}
        self.records = []

    def __call__(self, layer, state):
        with_spec = layer in self.spec
        if not with_spec and self.want is not None and layer not in self.want:
            return
        spectrum = ent.schmidt_spectrum(state, self.part)
        rec = ExperimentRecord(
            layer_or_time=layer if self.time_step is None else round(layer * self.time_step, 12),
            entropy=ent.von_neumann_entropy(spectrum),
            cost=cost_expectation(state, self.diag), **self.base)
        if with_spec:
            rec.spectrum = spectrum
            rec.r_mean = _safe_mean_ratio(spectrum, self.cfg.gap_floor)
            even, odd = ent.spectrum_blocks(state, self.part)
            rec.r_blocks = (_safe_mean_ratio(even, self.cfg.gap_floor),
                            _safe_mean_ratio(odd, self.cfg.gap_floor))
        self.records.append(rec)


def _safe_mean_ratio(levels, floor):
    try:
        return ent.mean_gap_ratio(ent.gap_ratios(levels, floor))
    except InsufficientDataError:
        return math.nan


def _problem(cfg, n, problem_id):
    seed = problem_seed(cfg.master_seed, n, problem_id)
    g = graphs.generate(cfg.graph_kind, n, derive_seed(seed, _GRAPH_STREAM))
    part = cfg.bipartition_for(n, derive_seed(seed, _PART_STREAM))
    return seed, g, part


def randomized_problem(cfg, n, problem_id):
    seed, g, part = _problem(cfg, n, problem_id)
    diag = build_cost_diagonal(g)
    depth = max(cfg.depths)
    base = dict(mode="randomized", graph_kind=cfg.graph_kind, problem_id=problem_id,
                n=n, p_or_t=depth, seed=seed)
    rec = _Recorder(cfg, part, diag, base, depth)
    rng = make_rng(seed, _ANGLE_STREAM)
    state = init_plus_state(n)
    rec(0, state)
    for layer in range(1, depth + 1):
        gamma = rng.uniform(0.0, 2.0 * math.pi)
        beta = rng.uniform(0.0, math.pi)
        apply_layer(state, beta, gamma, diag)
        rec(layer, state)
    return rec.records


def optimized_problem(cfg, n, problem_id):
    seed, g, part = _problem(cfg, n, problem_id)
    diag = build_cost_diagonal(g)
    out = []
    prev = None
    for p in sorted(cfg.depths):
        extra = ()
        if cfg.pad_previous and prev is not None:
            extra = (prev.angles.padded(p - prev.angles.p),)
        best = minimize_multistart(g, p, restarts=cfg.restarts,
                                   seed=derive_seed(seed, _ANGLE_STREAM, p),
                                   budget=cfg.budget, extra_inits=extra)
        base = dict(mode="optimized", graph_kind=cfg.graph_kind, problem_id=problem_id,
                    n=n, p_or_t=p, seed=seed)
        rec = _Recorder(cfg, part, diag, base, p)
        run_qaoa(g, best.angles, diag, observer=rec)
        if rec.records and rec.records[-1].layer_or_time == p:
            rec.records[-1].optimization = best
        out.extend(rec.records)
        prev = best
    return out


def annealing_problem(cfg, n, problem_id):
    seed, g, part = _problem(cfg, n, problem_id)
    diag = build_cost_diagonal(g)
    out = []
    for T in cfg.times:
        angles = annealing_schedule(T, cfg.dt)
        base = dict(mode="annealing", graph_kind=cfg.graph_kind, problem_id=problem_id,
                    n=n, p_or_t=float(T), seed=seed)
        rec = _Recorder(cfg, part, diag, base, angles.p, time_step=cfg.dt)
        run_qaoa(g, angles, diag, observer=rec)
        out.extend(rec.records)
    return out


_RUNNERS = {"randomized": randomized_problem, "optimized": optimized_problem,
            "annealing": annealing_problem}


def _run_one(args):
    cfg, n, pid = args
    return _RUNNERS[cfg.mode](cfg, n, pid)


def run_sweep(cfg, workers=None):
    """Run every ``(n, problem_id)`` of ``cfg``; records come back in that order."""
    cfg.validate()
    workers = cfg.workers if workers is None else workers
    jobs = [(cfg, int(n), pid) for n in cfg.sizes for pid in range(cfg.n_problems)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_one, jobs))
    else:
        chunks = [_run_one(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def _run_mode(cfg, mode, workers):
    if cfg.mode != mode:
        raise ParameterError(f"config mode is {cfg.mode!r}, expected {mode!r}")
    return run_sweep(cfg, workers)


def run_randomized_sweep(cfg, workers=None):
    return _run_mode(cfg, "randomized", workers)


def run_optimized_sweep(cfg, workers=None):
    return _run_mode(cfg, "optimized", workers)


def run_annealing_sweep(cfg, workers=None):
    return _run_mode(cfg, "annealing", workers)


def replay_record(cfg, record):
    """Recompute the record at the same ``(n, problem_id, p_or_T, layer)`` from seeds."""
    for r in _RUNNERS[cfg.mode](cfg, record.n, record.problem_id):
        if r.p_or_t == record.p_or_t and r.layer_or_time == record.layer_or_time:
            if r.seed != record.seed:
                raise ParameterError("record seed does not match the configuration")
            return r
    raise KeyError("record not produced by this configuration")


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

class RunningStats:
    """Streaming mean / variance (Welford); mergeable across workers."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, x):
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self._m2 += d * (x - self.mean)

    def merge(self, other):
        if other.count == 0:
            return self
        total = self.count + other.count
        d = other.mean - self.mean
        self._m2 += other._m2 + d * d * self.count * other.count / total
        self.mean += d * other.count / total
        self.count = total
        return self

    @property
    def variance(self):
        return self._m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self):
        return math.sqrt(self.variance / self.count) if self.count > 1 else 0.0


def mean_stderr(values):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InsufficientDataError("no values")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def aggregate(records, value="entropy", keys=("n", "p_or_t", "layer_or_time")):
    """Group records by ``keys``; returns ``{key: (mean, stderr, count)}`` sorted by key."""
    groups = {}
    for r in records:
        x = getattr(r, value)
        if isinstance(x, float) and math.isnan(x):
            continue
        groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(x)
    return {k: (*mean_stderr(v), len(v)) for k, v in sorted(groups.items())}


def mean_curves(records, value="entropy"):
    """``{(n, p_or_T): (layers, means, stderrs)}`` averaged over problems."""
    agg = aggregate(records, value)
    curves = {}
    for (n, pt, x), (m, se, _) in agg.items():
        curves.setdefault((n, pt), ([], [], []))
        xs, ms, ses = curves[(n, pt)]
        xs.append(x)
        ms.append(m)
        ses.append(se)
    return {k: tuple(np.asarray(a) for a in v) for k, v in curves.items()}


def max_over_layers(trajectory):
    """Largest entropy along one trajectory (records or plain numbers)."""
    vals = [getattr(t, "entropy", t) for t in trajectory]
    if not vals:
        raise InsufficientDataError("empty trajectory")
    return float(max(vals))


def max_entropy_vs_n(records):
    """``{p_or_T: (ns, max over layers of the ensemble-mean entropy curve)}``."""
    table = {}
    for (n, pt), (_, means, _) in sorted(mean_curves(records).items()):
        table.setdefault(pt, ([], []))
        table[pt][0].append(n)
        table[pt][1].append(max_over_layers(means))
    return {pt: (np.asarray(ns, dtype=float), np.asarray(ms)) for pt, (ns, ms) in table.items()}


def saturation_layer(means, window=10, rtol=0.01):
    """First layer closing a ``window``-layer stretch whose spread is below ``rtol`` of its mean."""
    m = np.asarray(means, dtype=float)
    for end in range(window, m.size + 1):
        w = m[end - window:end]
        mu = w.mean()
        if mu > 0 and (w.max() - w.min()) / mu < rtol:
            return end - 1
    return None


def pooled_gap_ratios(records, floor=ent.LEVEL_FLOOR):
    """All gap ratios of the stored spectra, pooled across records."""
    out = [ent.gap_ratios(r.spectrum, floor) for r in records if r.spectrum is not None]
    return np.concatenate(out) if out else np.zeros(0)


def gap_ratio_histogram(ratios, bins=50):
    """Density-normalized histogram on [0, 1]; returns ``(centers, density)``."""
    density, edges = np.histogram(ratios, bins=bins, range=(0.0, 1.0), density=True)
    return 0.5 * (edges[:-1] + edges[1:]), density


def mean_spectrum(records):
    """Problem-averaged spectrum and its rescaled form ``(x, 2**(n/2) lambda^2)``."""
    specs = [r.spectrum for r in records if r.spectrum is not None]
    if not specs:
        raise InsufficientDataError("no stored spectra")
    avg = np.mean(specs, axis=0)
    return avg, ent.rescaled_spectrum(avg)


# --------------------------------------------------------------------------
# fits
# --------------------------------------------------------------------------

@dataclass
class FitResult:
    """Least-squares line ``y = intercept + slope * x``.

    For power fits the line lives in log-log space:
    ``y = amplitude * x**exponent``.
    """

    intercept: float
    slope: float
    residual: float
    n_points: int
    kind: str = "linear"

    @property
    def amplitude(self):
        return math.exp(self.intercept)

    @property
    def exponent(self):
        return self.slope

    def to_dict(self):
        d = asdict(self)
        if self.kind == "power":
            d.update(amplitude=self.amplitude, exponent=self.exponent)
        return d


def linear_fit(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise ParameterError("xs and ys differ in length")
    if x.size < 2:
        raise InsufficientDataError("linear fit needs at least 2 points")
    a = np.column_stack([np.ones_like(x), x])
    coef, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    if rank < 2:
        raise RankError("xs are degenerate")
    resid = float(np.linalg.norm(a @ coef - y))
    return FitResult(float(coef[0]), float(coef[1]), resid, int(x.size))


def power_fit(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise InsufficientDataError("power fit needs at least 3 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("power fit needs positive data")
    f = linear_fit(np.log(x), np.log(y))
    return FitResult(f.intercept, f.slope, f.residual, f.n_points, kind="power")


def window(xs, ys, lo, hi):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    m = (x >= lo) & (x <= hi)
    return x[m], y[m]


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def records_to_csv(records, path=None, stamp=True):
    """Write the record CSV; the first line is a ``#`` timestamp comment."""
    buf = io.StringIO()
    if stamp:
        buf.write(f"# created: {_dt.datetime.now(_dt.timezone.utc).isoformat()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_records_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(ExperimentRecord(
            mode=row["mode"], graph_kind=row["graph_kind"], problem_id=int(row["problem_id"]),
            n=int(row["N"]), p_or_t=_num(row["p_or_T"]), layer_or_time=_num(row["layer_or_time"]),
            entropy=float(row["S"]), r_mean=float(row["r_mean"]), cost=float(row["cost"]),
            seed=int(row["seed"])))
    return out


def _num(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


FLOOR_SENSITIVITY = (1e-16, 1e-14, 1e-12, 1e-10)


def _ensemble_ratio(records, floor):
    vals = [_safe_mean_ratio(r.spectrum, floor) for r in records]
    vals = [v for v in vals if not math.isnan(v)]
    return mean_stderr(vals) if vals else (math.nan, math.nan)


def spectrum_summary(records, floor=ent.LEVEL_FLOOR):
    """Spectral statistics of every ``(n, p_or_T, layer)`` group with stored spectra."""
    groups = {}
    for r in records:
        if r.spectrum is not None:
            groups.setdefault((r.n, r.p_or_t, r.layer_or_time), []).append(r)
    out = []
    for (n, pt, x), rs in sorted(groups.items()):
        _, (xs, scaled) = mean_spectrum(rs)
        centers, density = gap_ratio_histogram(pooled_gap_ratios(rs, floor))
        r_mean, r_se = _ensemble_ratio(rs, floor)
        blocks = [v for r in rs if r.r_blocks for v in r.r_blocks if not math.isnan(v)]
        b_mean, b_se = mean_stderr(blocks) if blocks else (math.nan, math.nan)
        out.append({
            "N": n, "p_or_T": pt, "layer_or_time": x, "count": len(rs),
            "x": xs.tolist(), "scaled_lambda2": scaled.tolist(),
            "mp_reference": ent.marchenko_pastur_scaled(xs).tolist(),
            "r_centers": centers.tolist(), "r_density": density.tolist(),
            "r_mean": r_mean, "r_stderr": r_se,
            "r_block_mean": b_mean, "r_block_stderr": b_se,
            "gap_floor": floor,
            "r_mean_by_floor": {repr(f): _ensemble_ratio(rs, f)[0] for f in FLOOR_SENSITIVITY},
        })
    return out


def summarize(records, cfg=None, fits=None):
    """JSON-ready summary: per-group means and standard errors, spectra, fits, config echo."""
    groups = []
    for (n, pt, x), (m, se, c) in aggregate(records).items():
        groups.append({"N": n, "p_or_T": pt, "layer_or_time": x, "S_mean": m,
                       "S_stderr": se, "count": c})
    out = {"groups": groups}
    spectra = spectrum_summary(records, cfg.gap_floor if cfg is not None else ent.LEVEL_FLOOR)
    if spectra:
        out["spectra"] = spectra
    if fits:
        out["fits"] = {k: v.to_dict() for k, v in fits.items()}
    if cfg is not None:
        out["config"] = cfg.to_dict()
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    return obj


def write_json(path, obj):
    """Write ``obj`` as indented JSON; NaN becomes ``null``."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
