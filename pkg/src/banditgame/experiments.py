"""Experiment runners: regret scaling and PSNE identification, plus slope
fits, percentile bands, and CSV/JSON/SVG serialization.

Both experiments are deterministic in (config, master seed): each
configuration row derives its own seed from the master seed, and each
trial within a row derives a child stream from that.  Percentiles use the
nearest-rank method.  The regret metric is reg_row + reg_col, which equals
T times the duality gap of the average-iterate pair.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dynamics import pseudo_regret, run_trials
from .equilibrium import gen_example_2x2, gen_hard_psne_instance, \
    instance_constants, solve_ne
from .errors import ValidationError
from .learners import make_learner
from .rng import child_seed

EPSILON_CUBEROOT_RULE = "T^(-1/3)"

REGRET_CSV_COLUMNS = ["algorithm", "T", "epsilon", "mean_regret", "p10",
                      "p90", "trials", "seed"]
PSNE_CSV_COLUMNS = ["d_min", "d_1", "m", "n", "t", "t_over_opt",
                    "success_rate", "trials", "seed"]


@dataclass
class RegretScalingConfig:
    """Self-play regret vs horizon on the 2x2 benchmark game."""

    horizons: list
    trials: int
    algorithms: list = field(default_factory=lambda: ["tsallis", "exp3", "ucb1"])
    epsilon: object = EPSILON_CUBEROOT_RULE  # fixed float or the T^(-1/3) rule
    fit_t_min: int = 2**15
    master_seed: int = 20240915

    def validate(self) -> None:
        if not self.horizons or any(t < 1 for t in self.horizons):
            raise ValidationError("horizons must be positive integers")
        if list(self.horizons) != sorted(set(self.horizons)):
            raise ValidationError("horizons must be strictly increasing")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        bad = [a for a in self.algorithms if a not in ("tsallis", "exp3", "ucb1")]
        if bad or not self.algorithms:
            raise ValidationError(f"unknown algorithms {bad}")
        if self.epsilon != EPSILON_CUBEROOT_RULE:
            e = float(self.epsilon)
            if not (0.0 < e < 1.0 / 3.0):
                raise ValidationError(f"fixed epsilon must be in (0, 1/3), got {e}")

    def epsilon_for(self, T: int) -> float:
        if self.epsilon == EPSILON_CUBEROOT_RULE:
            return float(T) ** (-1.0 / 3.0)
        return float(self.epsilon)

    def to_dict(self) -> dict:
        return {"kind": "regret_scaling", "horizons": list(self.horizons),
                "trials": self.trials, "algorithms": list(self.algorithms),
                "epsilon": self.epsilon, "fit_t_min": self.fit_t_min,
                "master_seed": self.master_seed}

    @classmethod
    def from_dict(cls, d: dict) -> "RegretScalingConfig":
        cfg = cls(horizons=[int(t) for t in d["horizons"]],
                  trials=int(d["trials"]),
                  algorithms=list(d.get("algorithms", ["tsallis", "exp3", "ucb1"])),
                  epsilon=d.get("epsilon", EPSILON_CUBEROOT_RULE),
                  fit_t_min=int(d.get("fit_t_min", 2**15)),
                  master_seed=int(d.get("master_seed", 20240915)))
        cfg.validate()
        return cfg


@dataclass
class PsneIdConfig:
    """Identification success rate vs normalized time on the hard instance."""

    m: int
    n: int
    d_1: float
    d_min_values: list
    horizon_multiplier: float  # horizon = ceil(multiplier * OPT)
    trials: int
    master_seed: int = 20240915

    def validate(self) -> None:
        if self.m < 3 or self.n < 3:
            raise ValidationError("m and n must be >= 3")
        if 2.0 * self.d_1 > 1.0:
            raise ValidationError("need 2*d_1 <= 1")
        if not self.d_min_values or any(not (0.0 < d <= self.d_1)
                                        for d in self.d_min_values):
            raise ValidationError("each d_min must satisfy 0 < d_min <= d_1")
        if self.trials < 1 or self.horizon_multiplier <= 0:
            raise ValidationError("trials must be >= 1 and multiplier positive")

    def to_dict(self) -> dict:
        return {"kind": "psne_identification", "m": self.m, "n": self.n,
                "d_1": self.d_1, "d_min_values": list(self.d_min_values),
                "horizon_multiplier": self.horizon_multiplier,
                "trials": self.trials, "master_seed": self.master_seed}

    @classmethod
    def from_dict(cls, d: dict) -> "PsneIdConfig":
        cfg = cls(m=int(d["m"]), n=int(d["n"]), d_1=float(d["d_1"]),
                  d_min_values=[float(v) for v in d["d_min_values"]],
                  horizon_multiplier=float(d["horizon_multiplier"]),
                  trials=int(d["trials"]),
                  master_seed=int(d.get("master_seed", 20240915)))
        cfg.validate()
        return cfg


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2}


@dataclass
class ExperimentResult:
    kind: str  # "regret_scaling" | "psne_identification"
    config: dict
    provenance: dict
    rows: list  # list of dicts, one per configuration row
    fits: list  # list of dicts with fitted slopes / thresholds

    def to_dict(self) -> dict:
        # wall clock stays in memory only, so serialized outputs are
        # byte-identical for identical (config, seed)
        rows = [{k: v for k, v in r.items() if k != "wall_clock_s"}
                for r in self.rows]
        return {"kind": self.kind, "config": self.config,
                "provenance": self.provenance, "rows": rows,
                "fits": self.fits}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(kind=d["kind"], config=d["config"],
                   provenance=d["provenance"], rows=d["rows"], fits=d["fits"])


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def _provenance(config: dict) -> dict:
    return {"config_hash": config_hash(config),
            "master_seed": config["master_seed"],
            "code_version": __version__}


def nearest_rank_percentile(values, p: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * N)-th smallest value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValidationError("percentile of empty sample")
    rank = max(1, math.ceil(p / 100.0 * v.size))
    return float(v[rank - 1])


def fit_loglog_slope(points, t_min: int) -> SlopeFit | None:
    """OLS on (log10 T, log10 value) over points with T >= t_min and
    value > 0; returns None (undefined) with fewer than 2 eligible points."""
    eligible = [(t, v) for t, v in points if t >= t_min and v > 0]
    if len(eligible) < 2:
        return None
    lx = np.log10([t for t, _ in eligible])
    ly = np.log10([v for _, v in eligible])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(slope=float(slope), intercept=float(intercept), r2=r2)


def run_regret_scaling(cfg: RegretScalingConfig,
                       threads: int | None = None) -> ExperimentResult:
    """Mean and 10th/90th percentile of reg_row + reg_col per (algorithm, T),
    plus a log-log slope fit per algorithm over T >= fit_t_min."""
    cfg.validate()
    config = cfg.to_dict()
    rows = []
    fits = []
    row_index = 0
    for algo in cfg.algorithms:
        points = []
        for T in cfg.horizons:
            eps = cfg.epsilon_for(T)
            A = gen_example_2x2(eps)
            seed = child_seed(cfg.master_seed, row_index)
            t0 = time.perf_counter()
            records = run_trials(A, lambda m: make_learner(algo, m),
                                 lambda n: make_learner(algo, n),
                                 T, cfg.trials, seed, threads=threads)
            wall = time.perf_counter() - t0
            regrets = np.array([
                (lambda s: s.reg_row + s.reg_col)(pseudo_regret(r, A))
                for r in records])
            mean = float(np.sum(regrets) / regrets.size)
            rows.append({
                "algorithm": algo, "T": int(T), "epsilon": eps,
                "mean_regret": mean,
                "p10": nearest_rank_percentile(regrets, 10),
                "p90": nearest_rank_percentile(regrets, 90),
                "trials": cfg.trials, "seed": int(seed),
                "wall_clock_s": wall,
            })
            points.append((T, mean))
            row_index += 1
        fit = fit_loglog_slope(points, cfg.fit_t_min)
        fits.append({"algorithm": algo,
                     "fit_t_min": cfg.fit_t_min,
                     "defined": fit is not None,
                     **(fit.to_dict() if fit else {})})
    return ExperimentResult(kind="regret_scaling", config=config,
                            provenance=_provenance(config), rows=rows, fits=fits)


def run_psne_identification(cfg: PsneIdConfig,
                            threads: int | None = None) -> ExperimentResult:
    """Identification success rate at every checkpoint, per d_min value;
    the fits block reports the first checkpoint reaching 75% success."""
    cfg.validate()
    config = cfg.to_dict()
    rows = []
    fits = []
    for idx, d_min in enumerate(cfg.d_min_values):
        A = gen_hard_psne_instance(cfg.m, cfg.n, d_min, cfg.d_1)
        sol = solve_ne(A)
        consts = instance_constants(A, sol)
        if consts.degenerate or not math.isfinite(consts.opt):
            raise ValidationError(
                f"degenerate instance at d_min={d_min}: reciprocal gaps undefined")
        opt = consts.opt
        horizon = int(math.ceil(cfg.horizon_multiplier * opt))
        seed = child_seed(cfg.master_seed, idx)
        t0 = time.perf_counter()
        records = run_trials(A, lambda m: make_learner("tsallis", m),
                             lambda n: make_learner("tsallis", n),
                             horizon, cfg.trials, seed, threads=threads)
        wall = time.perf_counter() - t0
        ck = [t for t, _, _ in records[0].checkpoint_modes]
        t_star = None
        for k, t in enumerate(ck):
            hits = sum(1 for r in records
                       if r.checkpoint_modes[k][1] == 0
                       and r.checkpoint_modes[k][2] == 0)
            rate = hits / len(records)
            if t_star is None and rate >= 0.75:
                t_star = t
            rows.append({
                "d_min": d_min, "d_1": cfg.d_1, "m": cfg.m, "n": cfg.n,
                "t": int(t), "t_over_opt": t / opt, "success_rate": rate,
                "trials": cfg.trials, "seed": int(seed),
                "wall_clock_s": wall,
            })
        fits.append({"d_min": d_min, "opt": opt, "horizon": horizon,
                     "defined": t_star is not None,
                     "t_star": t_star,
                     "t_star_over_opt": (t_star / opt) if t_star else None})
    return ExperimentResult(kind="psne_identification", config=config,
                            provenance=_provenance(config), rows=rows, fits=fits)


# ---------------------------------------------------------------------------
# serialization

def write_results(result: ExperimentResult, path_base: str,
                  formats=("csv", "json")) -> list:
    """Write path_base.{csv,json,svg}; returns the paths written."""
    written = []
    for fmt in formats:
        path = f"{path_base}.{fmt}"
        if fmt == "csv":
            _write_csv(result, path)
        elif fmt == "json":
            with open(path, "w") as fh:
                json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        elif fmt == "svg":
            _write_svg(result, path)
        else:
            raise ValidationError(f"unknown output format {fmt!r}")
        written.append(path)
    return written


def read_result(path: str) -> ExperimentResult:
    with open(path) as fh:
        return ExperimentResult.from_dict(json.load(fh))


def csv_columns(kind: str) -> list:
    if kind == "regret_scaling":
        return REGRET_CSV_COLUMNS
    if kind == "psne_identification":
        return PSNE_CSV_COLUMNS
    raise ValidationError(f"unknown experiment kind {kind!r}")


def _write_csv(result: ExperimentResult, path: str) -> None:
    cols = csv_columns(result.kind)
    with open(path, "w") as fh:
        fh.write("# config_hash=%s master_seed=%s\n"
                 % (result.provenance["config_hash"],
                    result.provenance["master_seed"]))
        fh.write(",".join(cols) + "\n")
        for row in result.rows:
            fh.write(",".join(repr(row[c]) if isinstance(row[c], float)
                              else str(row[c]) for c in cols) + "\n")


# ---------------------------------------------------------------------------
# minimal self-contained SVG plotting

_SVG_W, _SVG_H = 640, 440
_MARGIN = 60
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _scale(v, lo, hi, out_lo, out_hi):
    if hi <= lo:
        return 0.5 * (out_lo + out_hi)
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def _svg_series(result: ExperimentResult):
    """(label, xs, ys, band_lo, band_hi, xlog, ylog) per curve."""
    series = []
    if result.kind == "regret_scaling":
        for algo in {r["algorithm"] for r in result.rows}:
            rs = [r for r in result.rows if r["algorithm"] == algo]
            rs.sort(key=lambda r: r["T"])
            series.append((algo, [r["T"] for r in rs],
                           [r["mean_regret"] for r in rs],
                           [r["p10"] for r in rs], [r["p90"] for r in rs]))
        series.sort()
        return series, True, True, "T", "regret"
    for d_min in sorted({r["d_min"] for r in result.rows}):
        rs = [r for r in result.rows if r["d_min"] == d_min]
        rs.sort(key=lambda r: r["t"])
        series.append((f"d_min={d_min}", [r["t_over_opt"] for r in rs],
                       [r["success_rate"] for r in rs], None, None))
    return series, True, False, "t / OPT", "success rate"


def _write_svg(result: ExperimentResult, path: str) -> None:
    series, xlog, ylog, xlabel, ylabel = _svg_series(result)

    def tx(v):
        return math.log10(v) if xlog else v

    def ty(v):
        return math.log10(max(v, 1e-12)) if ylog else v

    xs_all = [tx(x) for _, xs, *_ in series for x in xs]
    ys_all = []
    for _, _, ys, lo, hi in series:
        ys_all.extend(ty(y) for y in ys)
        if lo:
            ys_all.extend(ty(y) for y in lo)
            ys_all.extend(ty(y) for y in hi)
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if y0 == y1:
        y0, y1 = y0 - 1, y1 + 1

    def px(v):
        return _scale(tx(v), x0, x1, _MARGIN, _SVG_W - 20)

    def py(v):
        return _scale(ty(v), y0, y1, _SVG_H - _MARGIN, 20)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
           f'height="{_SVG_H}" font-family="monospace" font-size="11">',
           f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
           f'<line x1="{_MARGIN}" y1="{_SVG_H - _MARGIN}" x2="{_SVG_W - 20}" '
           f'y2="{_SVG_H - _MARGIN}" stroke="black"/>',
           f'<line x1="{_MARGIN}" y1="20" x2="{_MARGIN}" '
           f'y2="{_SVG_H - _MARGIN}" stroke="black"/>']
    # axis tick labels at the extremes
    for frac in (0.0, 0.5, 1.0):
        vx = x0 + frac * (x1 - x0)
        label = f"1e{vx:.2f}" if xlog else f"{vx:.3g}"
        sx = _scale(vx, x0, x1, _MARGIN, _SVG_W - 20)
        out.append(f'<text x="{sx:.1f}" y="{_SVG_H - _MARGIN + 16}" '
                   f'text-anchor="middle">{label}</text>')
        vy = y0 + frac * (y1 - y0)
        label = f"1e{vy:.2f}" if ylog else f"{vy:.3g}"
        sy = _scale(vy, y0, y1, _SVG_H - _MARGIN, 20)
        out.append(f'<text x="{_MARGIN - 6}" y="{sy + 4:.1f}" '
                   f'text-anchor="end">{label}</text>')
    out.append(f'<text x="{(_MARGIN + _SVG_W - 20) / 2}" y="{_SVG_H - 10}" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="16">{ylabel}</text>')

    for k, (label, xs, ys, lo, hi) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        if lo:
            pts = [f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, lo)]
            pts += [f"{px(x):.2f},{py(v):.2f}"
                    for x, v in zip(reversed(xs), reversed(hi))]
            out.append(f'<polygon points="{" ".join(pts)}" fill="{color}" '
                       f'fill-opacity="0.15" stroke="none"/>')
        pts = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        out.append(f'<text x="{_SVG_W - 150}" y="{30 + 14 * k}" '
                   f'fill="{color}">{label}</text>')

    # fitted slope lines for regret plots
    if result.kind == "regret_scaling":
        for k, fit in enumerate(result.fits):
            if not fit.get("defined"):
                continue
            xa, xb = 10 ** x0, 10 ** x1
            ya = 10 ** (fit["slope"] * x0 + fit["intercept"])
            yb = 10 ** (fit["slope"] * x1 + fit["intercept"])
            out.append(f'<line x1="{px(xa):.2f}" y1="{py(ya):.2f}" '
                       f'x2="{px(xb):.2f}" y2="{py(yb):.2f}" '
                       f'stroke="{_COLORS[k % len(_COLORS)]}" '
                       f'stroke-dasharray="6,4" stroke-width="2"/>')

    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# presets

PRESETS: dict = {
    "fig1-desk": RegretScalingConfig(
        horizons=[2**k for k in range(12, 19)], trials=64),
    "fig1-full": RegretScalingConfig(
        horizons=[2**k for k in range(12, 21)], trials=512),
    "fig2-desk": PsneIdConfig(
        m=16, n=16, d_1=0.2, d_min_values=[0.1, 0.04, 0.004],
        horizon_multiplier=32, trials=64),
    "fig2-full": PsneIdConfig(
        m=256, n=256, d_1=0.1,
        d_min_values=[0.05, 0.02, 0.005, 0.002],
        horizon_multiplier=128, trials=512),
}
