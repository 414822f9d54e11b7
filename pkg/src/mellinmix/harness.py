"""Seeded Monte-Carlo experiments: MSE tables, risk profiles and oracle tuning.

Every run draws its own sample from a seed that depends only on
``(seed, scenario key, n, run index)``, so results do not depend on the order
in which runs are executed or on the number of worker processes.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .distributions import Distribution, MixtureModel, parse_spec, sample_mixture
from .errors import ConfigurationError, DomainError, FeasibilityError, MellinMixError
from .estimator import EstimatorConfig, check_feasible, estimate_cdf, truncation_for
from .fourier import FourierConfig, fourier_estimate_cdf
from .mellin import hg_region
from .errors import UnsupportedFamilyError

METHODS = ("mellin", "fourier")


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation scenario.

    ``grid_spec = (lo, hi, points)``; ``hi`` may be the string ``"q0.99"``
    (any ``q<p>``) for the true ``p`` quantile of the signal. ``t_rule`` is
    ``"fixed"`` (use ``mellin.T``) or ``"linear"`` (T = n).
    """

    model: MixtureModel
    n_values: tuple = (100, 500, 1000)
    runs: int = 100
    seed: int = 0
    grid_spec: tuple = (0.01, 0.99, 100)
    mellin: EstimatorConfig = field(default_factory=lambda: EstimatorConfig(clip_to_unit=True))
    fourier: FourierConfig = field(default_factory=FourierConfig)
    methods: tuple = METHODS
    label: str = ""
    t_rule: str = "fixed"
    bound_x: float | None = None
    bound_b: float = 0.8

    def __post_init__(self):
        if int(self.runs) != self.runs or self.runs < 1:
            raise ConfigurationError("runs must be a positive integer")
        if not self.n_values or any(int(n) != n or n < 1 for n in self.n_values):
            raise ConfigurationError("n_values must be positive integers")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigurationError("seed must be an unsigned integer")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigurationError(f"methods must be a non-empty subset of {METHODS}")
        if self.t_rule not in ("fixed", "linear"):
            raise ConfigurationError("t_rule must be 'fixed' or 'linear'")
        lo, hi, pts = self.grid_spec
        if not (lo > 0 and int(pts) == pts and pts >= 1):
            raise ConfigurationError("grid must lie strictly inside (0, inf) with >= 1 point")
        if not isinstance(hi, str) and not hi > lo:
            raise ConfigurationError("grid upper end must exceed the lower end")

    @property
    def key(self) -> str:
        return f"{self.label}|{self.model.canonical()}"

    def mixing_label(self) -> str:
        return self.label or self.model.mixing.canonical()

    def mellin_config(self, n: int) -> EstimatorConfig:
        cfg = replace(self.mellin, clip_to_unit=True)
        if self.t_rule == "linear":
            cfg = replace(cfg, T=truncation_for(n, "linear"))
        return cfg


def resolve_grid(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi, pts = cfg.grid_spec
    if isinstance(hi, str):
        if not hi.startswith("q"):
            raise ConfigurationError(f"grid end {hi!r} must be a number or q<p>")
        hi = float(cfg.model.signal.ppf(float(hi[1:])))
    return np.linspace(float(lo), float(hi), int(pts))


def run_seed(seed: int, key: str, n: int, run: int) -> int:
    """Seed of one run: a hash of (seed, scenario key, n, run index)."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(key.encode()), int(n), int(run)])
    return int(ss.generate_state(1, np.uint64)[0])


# -- scenario files -----------------------------------------------------------

def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"grid {text!r} must be lo:hi:count")
    hi = parts[1].strip()
    return (float(parts[0]), hi if hi.startswith("q") else float(hi), int(parts[2]))


def list_scenarios() -> list[str]:
    folder = resources.files("mellinmix") / "scenarios"
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".ini"))


def load_scenario(name_or_path) -> ExperimentConfig:
    """Read a scenario file, or a bundled preset by name (see ``list_scenarios``)."""
    path = Path(str(name_or_path))
    if path.is_file():
        text = path.read_text()
    else:
        res = resources.files("mellinmix") / "scenarios" / f"{name_or_path}.ini"
        if not res.is_file():
            raise ConfigurationError(
                f"no scenario file or preset {name_or_path!r}; presets: {', '.join(list_scenarios())}")
        text = res.read_text()
    cp = configparser.ConfigParser()
    cp.read_string(text)
    try:
        sc = cp["scenario"]
        model = MixtureModel(parse_spec(sc["signal"]), parse_spec(sc["mixing"]))
        ms = cp["mellin"] if cp.has_section("mellin") else {}
        t_text = ms.get("T", "100").strip()
        mellin = EstimatorConfig(
            u_star=float(ms.get("u_star", 0.5)),
            T=100.0 if t_text == "n" else float(t_text),
            panels=int(ms.get("panels", 256)),
            clip_to_unit=True)
        fs = cp["fourier"] if cp.has_section("fourier") else {}
        fourier = FourierConfig(
            R_n=float(fs.get("R_n", 10.0)), h=float(fs.get("h", 0.0)),
            anchor_quantile=float(fs.get("anchor_quantile", 0.001)))
        bound_x = sc.get("bound_x")
        return ExperimentConfig(
            model=model,
            n_values=tuple(int(v) for v in sc.get("n_values", "1000").split(",")),
            runs=int(sc.get("runs", 100)),
            seed=int(sc.get("seed", 0)),
            grid_spec=_parse_grid(sc.get("grid", "0.01:0.99:100")),
            mellin=mellin,
            fourier=fourier,
            methods=tuple(m.strip() for m in sc.get("methods", "mellin, fourier").split(",")),
            label=sc.get("label", ""),
            t_rule="linear" if t_text == "n" else "fixed",
            bound_x=float(bound_x) if bound_x else None,
            bound_b=float(sc.get("bound_b", 0.8)))
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"invalid scenario file: {exc}") from exc


# -- tables ---------------------------------------------------------------------

@dataclass(frozen=True)
class MseRow:
    mixing: str
    n: int
    method: str
    avg_mse: float
    sd_mse: float
    runs: int
    seed: int


@dataclass
class MseTable:
    rows: list
    runs: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = [(r.mixing, r.n, r.method) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ConfigurationError("MseTable rows must be unique in (mixing, n, method)")

    def get(self, n: int, method: str, mixing: str | None = None) -> MseRow:
        for r in self.rows:
            if r.n == n and r.method == method and (mixing is None or r.mixing == mixing):
                return r
        raise KeyError((mixing, n, method))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mixing", "n", "method", "avg_mse", "sd_mse", "runs", "seed"])
        for r in self.rows:
            w.writerow([r.mixing, r.n, r.method, f"{r.avg_mse:.17g}", f"{r.sd_mse:.17g}", r.runs, r.seed])
        return buf.getvalue()

    def runs_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mixing", "n", "method", "run", "seed", "mse"])
        for r in self.runs:
            w.writerow([r["mixing"], r["n"], r["method"], r["run"], r["seed"], f"{r['mse']:.17g}"])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [asdict(r) for r in self.rows], "metadata": self.metadata},
                          indent=2, sort_keys=True)

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "mse_table.csv").write_text(self.to_csv())
        (out / "runs.csv").write_text(self.runs_csv())
        (out / "summary.json").write_text(self.to_json())


@dataclass
class ProfileTable:
    varied: str
    rows: list  # (value, run, risk)
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["varied,value,run,risk"]
        lines += [f"{self.varied},{v:.17g},{r},{k:.17g}" for v, r, k in self.rows]
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "profile.csv").write_text(self.to_csv())

    def risks(self, value) -> np.ndarray:
        return np.array([k for v, _, k in self.rows if v == value])


# -- runs -------------------------------------------------------------------------

def _estimate(method: str, cfg: ExperimentConfig, sample, grid, n: int) -> np.ndarray:
    if method == "mellin":
        return estimate_cdf(sample, cfg.model.mixing, cfg.mellin_config(n), grid).values
    values = fourier_estimate_cdf(sample, cfg.model.mixing, cfg.fourier, grid).values
    return np.clip(values, 0.0, 1.0)


def _one_run(task):
    cfg, n, run, grid, truth = task
    seed = run_seed(cfg.seed, cfg.key, n, run)
    sample = sample_mixture(cfg.model, n, seed)
    out = []
    for method in cfg.methods:
        try:
            est = _estimate(method, cfg, sample, grid, n)
        except MellinMixError as exc:
            raise type(exc)(f"{exc} [scenario {cfg.key}, n={n}, run={run}, seed={seed}]") from exc
        out.append((method, float(np.mean((est - truth) ** 2))))
    bound = None
    if cfg.bound_x is not None and "mellin" in cfg.methods:
        from .bounds import thm1_terms

        rep = thm1_terms(cfg.model, sample, replace(cfg.mellin_config(n), clip_to_unit=False),
                         cfg.bound_b, cfg.bound_x)
        if not rep.extra["bound_holds"]:
            raise AssertionError(
                f"risk {rep.extra['risk']} exceeds B1+B2+B3 = {rep.extra['bound']} "
                f"[scenario {cfg.key}, n={n}, run={run}, seed={seed}]")
        bound = dict(rep.terms, risk=rep.extra["risk"])
    return n, run, seed, out, bound


def _map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> MseTable:
    """Average grid MSE per (n, method) over ``cfg.runs`` seeded runs."""
    for n in cfg.n_values:
        if "mellin" in cfg.methods:
            check_feasible(cfg.model.mixing, cfg.mellin_config(n).u_star)
    grid = resolve_grid(cfg)
    truth = cfg.model.signal.cdf(grid)
    tasks = [(cfg, n, r, grid, truth) for n in cfg.n_values for r in range(cfg.runs)]
    results = _map(_one_run, tasks, workers)
    results.sort(key=lambda t: (t[0], t[1]))

    label = cfg.mixing_label()
    per_run, bounds = [], []
    for n, run, seed, out, bound in results:
        for method, mse in out:
            per_run.append({"mixing": label, "n": n, "method": method, "run": run,
                            "seed": seed, "mse": mse})
        if bound is not None:
            bounds.append(dict(bound, n=n, run=run, seed=seed))
    rows = []
    for n in cfg.n_values:
        for method in cfg.methods:
            m = np.array([r["mse"] for r in per_run if r["n"] == n and r["method"] == method])
            sd = float(np.std(m, ddof=1)) if m.size > 1 else 0.0
            rows.append(MseRow(label, int(n), method, float(np.mean(m)), sd, int(cfg.runs), int(cfg.seed)))
    meta = {
        "scenario": cfg.key,
        "signal": cfg.model.signal.canonical(),
        "mixing": cfg.model.mixing.canonical(),
        "grid": [float(grid[0]), float(grid[-1]), int(grid.size)],
        "clip_to_unit": True,
        "u_star": cfg.mellin.u_star,
        "T": "n" if cfg.t_rule == "linear" else cfg.mellin.T,
        "R_n": cfg.fourier.R_n,
        "h": cfg.fourier.h,
    }
    if bounds:
        meta["thm1_checks"] = len(bounds)
    table = MseTable(rows, per_run, meta)
    table.bounds = bounds
    return table


def _profile_run(task):
    cfg, n, run, vary, values, x_fixed, u_fixed = task
    seed = run_seed(cfg.seed, cfg.key, n, run)
    sample = sample_mixture(cfg.model, n, seed)
    F = cfg.model.signal
    base = cfg.mellin_config(n)
    out = []
    if vary == "x":
        xs = np.asarray(values, dtype=float)
        order = np.argsort(xs)
        est = estimate_cdf(sample, cfg.model.mixing, replace(base, u_star=u_fixed), xs[order]).values
        risk = np.empty_like(xs)
        risk[order] = xs[order] ** (u_fixed - 1.0) * np.abs(F.cdf(xs[order]) - est)
        out = [(float(v), run, float(r)) for v, r in zip(xs, risk)]
    else:
        for u in values:
            est = estimate_cdf(sample, cfg.model.mixing, replace(base, u_star=float(u)),
                               np.array([x_fixed])).values[0]
            risk = x_fixed ** (u - 1.0) * abs(float(F.cdf(np.array([x_fixed]))[0]) - est)
            out.append((float(u), run, float(risk)))
    return out


def risk_profile(cfg: ExperimentConfig, vary: str, values, runs: int = 25, n: int | None = None,
                 x_fixed: float = 0.5, u_fixed: float = 0.5, workers: int = 1) -> ProfileTable:
    """Per-run risk ``x^{u-1}|F(x) - Fhat(x)|`` as x or u varies (the other fixed)."""
    if vary not in ("x", "u_star"):
        raise ConfigurationError("vary must be 'x' or 'u_star'")
    values = [float(v) for v in values]
    if not values:
        raise ConfigurationError("values must be non-empty")
    n = int(n or max(cfg.n_values))
    if vary == "x":
        if any(not v > 0 for v in values):
            raise DomainError("x values must be positive")
        check_feasible(cfg.model.mixing, u_fixed)
    else:
        try:
            region = hg_region(cfg.model.mixing)
        except UnsupportedFamilyError:
            region = None
        for u in values:
            if region is not None and region.kind == "punctured_line" and u == region.u_excluded:
                raise FeasibilityError(
                    f"u = {u} is the excluded point of {cfg.model.mixing.canonical()}: "
                    "M[G](u+iv) comes arbitrarily close to 0 on this line")
            check_feasible(cfg.model.mixing, u)
    tasks = [(cfg, n, r, vary, values, x_fixed, u_fixed) for r in range(runs)]
    rows = [row for part in _map(_profile_run, tasks, workers) for row in part]
    rows.sort(key=lambda t: (t[1], values.index(t[0])))
    meta = {"scenario": cfg.key, "n": n, "runs": runs, "x_fixed": x_fixed, "u_fixed": u_fixed}
    return ProfileTable(vary, rows, meta)


def oracle_tune(cfg: ExperimentConfig, method: str, parameter: str, grid, tuning_runs: int = 50,
                n: int | None = None, workers: int = 1):
    """Grid value of ``parameter`` that minimises the true average MSE.

    Uses fresh seeded samples (a different seed stream from ``run_experiment``);
    ties go to the smaller value. Returns ``(best, [(value, avg_mse), ...])``.
    """
    allowed = {"mellin": ("T",), "fourier": ("R_n", "h")}
    if method not in allowed or parameter not in allowed[method]:
        raise ConfigurationError(f"cannot tune {parameter!r} for method {method!r}")
    values = sorted(float(v) for v in grid)
    if not values:
        raise ConfigurationError("tuning grid is empty")
    n = int(n or max(cfg.n_values))
    scores = []
    for v in values:
        if method == "mellin":
            sub = replace(cfg, mellin=replace(cfg.mellin, T=v), t_rule="fixed", methods=("mellin",))
        else:
            sub = replace(cfg, fourier=replace(cfg.fourier, **{parameter: v}), methods=("fourier",))
        sub = replace(sub, n_values=(n,), runs=int(tuning_runs), label=f"tune:{cfg.key}",
                      bound_x=None)
        table = run_experiment(sub, workers=workers)
        scores.append((v, table.rows[0].avg_mse))
    best = min(scores, key=lambda t: (t[1], t[0]))[0]
    return best, scores
