"""Command-line entry point: ``mellinmix <subcommand> [flags]``.

Exit codes: 0 success, 64 usage error, 65 domain / feasibility error,
66 data error. Every subcommand prints its resolved configuration as ``# ``
comment lines before computing.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bounds import (
    BerryEsseenInputs,
    berry_esseen_terms,
    min_T,
    rho_sup,
    solve_cb,
    thm1_terms,
    thm2_terms,
)
from .distributions import MixtureModel, Sample, parse_spec, sample_mixture
from .errors import DataError, DomainError, SpecSyntaxError
from .estimator import EstimatorConfig, estimate_cdf
from .fourier import FourierConfig, fourier_estimate_cdf
from .harness import list_scenarios, load_scenario, oracle_tune, risk_profile, run_experiment
from .mellin import hg_region, mellin_analytic, mellin_empirical, mellin_ratio_estimate, positive_poisson_threshold

EXIT_USAGE, EXIT_DOMAIN, EXIT_DATA = 64, 65, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- flag syntax --------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """``a+bi``, ``a-bi``, ``a`` or ``bi``."""
    t = text.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j") or t[-2] in "+-":
            t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}; use a+bi") from None


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid {text!r} must be lo:hi:count") from None
    if count < 1:
        raise argparse.ArgumentTypeError("grid count must be >= 1")
    return np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def parse_list(text: str) -> list[float]:
    if text.count(":") == 2:
        return list(parse_grid(text))
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} must be a comma list or lo:hi:count") from None


class _SpecValueError(Exception):
    """Carries a domain error out of argparse (which would report it as usage)."""


def _spec(text: str):
    try:
        return parse_spec(text)
    except SpecSyntaxError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    except DomainError as exc:
        raise _SpecValueError(exc) from None


def _model(text: str):
    sig, star, mix = text.partition("*")
    if not star:
        raise argparse.ArgumentTypeError("model must be SIGNAL*MIXING")
    return MixtureModel(_spec(sig), _spec(mix))


def fmt(x: float) -> str:
    return f"{x:.6g}"


def fmt_complex(z: complex) -> str:
    sign = "-" if z.imag < 0 or (z.imag == 0 and str(z.imag).startswith("-")) else "+"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}i"


def _echo(args, out) -> None:
    items = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    for k, v in items.items():
        if isinstance(v, np.ndarray):
            v = f"{fmt(v[0])}:{fmt(v[-1])}:{v.size}"
        elif hasattr(v, "canonical"):
            v = v.canonical()
        print(f"# {k}={v}", file=out)


# -- subcommands ------------------------------------------------------------------

def cmd_transform(args, out):
    if args.sample:
        sample = Sample.load(args.sample)
        val = (mellin_ratio_estimate(sample, args.mixing, args.z) if args.mixing
               else mellin_empirical(sample, args.z))
    else:
        if args.dist is None:
            raise UsageError("transform needs --dist or --sample")
        val = mellin_analytic(args.dist, args.z)
    print(fmt_complex(complex(val)), file=out)


def _get_sample(args):
    if args.sample:
        return Sample.load(args.sample)
    if args.model is None or args.n is None:
        raise UsageError("give --sample FILE, or --model SIGNAL*MIXING with --n (and --seed)")
    s = sample_mixture(args.model, args.n, args.seed)
    if args.save_sample:
        s.save(args.save_sample)
    return s


def _mixing(args):
    if args.mixing is not None:
        return args.mixing
    if args.model is not None:
        return args.model.mixing
    raise UsageError("--mixing is required")


def _emit_estimate(est, args, out):
    if args.out:
        est.save(args.out)
        print(f"# wrote {args.out}", file=out)
        return
    print(est.header(), file=out)
    print("x,fhat", file=out)
    for x, y in zip(est.grid, est.values):
        print(f"{fmt(x)},{fmt(y)}", file=out)


def cmd_estimate(args, out):
    cfg = EstimatorConfig(u_star=args.u, T=args.T, panels=args.panels, clip_to_unit=args.clip)
    est = estimate_cdf(_get_sample(args), _mixing(args), cfg, args.grid)
    _emit_estimate(est, args, out)


def cmd_fourier(args, out):
    cfg = FourierConfig(R_n=args.R, h=args.h, anchor_quantile=args.anchor_quantile,
                        panels=args.panels)
    est = fourier_estimate_cdf(_get_sample(args), _mixing(args), cfg, args.grid)
    if args.clip:
        est.values = np.clip(est.values, 0.0, 1.0)
    _emit_estimate(est, args, out)


def cmd_bounds(args, out):
    kind = args.kind
    if kind == "cb":
        print(fmt(solve_cb(args.b)), file=out)
        return
    if kind == "min-t":
        print(fmt(min_T(args.b, args.u)), file=out)
        return
    if kind == "rho":
        x0, rho = rho_sup(args.phi, args.psi, args.u)
        print(json.dumps({"x0": x0, "rho": rho}), file=out)
        return
    if kind == "berry":
        if args.phi is None or args.psi is None:
            raise UsageError("bounds berry needs --phi and --psi")
        rep = berry_esseen_terms(BerryEsseenInputs(args.phi, args.psi, args.u, args.b, args.T),
                                 denominator=args.denominator)
    else:
        if args.model is None:
            raise UsageError(f"bounds {kind} needs --model SIGNAL*MIXING")
        cfg = EstimatorConfig(u_star=args.u, T=args.T, panels=args.panels)
        if kind == "thm1":
            if args.n is None:
                raise UsageError("bounds thm1 needs --n")
            sample = sample_mixture(args.model, args.n, args.seed)
            rep = thm1_terms(args.model, sample, cfg, args.b, args.x)
        else:
            if args.n is None:
                raise UsageError("bounds thm2 needs --n")
            rep = thm2_terms(args.model, cfg, args.b, args.x, args.n)
    text = rep.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"# wrote {args.out}", file=out)
    print(text, file=out)


def cmd_hg(args, out):
    if args.poisson_threshold:
        print(fmt(positive_poisson_threshold()), file=out)
        return
    if args.dist is None:
        raise UsageError("hg needs --dist or --poisson-threshold")
    region = hg_region(args.dist)
    print(region.describe(), file=out)
    if region.note:
        print(f"# note: {region.note}", file=out)


def _scenario(args):
    cfg = load_scenario(args.scenario)
    changes = {}
    if args.runs is not None:
        changes["runs"] = args.runs
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "n", None) is not None:
        changes["n_values"] = tuple(args.n)
    if getattr(args, "methods", None):
        changes["methods"] = tuple(args.methods.split(","))
    return replace(cfg, **changes) if changes else cfg


def cmd_simulate(args, out):
    cfg = _scenario(args)
    table = run_experiment(cfg, workers=args.workers)
    if args.out:
        table.write(args.out)
        print(f"# wrote {args.out}/mse_table.csv, runs.csv, summary.json", file=out)
    print("mixing,n,method,avg_mse,sd_mse,runs,seed", file=out)
    for r in table.rows:
        print(f"{r.mixing},{r.n},{r.method},{fmt(r.avg_mse)},{fmt(r.sd_mse)},{r.runs},{r.seed}", file=out)


def cmd_profile(args, out):
    cfg = _scenario(args)
    prof = risk_profile(cfg, args.vary, args.values, runs=args.runs or 25, n=args.size,
                        x_fixed=args.x, u_fixed=args.u, workers=args.workers)
    if args.out:
        prof.write(args.out)
        print(f"# wrote {args.out}/profile.csv", file=out)
    print("value,median_risk,max_risk", file=out)
    for v in args.values:
        r = prof.risks(v)
        print(f"{fmt(v)},{fmt(float(np.median(r)))},{fmt(float(r.max()))}", file=out)


def cmd_tune(args, out):
    cfg = _scenario(argparse.Namespace(**dict(vars(args), runs=None)))
    best, scores = oracle_tune(cfg, args.method, args.parameter, args.grid,
                               tuning_runs=args.runs or 50, n=args.size, workers=args.workers)
    print(f"{args.parameter},avg_mse", file=out)
    for v, s in scores:
        print(f"{fmt(v)},{fmt(s)}", file=out)
    print(f"# best {args.parameter}={fmt(best)}", file=out)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mellinmix", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("transform", help="Mellin transform E[X^(z-1)] of a law or a sample")
    t.add_argument("--dist", type=_spec)
    t.add_argument("--sample", help="sample file; empirical transform")
    t.add_argument("--mixing", type=_spec, help="with --sample: divide by M[G](z)")
    t.add_argument("--z", type=parse_complex, required=True)
    t.set_defaults(func=cmd_transform)

    def data_flags(q):
        q.add_argument("--sample", help="sample file (see Sample.save)")
        q.add_argument("--model", type=_model, help="simulate from SIGNAL*MIXING instead")
        q.add_argument("--n", type=int)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--save-sample")
        q.add_argument("--mixing", type=_spec)
        q.add_argument("--grid", type=parse_grid, default=parse_grid("0.05:2:40"))
        q.add_argument("--panels", type=int, default=256)
        q.add_argument("--clip", action="store_true")
        q.add_argument("--out", help="write CSV with 17 significant digits")

    e = sub.add_parser("estimate", help="Mellin-inversion c.d.f. estimate")
    data_flags(e)
    e.add_argument("--u", type=float, default=0.5)
    e.add_argument("--T", type=float, default=100.0)
    e.set_defaults(func=cmd_estimate)

    f = sub.add_parser("fourier-estimate", help="log-domain Fourier baseline")
    data_flags(f)
    f.add_argument("--R", type=float, default=10.0)
    f.add_argument("--h", type=float, default=0.0)
    f.add_argument("--anchor-quantile", type=float, default=0.001)
    f.set_defaults(func=cmd_fourier)

    b = sub.add_parser("bounds", help="c(b), minimal T, sup distance and bound terms")
    b.add_argument("kind", choices=["cb", "min-t", "rho", "berry", "thm1", "thm2"])
    b.add_argument("--b", type=float, default=0.8)
    b.add_argument("--u", type=float, default=0.5)
    b.add_argument("--T", type=float, default=100.0)
    b.add_argument("--phi", type=_spec)
    b.add_argument("--psi", type=_spec)
    b.add_argument("--denominator", choices=["auto", "abs_v", "modulus"], default="auto")
    b.add_argument("--model", type=_model)
    b.add_argument("--n", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--x", type=float, default=0.5)
    b.add_argument("--panels", type=int, default=256)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    h = sub.add_parser("hg", help="admissible u for division by M[G]")
    h.add_argument("--dist", type=_spec)
    h.add_argument("--poisson-threshold", action="store_true",
                   help="root of exp(lam) = 3 lam + 1 for positive-Poisson mixing")
    h.set_defaults(func=cmd_hg)

    def scen_flags(q):
        q.add_argument("--scenario", required=True,
                       help=f"scenario file or preset ({', '.join(list_scenarios())})")
        q.add_argument("--runs", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--out")

    s = sub.add_parser("simulate", help="Monte-Carlo MSE table")
    scen_flags(s)
    s.add_argument("--n", type=int, nargs="+")
    s.add_argument("--methods")
    s.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("profile", help="per-run risk as x or u varies")
    scen_flags(pr)
    pr.add_argument("--vary", choices=["x", "u_star"], required=True)
    pr.add_argument("--values", type=parse_list, required=True)
    pr.add_argument("--size", type=int, help="sample size (default: largest n)")
    pr.add_argument("--x", type=float, default=0.5)
    pr.add_argument("--u", type=float, default=0.5)
    pr.set_defaults(func=cmd_profile)

    tu = sub.add_parser("tune", help="oracle tuning of T, R_n or h")
    scen_flags(tu)
    tu.add_argument("--method", choices=["mellin", "fourier"], required=True)
    tu.add_argument("--parameter", choices=["T", "R_n", "h"], required=True)
    tu.add_argument("--grid", type=parse_list, required=True)
    tu.add_argument("--size", type=int)
    tu.set_defaults(func=cmd_tune)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        _echo(args, out)
        args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _SpecValueError as exc:
        err = exc.args[0]
        print(f"domain error ({type(err).__name__}): {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"domain error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
