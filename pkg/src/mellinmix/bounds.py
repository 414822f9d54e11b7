"""Berry-Esseen inequality for Mellin transforms and the risk-bound terms.

For c.d.f.s ``phi``, ``psi`` on (0, inf) and ``u < 1``, with
``rho_u = sup_x |x^{u-1}(phi(x) - psi(x))|`` attained at ``x0``,

    rho_u <= (b/2) int_{-T}^{T} |M[phi](u+iv) - M[psi](u+iv)| / |v| dv
             + b T x0^{u-1} int_0^{2c(b)/T} |psi(x0) - psi(x0 e^r)| dr

for ``b > 2/pi``, ``c(b)`` solving ``int_{|r|<c} sin^2 r/(pi r^2) dr = (2/3)(1 + 1/(pi b))``
and ``T > 2 c(b)(1-u)/log 2``. The same machinery yields the three terms of
the almost-sure pointwise bound and the three terms of the mean-square bound
for the Mellin estimator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .distributions import Distribution, MixtureModel, Sample
from .errors import (
    ConfigurationError,
    DomainError,
    IntegrabilityError,
    ParameterError,
    PreconditionError,
    StripError,
)
from .estimator import (
    EstimatorConfig,
    _kernel_factor,
    _log_spread,
    _transform_on_nodes,
    check_feasible,
    estimate_cdf,
    population_estimate_cdf,
    resolve_panels,
)
from .quadrature import phase_eval, phase_sum, simpson_nodes

B_MIN = 2.0 / math.pi
SMALL_V = 1e-6
FD_STEP = 1e-4
RHO_GRID = (1e-6, 1e3, 2000)
THM1_SLACK = 1e-6


# -- c(b) and the minimal truncation ---------------------------------------

def sine_kernel_mass(c: float) -> float:
    """``int_{|r| <= c} sin^2 r / (pi r^2) dr = (2/pi)(Si(2c) - sin^2(c)/c)``."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    si, _ = special.sici(2.0 * c)
    return float((2.0 / math.pi) * (si - math.sin(c) ** 2 / c))


def sine_kernel_mass_quad(c: float) -> float:
    """The same mass by adaptive quadrature (reference implementation)."""
    f = lambda r: (math.sin(r) / r) ** 2 / math.pi if r else 1.0 / math.pi
    pieces = np.append(np.arange(0.0, c, math.pi), c)
    total = sum(integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13)[0]
                for a, b in zip(pieces[:-1], pieces[1:]))
    return 2.0 * total


def cb_target(b: float) -> float:
    return (2.0 / 3.0) * (1.0 + 1.0 / (math.pi * b))


def solve_cb(b: float) -> float:
    """Unique root ``c(b)`` of ``sine_kernel_mass(c) = (2/3)(1 + 1/(pi b))``."""
    if not (math.isfinite(b) and b > B_MIN):
        raise ParameterError(f"b must exceed 2/pi = {B_MIN:.6f}, got {b}")
    target = cb_target(b)
    f = lambda c: sine_kernel_mass(c) - target
    lo, hi = 1e-6, 1e3
    while f(hi) < 0:
        hi *= 2.0
        if hi > 1e12:
            raise ParameterError(f"c(b) is too large to resolve for b = {b}")
    c = optimize.bisect(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=400)
    return float(c)


def min_T(b: float, u_star: float) -> float:
    """Smallest admissible truncation ``2 c(b)(1-u)/log 2``."""
    if not u_star < 1:
        raise ParameterError(f"u_star must be < 1, got {u_star}")
    return 2.0 * solve_cb(b) * (1.0 - u_star) / math.log(2.0)


# -- sup distance -----------------------------------------------------------

def _as_cdf(obj):
    return obj.cdf if isinstance(obj, Distribution) else obj


def rho_sup(phi_cdf, psi_cdf, u_star: float, grid=RHO_GRID):
    """``(x0, rho)`` with ``rho = sup_x |x^{u-1}(phi(x) - psi(x))|``.

    Coarse search on a log grid, refined by golden-section search in log x.
    """
    if not u_star < 1:
        raise ParameterError(f"u_star must be < 1, got {u_star}")
    phi, psi = _as_cdf(phi_cdf), _as_cdf(psi_cdf)
    lo, hi, m = grid
    t = np.linspace(math.log(lo), math.log(hi), int(m))
    x = np.exp(t)
    obj = np.power(x, u_star - 1.0) * np.abs(np.asarray(phi(x)) - np.asarray(psi(x)))
    k = int(np.argmax(obj))
    if obj[k] == 0.0:
        return float(x[k]), 0.0
    if k == 0:
        raise PreconditionError(
            "x^{u-1}|phi - psi| is largest at the left end of the search grid; "
            "the c.d.f.s do not vanish fast enough at 0 for this u")
    if k == t.size - 1:
        return float(x[k]), float(obj[k])

    def neg(s):
        xs = np.array([math.exp(s)])
        return -float(xs[0] ** (u_star - 1.0) * abs(np.asarray(phi(xs))[0] - np.asarray(psi(xs))[0]))

    s = optimize.golden(neg, brack=(t[k - 1], t[k], t[k + 1]), tol=1e-10)
    best, val = (s, -neg(s)) if -neg(s) >= obj[k] else (t[k], obj[k])
    return float(math.exp(best)), float(val)


def smoothing_gap_term(psi_cdf, x0: float, u_star: float, b: float, T: float, c=None) -> float:
    """``b T x0^{u-1} int_0^{2c(b)/T} |psi(x0) - psi(x0 e^r)| dr``."""
    psi = _as_cdf(psi_cdf)
    c = solve_cb(b) if c is None else c
    p0 = float(np.asarray(psi(np.array([x0])))[0])
    f = lambda r: abs(p0 - float(np.asarray(psi(np.array([x0 * math.exp(r)])))[0]))
    val, _ = integrate.quad(f, 0.0, 2.0 * c / T, epsabs=1e-15, epsrel=1e-12, limit=200)
    return b * T * x0 ** (u_star - 1.0) * val


# -- reports ------------------------------------------------------------------

@dataclass
class BoundReport:
    terms: dict
    inputs: dict
    x0: float | None = None
    rho: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, val in self.terms.items():
            if not (math.isfinite(val) and val >= 0):
                raise IntegrabilityError(f"bound term {name} is not a finite nonnegative number: {val}")

    @property
    def term_names(self):
        return list(self.terms)

    @property
    def term_values(self):
        return list(self.terms.values())

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))

    def to_dict(self) -> dict:
        out = {"terms": dict(self.terms), "x0": self.x0, "rho": self.rho, "config": dict(self.inputs)}
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


@dataclass(frozen=True)
class BerryEsseenInputs:
    phi: Distribution
    psi: Distribution
    u_star: float
    b: float
    T: float

    def __post_init__(self):
        if not (self.b > B_MIN):
            raise ParameterError(f"b must exceed 2/pi, got {self.b}")
        for d in (self.phi, self.psi):
            if not d.strip().contains(self.u_star):
                raise StripError(f"u = {self.u_star} is outside the strip of {d.canonical()}")
        t_min = min_T(self.b, self.u_star)
        if not self.T > t_min:
            raise ConfigurationError(f"T = {self.T} must exceed 2 c(b)(1-u)/log 2 = {t_min:.6g}")


def _pieces(T: float, width: float = 25.0):
    edges = [0.0, min(1.0, T)]
    while edges[-1] < T:
        edges.append(min(T, edges[-1] + width))
    return edges


def berry_esseen_term1(phi: Distribution, psi: Distribution, u: float, b: float, T: float,
                       denominator: str = "auto"):
    """First summand and the denominator actually used.

    ``denominator="abs_v"`` integrates ``|Delta M| / |v|``; that is finite only
    when the transforms coincide at v = 0 (then the region |v| < 1e-6 is
    added from a finite-difference slope). ``"modulus"`` uses
    ``|u - 1 + iv| >= |v|``, the sharper denominator that appears one step
    earlier in the proof and is always finite for u < 1. ``"auto"`` picks
    ``abs_v`` when it is finite and ``modulus`` otherwise.
    """
    if denominator not in ("auto", "abs_v", "modulus"):
        raise ConfigurationError(f"unknown denominator {denominator!r}")

    def dm(v):
        z = u + 1j * np.atleast_1d(v)
        return np.abs(phi.mellin(z) - psi.mellin(z))

    d0 = float(dm(0.0)[0])
    scale = max(abs(complex(phi.mellin(np.array([u + 0j]))[0])), 1e-300)
    integrable = d0 <= 1e-10 * scale
    if denominator == "abs_v" and not integrable:
        raise IntegrabilityError(
            f"|M[phi](u) - M[psi](u)| = {d0:.3g} != 0, so |Delta M|/|v| is not integrable at v = 0")
    use = "abs_v" if (denominator == "abs_v" or (denominator == "auto" and integrable)) else "modulus"

    total = 0.0
    if use == "abs_v":
        slope = abs(complex(
            (phi.mellin(np.array([u + 1j * FD_STEP]))[0] - psi.mellin(np.array([u + 1j * FD_STEP]))[0])
            - (phi.mellin(np.array([u - 1j * FD_STEP]))[0] - psi.mellin(np.array([u - 1j * FD_STEP]))[0])
        )) / (2.0 * FD_STEP)
        total += slope * SMALL_V
        # [1e-6, 1] in log v, the rest in v
        g = lambda s: float(dm(math.exp(s))[0])
        total += integrate.quad(g, math.log(SMALL_V), 0.0, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
        f = lambda v: float(dm(v)[0]) / v
        edges = _pieces(T)[1:]
    else:
        f = lambda v: float(dm(v)[0]) / math.hypot(u - 1.0, v)
        edges = _pieces(T)
    for a, c in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, a, c, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
    return 2.0 * total * b / 2.0, use


def berry_esseen_terms(inputs: BerryEsseenInputs, denominator: str = "auto") -> BoundReport:
    phi, psi, u, b, T = inputs.phi, inputs.psi, inputs.u_star, inputs.b, inputs.T
    c = solve_cb(b)
    x0, rho = rho_sup(phi, psi, u)
    term1, used = berry_esseen_term1(phi, psi, u, b, T, denominator)
    term2 = smoothing_gap_term(psi, x0, u, b, T, c) if rho > 0 else 0.0
    return BoundReport(
        {"term1": term1, "term2": term2},
        {"phi": phi.canonical(), "psi": psi.canonical(), "u_star": u, "b": b, "T": T,
         "c_b": c, "denominator": used},
        x0=x0, rho=rho, extra={"bound_holds": bool(rho <= term1 + term2)})


# -- estimator risk bounds ----------------------------------------------------

def _abs_transform_integral(spec: Distribution, u: float, T: float) -> float:
    """``int_{-T}^{T} |M[spec](u+iv)| dv`` by composite Simpson."""
    omega = max(_log_spread(spec), 1.0)
    n = max(1024, math.ceil(64 * T), math.ceil(32 * T * omega / math.pi))
    panels = resolve_panels(EstimatorConfig(u_star=u, T=T, panels=256), 0.0, 0.0)
    panels = max(panels, int(4 * math.ceil(n / 4)))
    v, w = simpson_nodes(T, panels)
    return float(np.sum(w * np.abs(_transform_on_nodes(spec, u, T, panels))))


@lru_cache(maxsize=32)
def smoothed_x0(signal: Distribution, config: EstimatorConfig):
    """Argmax and value of ``x^{u-1}|F - F*W|`` where F*W is the population estimate."""
    lo, hi, m = RHO_GRID
    probe = population_estimate_cdf(signal, config, np.exp(np.linspace(math.log(lo), math.log(hi), m)))
    fixed = replace(config, panels=probe.panels_used, clip_to_unit=False)
    smooth = lambda x: population_estimate_cdf(signal, fixed, np.atleast_1d(x)).values
    return rho_sup(signal.cdf, smooth, config.u_star)


def _check_vanishing_at_zero(signal: Distribution, u: float) -> None:
    x = np.array([1e-12, 1e-9, 1e-6])
    val = np.power(x, u - 1.0) * signal.cdf(x)
    if not (val[0] <= val[1] <= val[2] or val[-1] < 1e-3):
        raise PreconditionError(f"x^(u-1) F(x) does not vanish at 0 for u = {u}")


def fluctuation_term(model: MixtureModel, config: EstimatorConfig, panels: int, x: float,
                     mix_transform) -> float:
    """``(x^{u-1} / 2 pi n) |sum_k Lambda(X_k, x)|`` from a transform of X on the nodes.

    ``mix_transform`` holds ``(1/n) sum_k X_k^{u-1+iv}`` on the Simpson nodes of
    ``[-T, T]``; with the exact ``M[F_mix]`` in its place the term is 0.
    """
    u, T = config.u_star, config.T
    v, kern = _kernel_factor(config, panels)
    diff = (_transform_on_nodes(model.signal, u, T, panels)
            - np.asarray(mix_transform) / _transform_on_nodes(model.mixing, u, T, panels))
    # x^{u-1} |x^{1-u} sum_k ...| = |sum_k ...|
    return float(abs(phase_eval(kern * diff, np.log([x]), v[0], v[1] - v[0])[0]))


def thm1_terms(model: MixtureModel, sample, config: EstimatorConfig, b: float, x: float) -> BoundReport:
    """Almost-sure bound ``x^{u-1}|F(x) - Fhat(x)| <= B1 + B2 + B3`` for one sample."""
    F, G = model.signal, model.mixing
    u, T = config.u_star, config.T
    if not F.strip().contains(u):
        raise StripError(f"u = {u} is outside the strip of {F.canonical()}")
    check_feasible(G, u)
    _check_vanishing_at_zero(F, u)
    if not x > 0:
        raise DomainError("x must be positive")
    c = solve_cb(b)
    if not T > 2.0 * c * (1.0 - u) / math.log(2.0):
        raise ConfigurationError(f"T = {T} is below the minimal truncation {min_T(b, u):.6g}")

    B1 = b / (2.0 * T) * _abs_transform_integral(F, u, T)
    x0, rho = smoothed_x0(F, config)
    B2 = smoothing_gap_term(F, x0, u, b, T, c)

    plain = replace(config, clip_to_unit=False)
    est = estimate_cdf(sample, G, plain, np.array([x]))
    panels = est.panels_used
    data = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)
    v, _ = simpson_nodes(T, panels)
    emp = phase_sum(np.log(data), np.exp((u - 1.0) * np.log(data)) / data.size,
                    v[0], v[1] - v[0], v.size)
    B3 = fluctuation_term(model, plain, panels, x, emp)

    risk = float(x ** (u - 1.0) * abs(F.cdf(np.array([x]))[0] - est.values[0]))
    total = B1 + B2 + B3
    return BoundReport(
        {"B1": B1, "B2": B2, "B3": B3},
        {"model": model.canonical(), "u_star": u, "T": T, "b": b, "x": x,
         "n": int(data.size), "seed": getattr(sample, "seed", None)},
        x0=x0, rho=rho,
        extra={"risk": risk, "bound": total, "bound_holds": bool(risk <= total + THM1_SLACK)})


def _mixture_abs_line_integral(model: MixtureModel, s: float, rel_tol: float = 1e-8) -> float:
    """``int_R |M[F_mix](s + iw)| dw`` over doubling panels ``[2^k, 2^{k+1}]``.

    Panel contributions of an integrable power or exponential tail shrink
    geometrically; once the ratio of successive panels is stable the rest of
    the tail is summed as a geometric series. The integral is declared
    divergent when panels stop shrinking.
    """
    omega = max(_log_spread(model.signal) + _log_spread(model.mixing), 1.0)

    def panel(a, b_):
        n = int(4 * math.ceil(min(2 ** 20, max(64, 32 * (b_ - a) * omega / math.pi)) / 4))
        w = np.linspace(a, b_, n + 1)
        wt = np.full(n + 1, 2.0)
        wt[1::2] = 4.0
        wt[0] = wt[-1] = 1.0
        return float(np.sum(wt * np.abs(model.mellin(s + 1j * w)))) * (b_ - a) / (3 * n)

    total = panel(0.0, 1.0)
    prev, ratios = None, []
    a = 1.0
    for _ in range(40):
        piece = panel(a, 2.0 * a)
        total += piece
        if piece <= rel_tol * total:
            return 2.0 * total
        if prev is not None and prev > 0:
            ratios.append(piece / prev)
        prev, a = piece, 2.0 * a
        if len(ratios) >= 3:
            last = ratios[-3:]
            if max(last) < 0.9 and max(last) - min(last) < 0.02:
                q = max(last)
                return 2.0 * (total + piece * q / (1.0 - q))
            if min(last) >= 1.0:
                break
    raise IntegrabilityError(
        f"int |M[F_mix]({s:g} + iw)| dw does not converge (partial sums are not Cauchy)")


def thm2_terms(model: MixtureModel, config: EstimatorConfig, b: float, x: float, n: int) -> BoundReport:
    """Mean-square bound ``E[x^{2(u-1)}|F(x) - Fhat(x)|^2] <= I1 + I2 + I3``."""
    F, G = model.signal, model.mixing
    u, T = config.u_star, config.T
    if not F.strip().contains(u):
        raise StripError(f"u = {u} is outside the strip of {F.canonical()}")
    check_feasible(G, u)
    s = 2.0 * u - 1.0
    if not model.strip().contains(s):
        raise StripError(f"2u - 1 = {s} is outside the strip of {model.canonical()}")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    _check_vanishing_at_zero(F, u)
    c = solve_cb(b)
    if not T > 2.0 * c * (1.0 - u) / math.log(2.0):
        raise ConfigurationError(f"T = {T} is below the minimal truncation {min_T(b, u):.6g}")

    A = _abs_transform_integral(F, u, T)
    I1 = 3.0 * b * b / (4.0 * T * T) * A * A
    x0, rho = smoothed_x0(F, config)
    gap = smoothing_gap_term(F, x0, u, b, T, c) / b  # T x0^{u-1} int ...
    I2 = 3.0 * b * b * gap * gap

    omega = max(_log_spread(G), 1.0)
    panels = int(4 * math.ceil(max(4096, 64 * T, 32 * T * omega / math.pi) / 4))
    v, w = simpson_nodes(T, panels)
    mg = np.abs(_transform_on_nodes(G, u, T, panels))
    env = (float(mg.min()), float(mg.max()))
    vint = float(np.sum(w / (((u - 1.0) ** 2 + v ** 2) * mg ** 2)))
    wint = _mixture_abs_line_integral(model, s)
    I3 = 3.0 * x ** (2.0 * (u - 1.0)) / (4.0 * math.pi ** 2 * n) * vint * wint
    return BoundReport(
        {"I1": I1, "I2": I2, "I3": I3},
        {"model": model.canonical(), "u_star": u, "T": T, "b": b, "x": x, "n": int(n)},
        x0=x0, rho=rho,
        extra={"bound": I1 + I2 + I3, "mg_envelope": env})
