"""Positive laws used as signal (Y) and mixing (eta) distributions.

Each family is a frozen dataclass that knows its c.d.f., sampler, strip of
convergence and closed-form Mellin-Stieltjes transform ``E[X^{z-1}]``.
Discrete c.d.f.s are returned in standardised form: at an atom the value is
the midpoint of the left and right limits.

Gamma is parametrised by shape ``k`` and *rate* ``theta`` (density
``theta^k y^{k-1} e^{-theta y} / Gamma(k)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from .errors import DataError, ParameterError, SpecSyntaxError
from .special import complex_loggamma, complex_zeta, real_zeta

ZETA_TAIL_MASS = 1e-12
_ZETA_TABLE_MAX = 1 << 20


class Strip(NamedTuple):
    """Open interval of real parts on which the Mellin transform converges."""

    alpha: float
    beta: float

    def contains(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all((u > self.alpha) & (u < self.beta)))

    def __str__(self):
        return f"({_fmt(self.alpha)}, {_fmt(self.beta)})"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a positive real, got {value}")


def _probability(name, value):
    if not (0.0 < value < 1.0):
        raise ParameterError(f"{name} must lie in (0, 1), got {value}")


def _as_complex(z):
    return np.asarray(z, dtype=complex)


class Distribution:
    """Common interface; concrete families below."""

    discrete = False

    def cdf(self, x):
        raise NotImplementedError

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def strip(self) -> Strip:
        raise NotImplementedError

    def mellin(self, z):
        """Closed-form E[X^{z-1}]; no strip check (see ``mellin.mellin_analytic``)."""
        raise NotImplementedError

    def canonical(self) -> str:
        raise NotImplementedError

    def mean(self) -> float:
        return float(np.real(self.mellin(2.0)))

    def __str__(self):
        return self.canonical()


@dataclass(frozen=True)
class Beta(Distribution):
    a1: float
    a2: float

    def __post_init__(self):
        _positive("a1", self.a1)
        _positive("a2", self.a2)

    def cdf(self, x):
        return stats.beta.cdf(x, self.a1, self.a2)

    def pdf(self, x):
        return stats.beta.pdf(x, self.a1, self.a2)

    def ppf(self, q):
        return stats.beta.ppf(q, self.a1, self.a2)

    def draw(self, n, rng):
        return rng.beta(self.a1, self.a2, size=n)

    def strip(self):
        return Strip(1.0 - self.a1, math.inf)

    def mellin(self, z):
        z = _as_complex(z)
        const = math.lgamma(self.a1 + self.a2) - math.lgamma(self.a1)
        return np.exp(complex_loggamma(self.a1 + z - 1.0)
                      - complex_loggamma(self.a1 + self.a2 + z - 1.0) + const)

    def canonical(self):
        return f"beta:{_fmt(self.a1)},{_fmt(self.a2)}"


@dataclass(frozen=True)
class Gamma(Distribution):
    k: float
    theta: float

    def __post_init__(self):
        _positive("k", self.k)
        _positive("theta", self.theta)

    def cdf(self, x):
        return stats.gamma.cdf(x, self.k, scale=1.0 / self.theta)

    def pdf(self, x):
        return stats.gamma.pdf(x, self.k, scale=1.0 / self.theta)

    def ppf(self, q):
        return stats.gamma.ppf(q, self.k, scale=1.0 / self.theta)

    def draw(self, n, rng):
        return rng.gamma(self.k, 1.0 / self.theta, size=n)

    def strip(self):
        return Strip(1.0 - self.k, math.inf)

    def mellin(self, z):
        z = _as_complex(z)
        return np.exp(complex_loggamma(self.k + z - 1.0) - math.lgamma(self.k)
                      - (z - 1.0) * math.log(self.theta))

    def canonical(self):
        return f"gamma:{_fmt(self.k)},{_fmt(self.theta)}"


@dataclass(frozen=True)
class Exponential(Distribution):
    lam: float

    def __post_init__(self):
        _positive("lambda", self.lam)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.lam * np.maximum(x, 0.0)), 0.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.lam * np.exp(-self.lam * np.maximum(x, 0.0)), 0.0)

    def ppf(self, q):
        return -np.log1p(-np.asarray(q, dtype=float)) / self.lam

    def draw(self, n, rng):
        return rng.exponential(1.0 / self.lam, size=n)

    def strip(self):
        return Strip(0.0, math.inf)

    def mellin(self, z):
        z = _as_complex(z)
        return np.exp((1.0 - z) * math.log(self.lam) + complex_loggamma(z))

    def canonical(self):
        return f"exp:{_fmt(self.lam)}"


@dataclass(frozen=True)
class UniformUnit(Distribution):
    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return ((x >= 0) & (x <= 1)).astype(float)

    def ppf(self, q):
        return np.asarray(q, dtype=float)

    def draw(self, n, rng):
        # (0, 1]: the sample must stay strictly positive
        return 1.0 - rng.random(n)

    def strip(self):
        return Strip(0.0, math.inf)

    def mellin(self, z):
        return 1.0 / _as_complex(z)

    def canonical(self):
        return "uniform01"


class _IntegerLaw(Distribution):
    """Laws on {1, 2, ...} described by a log-pmf."""

    discrete = True

    def logpmf(self, k):
        raise NotImplementedError

    def _terms_upto(self, u: float) -> int:
        raise NotImplementedError

    def sf_int(self, k):
        """P(eta > k) for integer k >= 0."""
        raise NotImplementedError

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        fl = np.floor(x)
        at_atom = (fl == x) & (x >= 1)
        below = np.where(at_atom, fl - 1, fl)
        below = np.maximum(below, 0)
        right = 1.0 - self.sf_int(below)
        jump = np.where(at_atom, np.exp(self.logpmf(np.maximum(fl, 1))), 0.0)
        return right + 0.5 * jump

    def quantile_int(self, q: float) -> int:
        """Smallest integer k with P(eta <= k) >= q."""
        k = 1
        while 1.0 - self.sf_int(k) < q:
            k *= 2
        lo, hi = k // 2, k
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if 1.0 - self.sf_int(mid) >= q:
                hi = mid
            else:
                lo = mid
        return max(hi, 1)

    def mellin(self, z):
        z = _as_complex(z)
        u_max = float(np.max(z.real)) if z.size else 1.0
        k = np.arange(1, self._terms_upto(u_max) + 1, dtype=float)
        logp = self.logpmf(k)
        logk = np.log(k)
        flat = z.reshape(-1)
        out = np.empty(flat.shape, dtype=complex)
        chunk = max(1, 4_000_000 // k.size)
        for s in range(0, flat.size, chunk):
            zz = flat[s:s + chunk]
            out[s:s + chunk] = np.exp(logp[None, :] + np.outer(zz - 1.0, logk)).sum(axis=1)
        return out.reshape(z.shape)


@dataclass(frozen=True)
class Geometric(_IntegerLaw):
    """P(eta = k) = p (1-p)^{k-1}, k = 1, 2, ..."""

    p: float

    def __post_init__(self):
        _probability("p", self.p)

    def logpmf(self, k):
        return math.log(self.p) + (np.asarray(k, dtype=float) - 1.0) * math.log1p(-self.p)

    def sf_int(self, k):
        return np.exp(np.asarray(k, dtype=float) * math.log1p(-self.p))

    def _terms_upto(self, u):
        lq = -math.log1p(-self.p)
        peak = max(u - 1.0, 0.0) / lq
        return int(2 * peak + 84.0 / lq + 10)

    def draw(self, n, rng):
        return rng.geometric(self.p, size=n).astype(float)

    def strip(self):
        return Strip(-math.inf, math.inf)

    def canonical(self):
        return f"geom:{_fmt(self.p)}"


@dataclass(frozen=True)
class PositivePoisson(_IntegerLaw):
    """Poisson(lam) conditioned on being at least 1."""

    lam: float

    def __post_init__(self):
        _positive("lambda", self.lam)

    def logpmf(self, k):
        k = np.asarray(k, dtype=float)
        return (-self.lam + k * math.log(self.lam) - special.gammaln(k + 1.0)
                - math.log(-math.expm1(-self.lam)))

    def sf_int(self, k):
        k = np.asarray(k, dtype=float)
        p0 = math.exp(-self.lam)
        return np.minimum(stats.poisson.sf(k, self.lam) / (1.0 - p0), 1.0)

    def _terms_upto(self, u):
        return int(2 * self.lam + 12 * math.sqrt(self.lam) + 2 * abs(u) + 60)

    def draw(self, n, rng):
        out = rng.poisson(self.lam, size=n)
        bad = out == 0
        while bad.any():
            out[bad] = rng.poisson(self.lam, size=int(bad.sum()))
            bad = out == 0
        return out.astype(float)

    def strip(self):
        return Strip(-math.inf, math.inf)

    def canonical(self):
        return f"pospoisson:{_fmt(self.lam)}"


@lru_cache(maxsize=32)
def _zeta_table(s: float) -> np.ndarray:
    """Cumulative probabilities of Zeta(s), up to mass 1 - ZETA_TAIL_MASS."""
    norm = real_zeta(s)
    cums = []
    total = 0.0
    block = 4096
    start = 1
    while start <= _ZETA_TABLE_MAX:
        k = np.arange(start, start + block, dtype=float)
        c = total + np.cumsum(k ** (-s)) / norm
        cums.append(c)
        total = c[-1]
        if total >= 1.0 - ZETA_TAIL_MASS:
            break
        start += block
        block *= 2
    table = np.concatenate(cums)
    cut = np.searchsorted(table, 1.0 - ZETA_TAIL_MASS)
    table = table[: cut + 1].copy()
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class Zeta(_IntegerLaw):
    """P(eta = k) = k^{-s} / zeta(s), k = 1, 2, ..."""

    s: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and self.s > 1.0):
            raise ParameterError(f"zeta parameter s must exceed 1, got {self.s}")

    def logpmf(self, k):
        return -self.s * np.log(np.asarray(k, dtype=float)) - math.log(real_zeta(self.s))

    def sf_int(self, k):
        shape = np.shape(k)
        k = np.atleast_1d(np.asarray(k, dtype=float))
        table = _zeta_table(self.s)
        out = np.empty_like(k)
        inside = k <= table.size
        idx = np.maximum(k[inside].astype(np.int64), 0)
        cum = np.where(idx > 0, table[np.maximum(idx - 1, 0)], 0.0)
        out[inside] = 1.0 - cum
        kk = k[~inside]
        # integral approximation beyond the table
        out[~inside] = (kk + 0.5) ** (1.0 - self.s) / ((self.s - 1.0) * real_zeta(self.s))
        return out.reshape(shape)

    def draw(self, n, rng):
        table = _zeta_table(self.s)
        u = rng.random(n)
        k = np.searchsorted(table, u, side="right") + 1.0
        tail = u >= table[-1]
        if tail.any():
            # Pareto-type inversion of the residual mass beyond the table
            m = table.size
            resid = (1.0 - u[tail]) / (1.0 - table[-1])
            k[tail] = np.floor((m + 0.5) * resid ** (-1.0 / (self.s - 1.0)) + 0.5)
        return k

    def strip(self):
        return Strip(-math.inf, self.s)

    def mellin(self, z):
        z = _as_complex(z)
        return complex_zeta(1.0 + self.s - z) / real_zeta(self.s)

    def canonical(self):
        return f"zeta:{_fmt(self.s)}"


@dataclass(frozen=True)
class FiniteDiscrete(Distribution):
    """Atoms sigma_1 < ... < sigma_K with probabilities p_k."""

    atoms: tuple[tuple[float, float], ...]

    discrete = True

    def __post_init__(self):
        atoms = tuple((float(s), float(p)) for s, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ParameterError("a finite discrete law needs at least one atom")
        sig = np.array([a[0] for a in atoms])
        pr = np.array([a[1] for a in atoms])
        if np.any(sig <= 0) or not np.all(np.isfinite(sig)):
            raise ParameterError("atoms must be positive")
        if np.any(np.diff(sig) <= 0):
            raise ParameterError("atoms must be strictly increasing")
        if np.any(pr <= 0):
            raise ParameterError("atom probabilities must be positive")
        if abs(pr.sum() - 1.0) > 1e-12:
            raise ParameterError(f"atom probabilities sum to {pr.sum()!r}, not 1")

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        sig, pr = self.sigmas, self.probs
        xs = x[..., None]
        return ((sig < xs) * pr).sum(-1) + 0.5 * ((sig == xs) * pr).sum(-1)

    def draw(self, n, rng):
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(cum, rng.random(n) * cum[-1], side="right")
        return self.sigmas[np.minimum(idx, len(cum) - 1)]

    def strip(self):
        return Strip(-math.inf, math.inf)

    def mellin(self, z):
        z = _as_complex(z)
        logs = np.log(self.sigmas)
        return (self.probs * np.exp((z[..., None] - 1.0) * logs)).sum(-1)

    def canonical(self):
        return "discrete:" + ",".join(f"{_fmt(s)}@{_fmt(p)}" for s, p in self.atoms)


def point_mass(at: float = 1.0) -> FiniteDiscrete:
    return FiniteDiscrete(((at, 1.0),))


def two_point(s1: float, s2: float, p1: float) -> FiniteDiscrete:
    return FiniteDiscrete(((s1, p1), (s2, 1.0 - p1)))


@dataclass(frozen=True)
class MixtureModel:
    """X = Y * eta with Y ~ signal, eta ~ mixing, independent."""

    signal: Distribution
    mixing: Distribution

    def mellin(self, z):
        return self.signal.mellin(z) * self.mixing.mellin(z)

    def strip(self) -> Strip:
        a, b = self.signal.strip(), self.mixing.strip()
        return Strip(max(a.alpha, b.alpha), min(a.beta, b.beta))

    def canonical(self) -> str:
        return f"{self.signal.canonical()}*{self.mixing.canonical()}"


# -- canonical strings ------------------------------------------------------

def _num(token: str) -> float:
    token = token.strip()
    try:
        if "/" in token:
            return float(Fraction(token))
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise SpecSyntaxError(f"cannot parse number {token!r}") from None


def parse_spec(text: str) -> Distribution:
    """Parse a canonical spec string such as ``beta:2,2`` or ``discrete:1@1/3,2@2/3``."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.lower()
    args = [a for a in rest.split(",")] if rest else []
    try:
        if name == "uniform01" and not rest:
            return UniformUnit()
        if name == "beta" and len(args) == 2:
            return Beta(_num(args[0]), _num(args[1]))
        if name == "gamma" and len(args) == 2:
            return Gamma(_num(args[0]), _num(args[1]))
        if name == "exp" and len(args) == 1:
            return Exponential(_num(args[0]))
        if name == "zeta" and len(args) == 1:
            return Zeta(_num(args[0]))
        if name == "geom" and len(args) == 1:
            return Geometric(_num(args[0]))
        if name == "pospoisson" and len(args) == 1:
            return PositivePoisson(_num(args[0]))
        if name == "discrete" and args:
            atoms = []
            for a in args:
                s, at, p = a.partition("@")
                if not at:
                    raise SpecSyntaxError(f"discrete atom {a!r} is not of the form sigma@p")
                atoms.append((_num(s), _num(p)))
            return FiniteDiscrete(tuple(atoms))
    except ParameterError:
        raise
    raise SpecSyntaxError(f"unrecognised distribution spec {text!r}")


# -- sampling ---------------------------------------------------------------

def stream_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for sub-stream ``keys`` of ``seed``.

    The mixing function is numpy's ``SeedSequence(seed, spawn_key=keys)``,
    so streams are independent and reproducible regardless of call order.
    """
    if seed < 0 or seed >= 2 ** 64:
        raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(keys)))


@dataclass(frozen=True, eq=False)
class Sample:
    values: np.ndarray
    seed: int
    spec: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DataError("a sample must be a non-empty 1-d array")
        if not np.all(v > 0) or not np.all(np.isfinite(v)):
            raise DataError("sample values must be finite and strictly positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        return (isinstance(other, Sample) and self.seed == other.seed
                and self.spec == other.spec and np.array_equal(self.values, other.values))

    def to_text(self) -> str:
        lines = [f"# seed={self.seed} spec={self.spec}"]
        lines += [repr(float(v)) for v in self.values]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Sample":
        seed, spec, values = 0, "", []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for field in line[1:].split():
                    key, _, val = field.partition("=")
                    if key == "seed":
                        seed = int(val)
                    elif key == "spec":
                        spec = val
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise DataError(f"cannot parse sample value {line!r}") from None
        return cls(np.array(values), seed, spec)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Sample":
        return cls.from_text(Path(path).read_text())


def cdf(spec: Distribution, x):
    """Standardised c.d.f. of ``spec`` at ``x`` (x >= 0)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("cdf is defined for x >= 0")
    out = spec.cdf(x)
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def sample(spec: Distribution, n: int, seed: int) -> Sample:
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    values = spec.draw(n, stream_rng(seed, 0))
    return Sample(values, seed, spec.canonical())


def sample_mixture(model: MixtureModel, n: int, seed: int) -> Sample:
    """X_i = Y_i * eta_i; Y uses stream 0 (as in ``sample``), eta stream 1."""
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    y = model.signal.draw(n, stream_rng(seed, 0))
    eta = model.mixing.draw(n, stream_rng(seed, 1))
    return Sample(y * eta, seed, model.canonical())
