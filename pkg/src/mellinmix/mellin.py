"""Mellin-Stieltjes transforms and the non-vanishing set of M[G].

``mellin_analytic`` evaluates ``E[X^{z-1}]`` in closed form and refuses
arguments outside the strip of convergence. ``hg_region`` reports the set of
real parts ``u`` on which ``|M[G](u + iv)|`` stays away from zero uniformly in
``v``, which is where dividing by the mixing transform is well posed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import (
    Distribution,
    FiniteDiscrete,
    Geometric,
    PositivePoisson,
    Sample,
    Strip,
    UniformUnit,
    Zeta,
)
from .errors import DataError, DivisionHazardError, StripError, UnsupportedFamilyError
from .special import real_zeta

DIVISION_HAZARD = 1e-14


def strip(spec: Distribution) -> Strip:
    return spec.strip()


def mellin_analytic(spec: Distribution, z):
    """Exact ``E[X^{z-1}]`` for ``X ~ spec``; scalar or array ``z``."""
    z = np.asarray(z, dtype=complex)
    st = spec.strip()
    if not st.contains(z.real):
        raise StripError(f"Re(z) must lie in the strip {st} of {spec.canonical()}")
    out = spec.mellin(z)
    return complex(out) if out.ndim == 0 else out


def _log_values(values) -> np.ndarray:
    if isinstance(values, Sample):
        values = values.values
    x = np.asarray(values, dtype=float)
    if x.size == 0 or np.any(~(x > 0)):
        raise DataError("empirical Mellin transform needs strictly positive data")
    return np.log(x)


def mellin_empirical(sample, z):
    """``(1/n) sum_i X_i^{z-1}``."""
    logx = _log_values(sample)
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    chunk = max(1, 2_000_000 // logx.size)
    for s in range(0, flat.size, chunk):
        out[s:s + chunk] = np.exp(np.outer(flat[s:s + chunk] - 1.0, logx)).mean(axis=1)
    out = out.reshape(z.shape)
    return complex(out) if out.ndim == 0 else out


def mellin_ratio_estimate(sample, g_spec: Distribution, z):
    """Estimate of M[F](z): empirical transform of X divided by M[G](z)."""
    mg = np.asarray(mellin_analytic(g_spec, z))
    if np.any(np.abs(mg) < DIVISION_HAZARD):
        raise DivisionHazardError(
            "|M[G](z)| < 1e-14; choose u inside hg_region(G)")
    out = np.asarray(mellin_empirical(sample, z)) / mg
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HgRegion:
    """Admissible real parts for division by M[G].

    ``kind`` is ``"half_line"`` (u < u_max), ``"punctured_line"``
    (u != u_excluded) or ``"whole_line"``. ``conservative`` flags regions that
    come from the leading-atom domination bound rather than exact analysis;
    ``conservative_u_max`` carries such a bound even when an exact region is
    known.
    """

    kind: str
    u_max: float | None = None
    u_excluded: float | None = None
    conservative: bool = False
    conservative_u_max: float | None = None
    note: str = ""

    def contains(self, u: float) -> bool:
        if self.kind == "half_line":
            return u < self.u_max
        if self.kind == "punctured_line":
            return u != self.u_excluded
        return True

    def describe(self) -> str:
        if self.kind == "half_line":
            body = f"half_line(u < {self.u_max:.6g})"
        elif self.kind == "punctured_line":
            body = f"punctured_line(u != {self.u_excluded:.6g})"
        else:
            body = "whole_line"
        if self.conservative:
            body += " [conservative]"
        if self.conservative_u_max is not None and not self.conservative:
            body += f" (conservative bound u < {self.conservative_u_max:.6g})"
        return body


def dominant_atom_bound(p1: float, sigma_ratio: float) -> float:
    """Largest u for which the first atom dominates the rest of M[G](u + iv).

    With atoms ``sigma_1 < sigma_2 < ...`` and ``p1 = P(eta = sigma_1)``,
    ``|M[G](u+iv)| >= sigma_1^{u-1} p1 - sigma_2^{u-1} (1 - p1) > 0`` for
    ``u < 1 + log(p1/(1-p1)) / log(sigma_2/sigma_1)`` (and u <= 1, where the
    tail estimate is valid).
    """
    return math.log(p1 / (1.0 - p1)) / math.log(sigma_ratio) + 1.0


def positive_poisson_threshold() -> float:
    """Positive root of ``exp(lam) = 3 lam + 1``.

    For ``PositivePoisson(lam)`` with ``lam`` below this value the
    leading-atom bound admits some ``u > 0``.
    """
    return optimize.brentq(lambda lam: math.expm1(lam) - 3.0 * lam, 1.0, 3.0, xtol=1e-14)


def hg_region(g_spec: Distribution) -> HgRegion:
    if isinstance(g_spec, UniformUnit):
        return HgRegion(
            "whole_line",
            note="|M[G](u+iv)| = 1/|u+iv| decays in |v|; a finite truncation T is required")
    if isinstance(g_spec, FiniteDiscrete):
        sig, pr = g_spec.sigmas, g_spec.probs
        if sig.size == 1:
            return HgRegion("whole_line", note="degenerate mixing law")
        ff = dominant_atom_bound(pr[0], sig[1] / sig[0])
        if sig.size == 2:
            u0 = 1.0 + math.log(pr[0] / pr[1]) / math.log(sig[1] / sig[0])
            # p1 and 1 - p1 are rounded separately; snap sub-1e-12 noise so that
            # exact rational inputs give an exact threshold
            if abs(u0 - round(u0, 12)) < 1e-12:
                u0 = round(u0, 12) + 0.0
            # with two atoms the domination bound coincides with u0
            return HgRegion("punctured_line", u_excluded=u0, conservative_u_max=min(u0, 1.0))
        return HgRegion("half_line", u_max=min(ff, 1.0), conservative=True,
                        conservative_u_max=min(ff, 1.0))
    if isinstance(g_spec, Geometric):
        ff = dominant_atom_bound(g_spec.p, 2.0)
        return HgRegion("half_line", u_max=min(ff, 1.0), conservative=True,
                        conservative_u_max=min(ff, 1.0))
    if isinstance(g_spec, PositivePoisson):
        lam = g_spec.lam
        p1 = lam * math.exp(-lam) / -math.expm1(-lam)
        ff = dominant_atom_bound(p1, 2.0)
        return HgRegion("half_line", u_max=min(ff, 1.0), conservative=True,
                        conservative_u_max=min(ff, 1.0))
    if isinstance(g_spec, Zeta):
        # zeta has no zeros with real part > 1, so every u < s is admissible;
        # the cruder bound p1 > 2^{u-1} is reported alongside
        p1 = 1.0 / real_zeta(g_spec.s)
        crude = 1.0 + math.log(p1) / math.log(2.0)
        return HgRegion("half_line", u_max=g_spec.s, conservative=False,
                        conservative_u_max=crude)
    raise UnsupportedFamilyError(
        f"no non-vanishing analysis for mixing law {g_spec.canonical()}")
