"""Complex special functions behind the closed-form Mellin transforms.

``complex_gamma`` uses the Lanczos approximation with Godfrey's g=7, n=9
coefficients plus the reflection formula left of Re(z)=1/2. ``complex_zeta``
sums the Dirichlet series directly and adds an Euler-Maclaurin remainder, so
it is only offered on Re(w) > 1 where the series itself converges.
"""

import math

import numpy as np
from scipy import special as sps

from .errors import DomainError, PoleError

_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# B_2, B_4, ..., B_32 divided by (2j)!
_EM_TERMS = 16
_EM_COEF = np.array([
    sps.bernoulli(2 * j)[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)
])


def _lanczos_loggamma(z):
    # valid for Re(z) >= 1/2
    z = z - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z):
    """log(sin(pi z)) without overflow for large |Im z| (branch unspecified)."""
    w = np.pi * z
    out = np.empty_like(w)
    upper = w.imag >= 0
    # sin w = (e^{-iw}/(2i)) (e^{2iw} - 1) * (-1); pick the factorisation whose
    # exponential is bounded on each half plane
    wu = w[upper]
    out[upper] = -1j * wu + np.log1p(-np.exp(2j * wu)) + np.log(-0.5 / 1j + 0j)
    wl = w[~upper]
    out[~upper] = 1j * wl + np.log1p(-np.exp(-2j * wl)) + np.log(0.5 / 1j + 0j)
    return out


def complex_loggamma(z):
    """A logarithm of Gamma(z); the real part is log|Gamma(z)|.

    The imaginary part is correct modulo 2*pi only, which is all that is
    needed when the result is exponentiated.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    near_int = np.abs(z - np.round(z.real))
    if np.any((z.real <= 0.5) & (np.round(z.real) <= 0) & (near_int < 1e-12)):
        raise PoleError("Gamma has a pole at non-positive integers")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_loggamma(z[right])
    zl = z[~right]
    if zl.size:
        out[~right] = _LOG_PI - _log_sin_pi(zl) - _lanczos_loggamma(1.0 - zl)
    return out[0] if scalar else out


def complex_gamma(z):
    """Gamma function for complex arguments (vectorised)."""
    return np.exp(complex_loggamma(z))


def log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _zeta_chunk(w):
    n_terms = int(max(20, math.ceil(np.max(np.abs(w)) / 2.0) + 10))
    k = np.arange(1, n_terms, dtype=float)
    logk = np.log(k)
    total = np.exp(-np.outer(w, logk)).sum(axis=1)
    big_n = float(n_terms)
    n_pow = np.exp(-w * math.log(big_n))  # N^{-w}
    total += big_n * n_pow / (w - 1.0) + 0.5 * n_pow
    rising = w.copy()  # (w)_{2j-1}
    n_pow_j = n_pow / big_n  # N^{-w-1}
    for j in range(_EM_TERMS):
        total += _EM_COEF[j] * rising * n_pow_j
        rising = rising * (w + 2 * j + 1) * (w + 2 * j + 2)
        n_pow_j = n_pow_j / (big_n * big_n)
    return total


def complex_zeta(w):
    """Riemann zeta for Re(w) > 1 (vectorised).

    Direct Dirichlet partial sum of length ~|w|/2 followed by 16
    Euler-Maclaurin correction terms.
    """
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w.real <= 1.0):
        raise DomainError("complex_zeta is only implemented for Re(w) > 1")
    flat = w.ravel()
    out = np.empty_like(flat)
    order = np.argsort(np.abs(flat))
    chunk = 512
    for start in range(0, flat.size, chunk):
        idx = order[start:start + chunk]
        out[idx] = _zeta_chunk(flat[idx])
    out = out.reshape(w.shape)
    return out[0] if scalar else out


def real_zeta(s):
    """Riemann zeta for real s > 1."""
    if not s > 1.0:
        raise DomainError(f"zeta(s) needs s > 1, got {s}")
    return float(sps.zeta(s))
