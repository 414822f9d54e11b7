"""Composite Simpson rule on [-T, T] and fast trigonometric sums on its nodes.

The inversion integrals need sums of the form ``sum_i c_i exp(i v_k a_i)`` for
every node ``v_k`` of a uniform grid. Writing ``k = m J + l`` splits the
phase into ``exp(i (v_0 + m J h) a) * exp(i l h a)``, which turns the double
loop into one complex matrix product.
"""

import math

import numpy as np


def simpson_nodes(T: float, panels: int):
    """Nodes and composite Simpson weights on [-T, T].

    ``panels`` is rounded up to a multiple of 4 so that v = 0 is a node and
    each half-interval is integrated by its own Simpson rule (the triangular
    kernel has a kink at 0).
    """
    panels = int(4 * math.ceil(panels / 4))
    v = np.linspace(-T, T, panels + 1)
    h = 2.0 * T / panels
    w = np.full(panels + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return v, w * (h / 3.0)


def _block(n_nodes: int) -> int:
    return int(min(1024, max(16, 2 ** round(math.log2(math.sqrt(max(n_nodes, 1)))))))


def phase_sum(a, c, v0: float, h: float, n_nodes: int) -> np.ndarray:
    """``S_k = sum_i c_i exp(i (v0 + k h) a_i)`` for ``k = 0 .. n_nodes-1``."""
    a = np.asarray(a, dtype=float).ravel()
    c = np.asarray(c, dtype=complex).ravel()
    J = _block(n_nodes)
    K = -(-n_nodes // J)
    starts = v0 + np.arange(K) * (J * h)
    steps = np.arange(J) * h
    out = np.zeros((K, J), dtype=complex)
    chunk = max(1, 4_000_000 // max(K, J))
    for s in range(0, a.size, chunk):
        aa = a[s:s + chunk]
        P = c[s:s + chunk] * np.exp(1j * np.outer(starts, aa))
        B = np.exp(1j * np.outer(aa, steps))
        out += P @ B
    return out.ravel()[:n_nodes]


def phase_eval(g, b, v0: float, h: float) -> np.ndarray:
    """``R_j = sum_k g_k exp(-i (v0 + k h) b_j)`` for each ``b_j``."""
    g = np.asarray(g, dtype=complex).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n_nodes = g.size
    J = _block(n_nodes)
    K = -(-n_nodes // J)
    G = np.zeros(K * J, dtype=complex)
    G[:n_nodes] = g
    G = G.reshape(K, J)
    starts = v0 + np.arange(K) * (J * h)
    steps = np.arange(J) * h
    out = np.empty(b.size, dtype=complex)
    chunk = max(1, 4_000_000 // max(K, J))
    for s in range(0, b.size, chunk):
        bb = b[s:s + chunk]
        E = np.exp(-1j * np.outer(steps, bb))
        Q = np.exp(-1j * np.outer(starts, bb))
        out[s:s + chunk] = np.einsum("mj,mj->j", Q, G @ E)
    return out
