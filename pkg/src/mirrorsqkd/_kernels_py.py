"""Pure-Python/numpy versions of the hot loops in ``_kernels.pyx``.

Both modules expose the same functions and must agree: the Monte Carlo tally
bit-for-bit, the entropy objective to rounding.
"""

from __future__ import annotations

from math import log2, sqrt

import numpy as np

N_OPS = 4
N_BASES = 2
N_OUTCOMES = 4


def _h2(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


def _bracket(e_a: float, e_b: float, re: float, m: float) -> float:
    w = e_a + e_b
    if w <= 0.0:
        return 0.0
    lam = 0.5 + sqrt((e_a - e_b) ** 2 + 4.0 * re * re) / (2.0 * w)
    if lam > 1.0:
        lam = 1.0
    return (w / m) * (_h2(e_a / w) - _h2(lam))


def sae_point(e0, e1, e2, e3, m, re03, re12) -> float:
    """Unfloored two-term entropy bound at one (re03, re12) pair."""
    return _bracket(e0, e3, re03, m) + _bracket(e1, e2, re12, m)


def _objective(e0, e1, e2, e3, m, lower, cs03, slack, t) -> float:
    re03 = lower - t
    if re03 < 0.0:
        re03 = 0.0
    if re03 > cs03:
        if re03 > cs03 + slack:
            return np.inf
        re03 = cs03
    return sae_point(e0, e1, e2, e3, m, re03, t)


def sae_scan(e0, e1, e2, e3, m, lower, cs03, slack, t) -> np.ndarray:
    """Objective along the free parameter re12 = t; +inf where re03 would exceed its cap."""
    t = np.asarray(t, dtype=np.float64)
    re03 = np.maximum(lower - t, 0.0)
    feasible = re03 <= cs03 + slack
    re03 = np.minimum(re03, cs03)

    def bracket(e_a, e_b, re):
        w = e_a + e_b
        if w <= 0.0:
            return np.zeros_like(re)
        lam = np.minimum(0.5 + np.sqrt((e_a - e_b) ** 2 + 4.0 * re * re) / (2.0 * w), 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            h_lam = np.where(
                lam < 1.0, -lam * np.log2(lam) - (1.0 - lam) * np.log2(1.0 - lam), 0.0
            )
        return (w / m) * (_h2(e_a / w) - h_lam)

    out = bracket(e0, e3, re03) + bracket(e1, e2, t)
    out[~feasible] = np.inf
    return out


def golden_section(e0, e1, e2, e3, m, lower, cs03, slack, lo, hi, tol):
    """Golden-section search for the smallest objective on [lo, hi].

    Returns ``(t, value)`` for the best point evaluated, so a non-unimodal
    bracket can only make the result conservative against the grid value.
    """
    invphi = (sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _objective(e0, e1, e2, e3, m, lower, cs03, slack, c)
    fd = _objective(e0, e1, e2, e3, m, lower, cs03, slack, d)
    best_t, best_f = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _objective(e0, e1, e2, e3, m, lower, cs03, slack, c)
            if fc < best_f:
                best_t, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _objective(e0, e1, e2, e3, m, lower, cs03, slack, d)
            if fd < best_f:
                best_t, best_f = d, fd
    for t in (lo, hi):
        f = _objective(e0, e1, e2, e3, m, lower, cs03, slack, t)
        if f < best_f:
            best_t, best_f = t, f
    return best_t, best_f


def _draw(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    # smallest k with u < cdf[k]; the last entry is treated as 1
    return np.sum(u[:, None] >= cdf[..., :-1], axis=-1)


def tally_rounds(op_cdf, basis_p0, alice_cdf, bob_cdf, uniforms) -> np.ndarray:
    """Sample protocol rounds and count them by (op, basis, Alice outcome, Bob outcome).

    ``uniforms`` has one row of four U[0,1) draws per round, consumed in
    protocol order: Alice's operation, Bob's basis, Alice's detector, Bob's
    detector.  ``alice_cdf[op]`` and ``bob_cdf[op, alice, basis]`` are
    cumulative outcome distributions, the latter conditional on Alice's result.
    """
    u = np.asarray(uniforms, dtype=np.float64)
    op_cdf = np.asarray(op_cdf, dtype=np.float64)
    alice_cdf = np.asarray(alice_cdf, dtype=np.float64)
    bob_cdf = np.asarray(bob_cdf, dtype=np.float64)

    op = _draw(op_cdf[None, :], u[:, 0])
    basis = (u[:, 1] >= basis_p0).astype(np.int64)
    alice = _draw(alice_cdf[op], u[:, 2])
    bob = _draw(bob_cdf[op, alice, basis], u[:, 3])
    flat = ((op * N_BASES + basis) * N_OUTCOMES + alice) * N_OUTCOMES + bob
    counts = np.bincount(flat, minlength=N_OPS * N_BASES * N_OUTCOMES * N_OUTCOMES)
    return counts.reshape(N_OPS, N_BASES, N_OUTCOMES, N_OUTCOMES).astype(np.int64)
