"""Independent brute-force references used by the tests.

Everything here is deliberately naive (loops, series, dense grids) and
stays independent of the code paths it checks.
"""

import math

import numpy as np


def kron_loops(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ra, ca = A.shape
    rb, cb = B.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = A[i, j] * B[k, l]
    return out


def ptrace_env_loops(M: np.ndarray, dim_s: int, dim_b: int) -> np.ndarray:
    out = np.zeros((dim_s, dim_s), dtype=complex)
    for s in range(dim_s):
        for t in range(dim_s):
            for b in range(dim_b):
                out[s, t] += M[s * dim_b + b, t * dim_b + b]
    return out


def expm_series(A: np.ndarray, terms: int = 60) -> np.ndarray:
    """Taylor series with squaring; adequate as a reference for ||A|| <~ 30."""
    n = A.shape[0]
    nrm = float(np.linalg.norm(A, 2))
    squarings = max(0, int(math.ceil(math.log2(max(nrm, 1e-30))))) if nrm > 1.0 else 0
    X = A / (2.0**squarings)
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def gamma_trapezoid(
    t: float,
    j0: float,
    mu: float,
    omega_c: float,
    beta: float,
    n: int = 1_000_000,
    wmax_mult: float = 80.0,
) -> float:
    """High-resolution trapezoid reference for the bath integral.

    Substituting omega = u^p with p = max(2, ceil(2/(1+mu))) removes the
    omega^mu endpoint singularity, so the transformed integrand vanishes
    at u = 0 and plain trapezoid converges at second order.
    """
    if t == 0.0:
        return 0.0
    p = max(2, math.ceil(2.0 / (1.0 + mu)))
    wmax = omega_c * wmax_mult
    u = np.linspace(0.0, wmax ** (1.0 / p), n + 1)
    w = u**p
    with np.errstate(divide="ignore", invalid="ignore"):
        x = 0.5 * beta * w
        coth = np.where(x > 1e-8, 1.0 / np.tanh(np.maximum(x, 1e-300)), np.inf)
        small = x <= 1e-8
        coth[small] = 1.0 / np.maximum(x[small], 1e-300) + x[small] / 3.0
        f = j0 * w ** (mu - 1.0) * np.exp(-w / omega_c)
        f = f * 2.0 * np.sin(0.5 * w * t) ** 2 * coth
        g = f * p * u ** (p - 1.0)
    g[0] = 0.0
    return float(np.trapezoid(g, u))
