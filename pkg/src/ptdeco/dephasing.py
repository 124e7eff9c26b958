"""Exactly solvable dephasing of a PT-symmetric qubit in a bosonic bath.

The qubit is ``H = [[i*alpha, 1], [1, -i*alpha]]`` with parity ``sigma_x``
(unbroken phase for |alpha| <= 1, energies ``-+ sqrt(1 - alpha^2)``). The
bath enters only through the temperature-dependent integral

    gamma(t) = int_0^inf dw J(w)/w^2 (1 - cos wt) coth(beta w / 2),

with spectral density ``J(w) = J0 w^(1+mu) exp(-w/w_c)`` and hbar = 1.
The decoherence envelope is ``D(t) = exp(-E1^2 gamma(t))``; it approaches 1
as |alpha| -> 1 because E1 -> 0 — decoherence freezes out at the critical
point together with the dynamics.

gamma(t) is evaluated by splitting the half-line three ways: an adaptive
panel on [0, w0] where the full integrand is smooth in phase (w0 ~ pi/t,
handles the integrable w^mu endpoint), an oscillatory-weight panel on
[w0, w_split] for the cos(wt) part, a plain adaptive panel for the rest,
and an explicit exponential-tail bound beyond ``w_split = w_c ln(1/tol)``
folded into the error estimate. Results are memoized per parameter set; a
sweep therefore computes gamma once per time and reuses it for every alpha.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaincc
from scipy.special import gamma as gamma_fn

from .errors import (
    BrokenPhase,
    ExceptionalPoint,
    InconsistentInitialState,
    InvalidExponent,
    QuadratureFailure,
)
from .pt_core import CanonicalMap, PtHamiltonian, require_density_matrix

DEFAULT_GAMMA_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

#: Below beta*w = 1e-4 the coth factor switches to its Laurent series.
_COTH_SERIES_CUT = 1e-4


@dataclass(frozen=True)
class SpectralDensity:
    """Power-law bath spectral density with exponential cutoff."""

    j0: float
    mu: float
    omega_c: float

    def __post_init__(self):
        if self.j0 < 0.0:
            raise ValueError("j0 must be >= 0")
        if self.mu <= -1.0:
            raise InvalidExponent(f"mu = {self.mu} <= -1 makes gamma(t) divergent")
        if self.omega_c <= 0.0:
            raise ValueError("omega_c must be > 0")

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.j0 * omega ** (1.0 + self.mu) * np.exp(-omega / self.omega_c)


@dataclass(frozen=True)
class DephasingModel:
    """PT qubit parameter, inverse temperature, and bath spectral density."""

    alpha: float
    beta: float
    spectral: SpectralDensity

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be > 0")

    @property
    def unbroken(self) -> bool:
        return abs(self.alpha) <= 1.0

    @property
    def e1(self) -> float:
        """Lower qubit energy -sqrt(1 - alpha^2)."""
        e1, _ = qubit_energies(self.alpha)
        return e1


@dataclass(frozen=True)
class GammaResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def qubit_hamiltonian(alpha: float) -> PtHamiltonian:
    """PT qubit [[i a, 1], [1, -i a]] with parity sigma_x."""
    H = np.array([[1j * alpha, 1.0], [1.0, -1j * alpha]], dtype=complex)
    return PtHamiltonian(H=H, P=SIGMA_X)


def qubit_energies(alpha: float) -> tuple[float, float]:
    """(E1, E2) = (-sqrt(1 - alpha^2), +sqrt(1 - alpha^2)); unbroken only."""
    if abs(alpha) > 1.0:
        raise BrokenPhase(f"|alpha| = {abs(alpha)} > 1: complex spectrum")
    root = math.sqrt(1.0 - alpha * alpha)
    return -root, root


def qubit_transform(alpha: float) -> CanonicalMap:
    """Closed-form canonical map of the PT qubit.

    T = (1/2) [[s1+s2, -i(s1-s2)], [i(s1-s2), s1+s2]] with
    s_{1,2} = sqrt(2 (1 +- alpha)). This carries the closed form's own
    scalar gauge (det T = 2 sqrt(1 - alpha^2)), which agrees with
    pt_core.canonical_transform up to a positive scalar.
    """
    if abs(alpha) > 1.0:
        raise BrokenPhase(f"|alpha| = {abs(alpha)} > 1: no canonical map")
    if abs(alpha) == 1.0:
        raise ExceptionalPoint("s2 = 0 at |alpha| = 1; T is singular")
    s1 = math.sqrt(2.0 * (1.0 + alpha))
    s2 = math.sqrt(2.0 * (1.0 - alpha))

    def build(a: float, b: float) -> np.ndarray:
        return 0.5 * np.array(
            [[a + b, -1j * (a - b)], [1j * (a - b), a + b]], dtype=complex
        )

    T = build(s1, s2)
    T_inv = build(1.0 / s1, 1.0 / s2)
    condition = max(s1, s2) / min(s1, s2)
    return CanonicalMap(T=T, T_inv=T_inv, condition=condition)


def _coth(x: float) -> float:
    # Laurent series below the cut avoids 0/0 in downstream products.
    if x < _COTH_SERIES_CUT:
        return 1.0 / x + x / 3.0 - x**3 / 45.0
    return 1.0 / math.tanh(x)


def _tail_bound(spec: SpectralDensity, beta: float, w_split: float) -> float:
    """Bound on the neglected integral beyond w_split ((1-cos) <= 2)."""
    xs = w_split / spec.omega_c
    coth_s = _coth(0.5 * beta * w_split)
    if spec.mu <= 1.0:
        # w^(mu-1) is non-increasing there
        tail = xs ** (spec.mu - 1.0) * math.exp(-xs)
    else:
        tail = gamma_fn(spec.mu) * gammaincc(spec.mu, xs)
    return 2.0 * spec.j0 * coth_s * spec.omega_c**spec.mu * tail


@lru_cache(maxsize=16384)
def _gamma_quad(spec: SpectralDensity, beta: float, t: float, tol: float) -> GammaResult:
    j0, mu, wc = spec.j0, spec.mu, spec.omega_c

    def smooth(w: float) -> float:
        # J(w)/w^2 coth(beta w / 2), the non-oscillatory factor
        return j0 * w ** (mu - 1.0) * math.exp(-w / wc) * _coth(0.5 * beta * w)

    def full(w: float) -> float:
        if w <= 0.0:
            return 0.0
        return smooth(w) * 2.0 * math.sin(0.5 * w * t) ** 2

    w_split = wc * (math.log(1.0 / tol) + 10.0)
    w0 = min(math.pi / t, w_split)

    value = 0.0
    err = _tail_bound(spec, beta, w_split)
    neval = 0

    res = integrate.quad(full, 0.0, w0, epsabs=tol / 4, epsrel=tol, limit=200, full_output=True)
    value += res[0]
    err += res[1]
    neval += res[2]["neval"]

    if w0 < w_split:
        res = integrate.quad(
            smooth, w0, w_split, epsabs=tol / 4, epsrel=tol, limit=200, full_output=True
        )
        value += res[0]
        err += res[1]
        neval += res[2]["neval"]
        res = integrate.quad(
            smooth,
            w0,
            w_split,
            weight="cos",
            wvar=t,
            epsabs=tol / 4,
            epsrel=tol,
            limit=400,
            full_output=True,
        )
        value -= res[0]
        err += res[1]
        neval += res[2]["neval"]

    if err > tol * max(1.0, abs(value)):
        raise QuadratureFailure(
            f"gamma({t}) error estimate {err:.3e} exceeds tol relative to value {value:.6g}"
        )
    return GammaResult(value=max(value, 0.0), abs_error_estimate=err, evaluations=neval)


def gamma_integral(
    model: DephasingModel, t: float, tol: float = DEFAULT_GAMMA_TOL
) -> GammaResult:
    """Bath integral gamma(t); the error estimate satisfies
    ``err <= tol * max(1, gamma)`` or :class:`QuadratureFailure` is raised."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return GammaResult(0.0, 0.0, 0)
    return _gamma_quad(model.spectral, model.beta, float(t), float(tol))


def gamma_discrete(omegas, gs, beta, t: float) -> float:
    """Discrete-bath form sum_n (g_n/w_n)^2 (1 - cos w_n t) coth(beta w_n / 2).

    ``beta=None`` or infinity takes the zero-temperature limit coth -> 1.
    """
    omegas = np.asarray(omegas, dtype=float)
    gs = np.asarray(gs, dtype=float)
    if beta is None or math.isinf(beta):
        coth = np.ones_like(omegas)
    else:
        coth = np.array([_coth(0.5 * beta * w) for w in omegas])
    return float(np.sum((gs / omegas) ** 2 * 2.0 * np.sin(0.5 * omegas * t) ** 2 * coth))


def decoherence_function(
    model: DephasingModel, t: float, tol: float = DEFAULT_GAMMA_TOL
) -> float:
    """D(t) = exp(-E1^2 gamma(t)), with D identically 1 at |alpha| = 1."""
    e1, _ = qubit_energies(model.alpha)
    if t == 0.0 or e1 == 0.0:
        return 1.0
    gamma = gamma_integral(model, t, tol)
    return math.exp(-(e1 * e1) * gamma.value)


def ohmic_asymptote(alpha: float, j0: float, beta: float, t: float) -> float:
    """Long-time Ohmic envelope exp(-pi J0 (1 - alpha^2) t / beta).

    Pure formula; validity (mu = 0, beta*w_c >> 1, large t) is the
    caller's concern.
    """
    return math.exp(-math.pi * j0 * (1.0 - alpha * alpha) * t / beta)


def evolve_exact_given_d(varrho0, e1: float, t: float, d: float) -> np.ndarray:
    """The transcribed closed-form solution with an externally supplied D(t).

        r11(t) = 1/2 - Re[r12(0) e^(-i E1 t)] D(t)
        r12(t) = r11(0) - 1/2 + i Im[r12(0) e^(-i E1 t)] D(t)

    with r22 = 1 - r11 and r21 = conj(r12). The formulas at t = 0 with
    D(0) = 1 must reproduce the input state (this restricts admissible
    initial states to r11(0) = 1/2, Re r12(0) = 0); otherwise
    :class:`InconsistentInitialState` is raised rather than guessing a
    correction.
    """
    rho0 = require_density_matrix(varrho0, name="varrho0")
    if rho0.shape != (2, 2):
        raise InconsistentInitialState("the exact solution is for a qubit (2x2)")
    r11_0 = rho0[0, 0].real
    r12_0 = complex(rho0[0, 1])

    r11_at0 = 0.5 - r12_0.real
    r12_at0 = (r11_0 - 0.5) + 1j * r12_0.imag
    if abs(r11_at0 - r11_0) > 1e-9 or abs(r12_at0 - r12_0) > 1e-9:
        raise InconsistentInitialState(
            "the closed-form solution at t=0 requires r11(0) = 1/2 - Re r12(0) "
            "and Re r12(0) = r11(0) - 1/2, i.e. r11(0) = 1/2 and Re r12(0) = 0; "
            f"got r11(0) = {r11_0:.6g}, r12(0) = {r12_0:.6g}"
        )

    rot = r12_0 * np.exp(-1j * e1 * t)
    r11 = 0.5 - rot.real * d
    r12 = (r11_0 - 0.5) + 1j * rot.imag * d
    return np.array([[r11, r12], [np.conj(r12), 1.0 - r11]], dtype=complex)


def evolve_exact(
    model: DephasingModel, varrho0, t: float, tol: float = DEFAULT_GAMMA_TOL
) -> np.ndarray:
    """Exact reduced qubit state at time t in the hermitian representation.

    Computes D(t) from the bath integral and applies
    :func:`evolve_exact_given_d`; see there for the admissible-state check.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    e1, _ = qubit_energies(model.alpha)
    d = decoherence_function(model, t, tol)
    return evolve_exact_given_d(varrho0, e1, t, d)


@dataclass(frozen=True, eq=False)
class SweepTable:
    """D(t; alpha) on a (times x alphas) grid with the shared gamma values."""

    times: np.ndarray
    alphas: np.ndarray
    gamma: np.ndarray  # gamma(t), alpha-independent
    decoherence: np.ndarray  # shape (len(times), len(alphas))


def sweep_alpha(
    alphas,
    times,
    spectral: SpectralDensity,
    beta: float,
    tol: float = DEFAULT_GAMMA_TOL,
    max_workers: int = 1,
) -> SweepTable:
    """Decoherence-function family over an alpha grid.

    gamma(t) is computed once per time point (in parallel when
    ``max_workers > 1``; assembly order is fixed by the grid index) and
    reused across alphas, so columns for +alpha and -alpha are identical
    by construction.
    """
    alphas = np.asarray(list(alphas), dtype=float)
    times = np.asarray(list(times), dtype=float)
    if alphas.size == 0 or times.size == 0:
        raise ValueError("alphas and times must be non-empty")
    if np.any(np.abs(alphas) > 1.0):
        raise BrokenPhase("sweep requires |alpha| <= 1")
    if np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
        raise ValueError("times must be ascending and nonnegative")

    need_gamma = bool(np.any(np.abs(alphas) < 1.0))
    model0 = DephasingModel(alpha=0.0, beta=beta, spectral=spectral)
    if need_gamma:
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(
                    pool.map(lambda t: gamma_integral(model0, t, tol), times)
                )
        else:
            results = [gamma_integral(model0, t, tol) for t in times]
        gamma = np.array([r.value for r in results])
    else:
        gamma = np.zeros_like(times)

    e1sq = np.array([qubit_energies(a)[0] ** 2 for a in alphas])
    deco = np.exp(-np.outer(gamma, e1sq))
    return SweepTable(times=times, alphas=alphas, gamma=gamma, decoherence=deco)
