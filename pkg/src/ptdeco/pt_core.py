"""PT-symmetry checks, biorthonormal spectral data, and the canonical
transformation that maps a PT-symmetric Hamiltonian to a hermitian one.

Conventions. Time reversal acts as entrywise complex conjugation, so the
PT condition is the operator pair ``P H P = H^dag`` and ``conj(H) = H^dag``.
A :class:`BiorthoSystem` stores right eigenvectors ``psi_n`` and their duals
``phi_n`` rescaled to the PT normalization ``|<psi_n|P|psi_n>| = 1``, which
makes ``P psi_n = exp(i theta_n) phi_n`` exact with ``theta_n`` in {0, pi}.
The canonical map ``T = sqrt(V^dag V)`` is built from the unit-norm
eigenvector gauge of :func:`ptdeco.linalg.eig_general` and normalized to
``det(T) = 1``; the overall positive scalar of ``T`` cancels in every
similarity transform, so comparisons against closed forms are up to scalar.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    BrokenPhase,
    DegenerateSpectrum,
    DimensionMismatch,
    ExceptionalPoint,
    IllConditioned,
    NonDiagonalizable,
    NotDensityMatrix,
    NotHermitian,
    NotPtSymmetric,
)
from .linalg import DEFAULT_TOL, as_cmatrix, norm2

#: Spectral-reality classification threshold (relative to ||H||).
DEFAULT_EPS_SPEC = 1e-9

#: Condition-number cap of T beyond which IllConditioned fires.
DEFAULT_COND_CAP = 1e8

#: Snap window for the biorthonormal phases theta_n around 0 or pi.
THETA_SNAP = 1e-6


@dataclass(frozen=True, eq=False)
class PtHamiltonian:
    """A (generally non-hermitian) Hamiltonian with its parity operator."""

    H: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        H = as_cmatrix(self.H, "H")
        P = as_cmatrix(self.P, "P")
        n = H.shape[0]
        if H.shape[0] != H.shape[1]:
            raise DimensionMismatch(f"H must be square, got {H.shape}")
        if P.shape != H.shape:
            raise DimensionMismatch(f"P shape {P.shape} does not match H {H.shape}")
        if not linalg.is_hermitian(P):
            raise NotHermitian("parity operator P must be hermitian")
        if norm2(P @ P - np.eye(n)) > DEFAULT_TOL * max(norm2(P) ** 2, 1.0):
            raise NotPtSymmetric("parity operator P must square to the identity")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "P", P)

    @property
    def dim(self) -> int:
        return self.H.shape[0]


class PhaseClass(enum.Enum):
    REAL = "Real"
    COMPLEX_PAIRS = "ComplexPairs"
    EXCEPTIONAL_POINT = "ExceptionalPoint"


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Eigenvalues (sorted by real, then imaginary part) and the phase they imply."""

    eigenvalues: np.ndarray
    classification: PhaseClass


@dataclass(frozen=True, eq=False)
class BiorthoSystem:
    """PT-normalized biorthonormal eigendata of an unbroken PT Hamiltonian.

    ``psi[:, n]`` and ``phi[:, n]`` satisfy ``<psi_n|phi_m> = delta_nm``,
    ``sum_n |psi_n><phi_n| = I``, and ``P psi_n = exp(i theta_n) phi_n``.
    Energies are real and ascending.
    """

    energies: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    theta: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Return sum_n E_n |psi_n><phi_n|."""
        return (self.psi * self.energies) @ self.phi.conj().T


@dataclass(frozen=True, eq=False)
class CanonicalMap:
    """Hermitian positive-definite T with its inverse and conditioning."""

    T: np.ndarray
    T_inv: np.ndarray
    condition: float


def check_pt_symmetry(ham: PtHamiltonian, tol: float = DEFAULT_TOL) -> bool:
    """True iff both P H P = H^dag and conj(H) = H^dag hold within tol*||H||."""
    H, P = ham.H, ham.P
    scale = max(norm2(H), 1.0)
    Hd = H.conj().T
    parity_ok = norm2(P @ H @ P - Hd) <= tol * scale
    time_ok = norm2(H.conj() - Hd) <= tol * scale
    return bool(parity_ok and time_ok)


def spectrum(ham: PtHamiltonian, eps_spec: float = DEFAULT_EPS_SPEC) -> SpectrumReport:
    """Classify the spectrum as Real, ComplexPairs, or ExceptionalPoint."""
    try:
        eig = linalg.eig_general(ham.H)
        values = eig.values
    except NonDiagonalizable:
        values = np.linalg.eigvals(ham.H)
        order = np.lexsort((values.imag, values.real))
        return SpectrumReport(values[order], PhaseClass.EXCEPTIONAL_POINT)
    scale = max(norm2(ham.H), 1.0)
    if float(np.max(np.abs(values.imag))) <= eps_spec * scale:
        cls = PhaseClass.REAL
    else:
        cls = PhaseClass.COMPLEX_PAIRS
    return SpectrumReport(values, cls)


def _require_unbroken(ham: PtHamiltonian, eps_spec: float) -> None:
    report = spectrum(ham, eps_spec)
    if report.classification is PhaseClass.EXCEPTIONAL_POINT:
        raise ExceptionalPoint("spectrum is at an exceptional point")
    if report.classification is PhaseClass.COMPLEX_PAIRS:
        raise BrokenPhase("spectrum contains complex-conjugate pairs")


def biorthonormal_basis(ham: PtHamiltonian, tol: float = DEFAULT_TOL) -> BiorthoSystem:
    """Biorthonormal eigenbasis of an unbroken-phase PT Hamiltonian.

    Eigenvectors are rescaled from the unit-norm gauge to the PT
    normalization (see module docstring); the phases ``theta_n`` are read
    off ``arg <phi_n|P|psi_n>`` and snapped to {0, pi}. A value that is not
    within ``THETA_SNAP`` of either raises :class:`NotPtSymmetric`.
    """
    _require_unbroken(ham, DEFAULT_EPS_SPEC)
    eig = linalg.eig_general(ham.H, tol)
    energies = eig.values.real
    scale = max(norm2(ham.H), 1.0)

    gaps = np.diff(energies)
    if energies.size > 1 and float(np.min(gaps)) <= DEFAULT_EPS_SPEC * scale:
        raise DegenerateSpectrum(
            f"minimal level spacing {float(np.min(gaps)):.3e} is degenerate"
        )

    psi = eig.right.copy()
    phi = eig.left.copy()
    P = ham.P
    theta = np.empty(energies.size)
    for n in range(energies.size):
        c = psi[:, n].conj() @ P @ psi[:, n]
        if abs(c.imag) > THETA_SNAP * max(abs(c), 1.0) or abs(c) <= tol:
            raise NotPtSymmetric(
                f"<psi_{n}|P|psi_{n}> = {c:.3e} is not real and nonzero"
            )
        w = abs(c.real)
        psi[:, n] /= np.sqrt(w)
        phi[:, n] *= np.sqrt(w)
        ovl = phi[:, n].conj() @ P @ psi[:, n]
        ang = float(np.angle(ovl)) % (2.0 * np.pi)
        if min(ang, 2.0 * np.pi - ang) <= THETA_SNAP:
            theta[n] = 0.0
        elif abs(ang - np.pi) <= THETA_SNAP:
            theta[n] = np.pi
        else:
            raise NotPtSymmetric(
                f"phase of <phi_{n}|P|psi_{n}> = {ang:.6f} is neither 0 nor pi"
            )
        # the phase alone does not certify the parity relation; require the
        # full vector identity P psi_n = exp(i theta_n) phi_n
        resid = np.linalg.norm(P @ psi[:, n] - np.exp(1j * theta[n]) * phi[:, n])
        if resid > THETA_SNAP * (1.0 + np.linalg.norm(phi[:, n])):
            raise NotPtSymmetric(
                f"P psi_{n} deviates from exp(i theta) phi_{n} by {resid:.3e}; "
                "P is not a parity for this Hamiltonian"
            )
    return BiorthoSystem(energies=energies, psi=psi, phi=phi, theta=theta)


def charge_conjugation(basis: BiorthoSystem, P) -> np.ndarray:
    """C = (sum_n |psi_n><psi_n|) P, satisfying C^2 = I and [C, H] = 0."""
    P = as_cmatrix(P, "P")
    if P.shape != (basis.dim, basis.dim):
        raise DimensionMismatch(
            f"P shape {P.shape} does not match basis dim {basis.dim}"
        )
    return (basis.psi @ basis.psi.conj().T) @ P


def canonical_transform(
    ham: PtHamiltonian,
    tol: float = DEFAULT_TOL,
    cond_cap: float = DEFAULT_COND_CAP,
) -> CanonicalMap:
    """Canonical map T = sqrt(V^dag V), normalized to det(T) = 1.

    Rows of V are the duals of the unit-norm right eigenvectors, so that
    ``V H V^{-1}`` is diagonal. The gauge removes the unphysical overall
    scalar of T deterministically.
    """
    _require_unbroken(ham, DEFAULT_EPS_SPEC)
    try:
        eig = linalg.eig_general(ham.H, tol)
    except NonDiagonalizable as exc:
        raise ExceptionalPoint(str(exc)) from exc

    V = np.linalg.inv(eig.right)
    T0 = linalg.mat_sqrt_psd(V.conj().T @ V, tol)
    s, W = np.linalg.eigh(T0)
    if float(s.min()) <= 0.0:
        raise ExceptionalPoint("canonical transform is singular")
    condition = float(s.max() / s.min())
    if condition > cond_cap:
        raise IllConditioned(
            f"condition {condition:.3e} exceeds cap {cond_cap:.1e} "
            "(exceptional-point proximity)"
        )
    gm = float(np.exp(np.mean(np.log(s))))
    T = T0 / gm
    T_inv = (W * (gm / s)) @ W.conj().T
    T_inv = (T_inv + T_inv.conj().T) / 2.0
    return CanonicalMap(T=T, T_inv=T_inv, condition=condition)


def hermitian_representation(
    ham: PtHamiltonian, cmap: CanonicalMap, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """h = T H T^{-1}; raises NotHermitian if the defect exceeds tol*||H||."""
    h = cmap.T @ ham.H @ cmap.T_inv
    scale = max(norm2(ham.H), 1.0)
    if norm2(h - h.conj().T) > tol * scale:
        raise NotHermitian(
            "T H T^-1 is not hermitian within tol; T does not match this H"
        )
    return h


def map_observable(O, cmap: CanonicalMap) -> np.ndarray:
    """Push an observable into the hermitian representation: o = T O T^{-1}."""
    O = as_cmatrix(O, "O")
    if O.shape != cmap.T.shape:
        raise DimensionMismatch(f"observable shape {O.shape} != {cmap.T.shape}")
    return cmap.T @ O @ cmap.T_inv


def require_density_matrix(rho, tol: float = DEFAULT_TOL, name: str = "state") -> np.ndarray:
    """Validate hermiticity, positivity, and unit trace of a density matrix."""
    rho = as_cmatrix(rho, name)
    if rho.shape[0] != rho.shape[1]:
        raise NotDensityMatrix(f"{name} must be square, got {rho.shape}")
    if norm2(rho - rho.conj().T) > tol * max(norm2(rho), 1.0):
        raise NotDensityMatrix(f"{name} is not hermitian within tol")
    if abs(complex(np.trace(rho)).real - 1.0) > max(tol, 1e-12):
        raise NotDensityMatrix(f"{name} trace {complex(np.trace(rho)):.6g} != 1")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if float(evals.min()) < -max(tol, 1e-10):
        raise NotDensityMatrix(f"{name} has negative eigenvalue {float(evals.min()):.3e}")
    return rho


def map_state_back(varrho, cmap: CanonicalMap, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pull a hermitian-representation state back: rho = T^{-1} varrho T.

    The output is the PT-representation state; it keeps the trace but is
    generally not hermitian.
    """
    varrho = require_density_matrix(varrho, tol, "varrho")
    if varrho.shape != cmap.T.shape:
        raise DimensionMismatch(f"state shape {varrho.shape} != {cmap.T.shape}")
    return cmap.T_inv @ varrho @ cmap.T
