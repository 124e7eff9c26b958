"""Composite system-environment dynamics and Kraus channel machinery.

The composite Hamiltonian ``h = h_S (x) I + I (x) H_B + V_S (x) V_B`` is
assembled in the hermitian representation, evolved unitarily, and reduced
by the partial trace. Kraus operators are extracted from the propagator in
the eigenbasis of the initial environment state; the PT variant conjugates
each Kraus pair with the canonical map, giving left/right families
``L_i = T^{-1} K_i T``, ``R_i = T^{-1} K_i^dag T`` with
``sum_i L_i R_i = I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NotDensityMatrix, NotHermitian
from .linalg import DEFAULT_TOL, as_cmatrix, norm2
from .pt_core import CanonicalMap, require_density_matrix

#: Eigenvalue weights of Omega_B at or below this are dropped from the
#: Kraus family; the induced completeness defect is reported, not hidden.
DEFAULT_WEIGHT_CUT = 1e-12


@dataclass(frozen=True, eq=False)
class CompositeModel:
    """Hermitian-representation composite with a product-form interaction."""

    h_S: np.ndarray
    H_B: np.ndarray
    h_I: np.ndarray
    dim_S: int
    dim_B: int
    dephasing: bool

    @property
    def h_total(self) -> np.ndarray:
        d_S, d_B = self.dim_S, self.dim_B
        return (
            linalg.kron(self.h_S, np.eye(d_B))
            + linalg.kron(np.eye(d_S), self.H_B)
            + self.h_I
        )


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Operator-sum channel, either hermitian {K_i} or PT {(L_i, R_i)}.

    ``completeness_defect`` is the norm of ``sum K_i^dag K_i - I`` (or of
    ``sum L_i R_i - I``) as built, including any weight-cut truncation.
    """

    kind: str  # "hermitian" | "pt"
    ops: tuple
    dim_S: int
    completeness_defect: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hermitian", "pt"):
            raise ValueError(f"unknown channel kind {self.kind!r}")

    def normalization(self) -> np.ndarray:
        """sum K_i^dag K_i for hermitian kind, sum L_i R_i for PT kind."""
        acc = np.zeros((self.dim_S, self.dim_S), dtype=complex)
        if self.kind == "hermitian":
            for K in self.ops:
                acc += K.conj().T @ K
        else:
            for L, R in self.ops:
                acc += L @ R
        return acc


def _require_hermitian(m: np.ndarray, name: str, tol: float) -> np.ndarray:
    if not linalg.is_hermitian(m, tol):
        raise NotHermitian(f"{name} must be hermitian within tol")
    return m


def build_composite(h_S, H_B, V_S, V_B, tol: float = DEFAULT_TOL) -> CompositeModel:
    """Assemble the composite model and detect the pure-dephasing structure.

    The dephasing flag is set when ``[h_S (x) I, h_I] = 0`` within tol, the
    condition under which populations in the ``h_S`` eigenbasis and the
    system energy are conserved.
    """
    h_S = _require_hermitian(as_cmatrix(h_S, "h_S"), "h_S", tol)
    H_B = _require_hermitian(as_cmatrix(H_B, "H_B"), "H_B", tol)
    V_S = _require_hermitian(as_cmatrix(V_S, "V_S"), "V_S", tol)
    V_B = _require_hermitian(as_cmatrix(V_B, "V_B"), "V_B", tol)
    if h_S.shape != V_S.shape:
        raise DimensionMismatch(f"h_S {h_S.shape} and V_S {V_S.shape} differ")
    if H_B.shape != V_B.shape:
        raise DimensionMismatch(f"H_B {H_B.shape} and V_B {V_B.shape} differ")
    dim_S, dim_B = h_S.shape[0], H_B.shape[0]
    h_I = linalg.kron(V_S, V_B)
    hs_full = linalg.kron(h_S, np.eye(dim_B))
    comm = hs_full @ h_I - h_I @ hs_full
    scale = max(norm2(hs_full) * max(norm2(h_I), 1.0), 1.0)
    dephasing = norm2(comm) <= tol * scale
    return CompositeModel(
        h_S=h_S, H_B=H_B, h_I=h_I, dim_S=dim_S, dim_B=dim_B, dephasing=dephasing
    )


def propagator(model: CompositeModel, t: float) -> np.ndarray:
    """U(t) = exp(-i h t) on the composite space."""
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return linalg.mat_exp(-1j * t * model.h_total)


def reduced_state(model: CompositeModel, varrho0_S, Omega_B, t: float) -> np.ndarray:
    """Evolve the uncorrelated initial state and trace out the environment."""
    varrho0_S = require_density_matrix(varrho0_S, name="varrho0_S")
    Omega_B = require_density_matrix(Omega_B, name="Omega_B")
    if varrho0_S.shape[0] != model.dim_S or Omega_B.shape[0] != model.dim_B:
        raise DimensionMismatch("state dimensions do not match the model")
    U = propagator(model, t)
    rho = U @ linalg.kron(varrho0_S, Omega_B) @ U.conj().T
    return linalg.partial_trace_env(rho, model.dim_S, model.dim_B)


def kraus_extract(
    model: CompositeModel,
    Omega_B,
    t: float,
    weight_cut: float = DEFAULT_WEIGHT_CUT,
) -> KrausChannel:
    """Kraus family K_(beta,alpha) = sqrt(p_alpha) <beta|U(t)|alpha>.

    |alpha>, |beta> run over the eigenbasis of Omega_B; source states alpha
    with p_alpha <= weight_cut are dropped, as are operators of negligible
    weight ||K||_F^2 <= weight_cut (for a product evolution this leaves the
    single unitary operator). The resulting completeness defect is recorded
    on the channel. Operators are ordered by descending p_alpha, then
    ascending beta.
    """
    Omega_B = require_density_matrix(Omega_B, name="Omega_B")
    if Omega_B.shape[0] != model.dim_B:
        raise DimensionMismatch("Omega_B dimension does not match the model")
    p, states = np.linalg.eigh((Omega_B + Omega_B.conj().T) / 2.0)
    order = np.argsort(-p, kind="stable")
    p, states = p[order], states[:, order]

    U = propagator(model, t)
    # U as a (s, b, s', b') tensor; contract bath bra/ket vectors.
    Ut = U.reshape(model.dim_S, model.dim_B, model.dim_S, model.dim_B)

    ops = []
    for ia in range(model.dim_B):
        if p[ia] <= weight_cut:
            continue
        ket = states[:, ia]
        block = np.einsum("sbtc,c->sbt", Ut, ket)
        for ib in range(model.dim_B):
            bra = states[:, ib].conj()
            K = np.sqrt(p[ia]) * np.einsum("b,sbt->st", bra, block)
            if float(np.sum(np.abs(K) ** 2)) > weight_cut:
                ops.append(K)

    acc = np.zeros((model.dim_S, model.dim_S), dtype=complex)
    for K in ops:
        acc += K.conj().T @ K
    defect = norm2(acc - np.eye(model.dim_S))
    return KrausChannel(
        kind="hermitian", ops=tuple(ops), dim_S=model.dim_S, completeness_defect=defect
    )


def pt_kraus(channel: KrausChannel, cmap: CanonicalMap) -> KrausChannel:
    """Conjugate a hermitian Kraus family into the PT left/right family."""
    if channel.kind != "hermitian":
        raise ValueError("pt_kraus expects a hermitian-kind channel")
    if cmap.T.shape[0] != channel.dim_S:
        raise DimensionMismatch("canonical map dimension does not match channel")
    T, T_inv = cmap.T, cmap.T_inv
    pairs = tuple(
        (T_inv @ K @ T, T_inv @ K.conj().T @ T) for K in channel.ops
    )
    acc = np.zeros((channel.dim_S, channel.dim_S), dtype=complex)
    for L, R in pairs:
        acc += L @ R
    defect = norm2(acc - np.eye(channel.dim_S))
    return KrausChannel(
        kind="pt", ops=pairs, dim_S=channel.dim_S, completeness_defect=defect
    )


def apply_channel(channel: KrausChannel, state) -> np.ndarray:
    """Apply the operator sum: sum K rho K^dag, or sum L rho R for PT kind."""
    state = as_cmatrix(state, "state")
    if state.shape != (channel.dim_S, channel.dim_S):
        raise DimensionMismatch(
            f"state shape {state.shape} != channel dim {channel.dim_S}"
        )
    out = np.zeros_like(state)
    if channel.kind == "hermitian":
        for K in channel.ops:
            out += K @ state @ K.conj().T
    else:
        for L, R in channel.ops:
            out += L @ state @ R
    return out


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """Choi matrix sum_k |K_k>><<K_k| of a hermitian-kind channel.

    Column-stacked vectorization; complete positivity is equivalent to this
    matrix being PSD.
    """
    if channel.kind != "hermitian":
        raise ValueError("Choi test applies to the hermitian representation")
    d = channel.dim_S
    choi = np.zeros((d * d, d * d), dtype=complex)
    for K in channel.ops:
        v = K.T.reshape(-1, 1)
        choi += v @ v.conj().T
    return choi


def is_completely_positive(channel: KrausChannel, tol: float = 1e-9) -> bool:
    """Choi-eigenvalue test: all eigenvalues >= -tol."""
    evals = np.linalg.eigvalsh(choi_matrix(channel))
    return bool(float(evals.min()) >= -tol)
