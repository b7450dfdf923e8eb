"""Brute-force ground truth on small chains: exact states, evolution, observables.

States are full vectors of length 2^L with site 0 slowest (the reshape to
[2]*L puts site i on axis i).  The Hamiltonian is never stored as a matrix
for evolution; bond terms act on reshaped views, which keeps L <= 24 in
reach.  Dense matrices are only built for small ground-state solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapacityError, DecompositionError
from .model import PAULI_X, PAULI_Y, bond_hamiltonian
from .mps import MatrixProductState, ReducedDensityMatrix
from .record import TrajectoryRecord

__all__ = [
    "DenseState",
    "dense_from_bits",
    "dense_from_mps",
    "dense_ghz",
    "apply_two_site_op",
    "apply_hamiltonian",
    "dense_hamiltonian",
    "apply_schedule",
    "exact_evolve",
    "exact_ground_state",
    "exact_rdm",
    "z_profile",
    "current_profile",
    "total_magnetization",
    "energy_expectation",
]

SPARSE_SITE_CAP = 24
DENSE_SITE_CAP = 14

_CURRENT_OP = np.kron(PAULI_X, PAULI_Y) - np.kron(PAULI_Y, PAULI_X)


@dataclass
class DenseState:
    """Full state vector over L spin-1/2 sites."""

    amplitudes: np.ndarray
    L: int

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** self.L,):
            raise ValueError(
                f"amplitude vector has length {self.amplitudes.shape}, expected 2^{self.L}"
            )

    def copy(self) -> "DenseState":
        return DenseState(self.amplitudes.copy(), self.L)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _check_cap(L: int):
    if L > SPARSE_SITE_CAP:
        raise CapacityError(f"exact methods are capped at {SPARSE_SITE_CAP} sites, got {L}")


def dense_from_bits(bits) -> DenseState:
    bits = list(bits)
    L = len(bits)
    _check_cap(L)
    idx = 0
    for b in bits:
        idx = 2 * idx + (0 if b == 1 else 1)
    amp = np.zeros(2 ** L, dtype=np.complex128)
    amp[idx] = 1.0
    return DenseState(amp, L)


def dense_from_mps(state: MatrixProductState) -> DenseState:
    _check_cap(state.length)
    return DenseState(state.to_dense(), state.length)


def dense_ghz(n: int) -> DenseState:
    _check_cap(n)
    amp = np.zeros(2 ** n, dtype=np.complex128)
    amp[0] = amp[-1] = 1.0 / math.sqrt(2.0)
    return DenseState(amp, n)


# -- operator application ------------------------------------------------------


def apply_two_site_op(op4: np.ndarray, k: int, state: DenseState) -> DenseState:
    """Apply a 4x4 operator to sites (k, k+1)."""
    L = state.L
    left = 2 ** k
    right = 2 ** (L - k - 2)
    v = state.amplitudes.reshape(left, 4, right)
    out = np.einsum("ab,ibj->iaj", op4, v, optimize=True)
    return DenseState(np.ascontiguousarray(out.reshape(-1)), L)


def apply_hamiltonian(spec, amplitudes: np.ndarray) -> np.ndarray:
    """H v via per-bond action; spec provides bond_parameters."""
    L = spec.total_length
    out = np.zeros_like(amplitudes)
    for k in range(spec.n_bonds()):
        h = bond_hamiltonian(spec, k)
        left = 2 ** k
        right = 2 ** (L - k - 2)
        v = amplitudes.reshape(left, 4, right)
        out += np.einsum("ab,ibj->iaj", h, v, optimize=True).reshape(-1)
    return out


def dense_hamiltonian(spec) -> np.ndarray:
    L = spec.total_length
    if L > DENSE_SITE_CAP:
        raise CapacityError(f"dense Hamiltonian capped at {DENSE_SITE_CAP} sites, got {L}")
    dim = 2 ** L
    h_full = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(spec.n_bonds()):
        h = bond_hamiltonian(spec, k)
        h_full += np.kron(np.kron(np.eye(2 ** k), h), np.eye(2 ** (L - k - 2)))
    return h_full


def apply_schedule(schedule, state: DenseState) -> DenseState:
    """Apply one Trotter step exactly (gate by gate) to a dense state."""
    for layer in schedule.layers:
        for k, g in zip(layer.bonds, layer.gates):
            state = apply_two_site_op(g, k, state)
    return state


# -- observables ---------------------------------------------------------------


def z_profile(state: DenseState) -> np.ndarray:
    L = state.L
    p = np.abs(state.amplitudes) ** 2
    nrm = p.sum()
    z = np.empty(L)
    for i in range(L):
        marg = p.reshape(2 ** i, 2, 2 ** (L - i - 1)).sum(axis=(0, 2))
        z[i] = (marg[0] - marg[1]) / nrm
    return z


def _bond_expectation(op4: np.ndarray, k: int, state: DenseState) -> complex:
    applied = apply_two_site_op(op4, k, state)
    return complex(np.vdot(state.amplitudes, applied.amplitudes) / state.norm() ** 2)


def current_profile(state: DenseState, spec) -> np.ndarray:
    """Q_k = 2 J_k <X_k Y_{k+1} - Y_k X_{k+1}> on every bond."""
    q = np.empty(spec.n_bonds())
    for k in range(spec.n_bonds()):
        j, _ = spec.bond_parameters(k)
        q[k] = 2.0 * j * _bond_expectation(_CURRENT_OP, k, state).real
    return q


def total_magnetization(state: DenseState) -> float:
    return float(z_profile(state).sum())


def energy_expectation(spec, state: DenseState) -> float:
    hv = apply_hamiltonian(spec, state.amplitudes)
    return float(np.vdot(state.amplitudes, hv).real / state.norm() ** 2)


# -- Krylov propagation --------------------------------------------------------


def _lanczos_expm_apply(apply_h, v: np.ndarray, tau: float, tol: float, max_m: int):
    """exp(-i tau H) v by a Lanczos subspace; returns None if not converged."""
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return v.copy()
    vecs = [v / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    prev_c = None
    for m in range(1, max_m + 1):
        w = apply_h(vecs[-1])
        a = float(np.vdot(vecs[-1], w).real)
        alphas.append(a)
        w = w - a * vecs[-1]
        if len(vecs) > 1:
            w = w - betas[-1] * vecs[-2]
        # full reorthogonalization keeps the basis clean over long steps
        for u in vecs:
            w = w - np.vdot(u, w) * u
        b = float(np.linalg.norm(w))
        evals, evecs = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
        c = evecs @ (np.exp(-1j * tau * evals) * evecs[0].conj()) * beta0
        if prev_c is not None:
            diff = np.linalg.norm(c[:-1] - prev_c) + abs(c[-1])
            if diff < tol or b < 1e-14:
                return np.tensordot(np.asarray(c), np.asarray(vecs), axes=(0, 0))
        if b < 1e-14:  # happy breakdown on the first step: subspace is exact
            return np.tensordot(np.asarray(c), np.asarray(vecs), axes=(0, 0))
        prev_c = c
        if m < max_m:
            betas.append(b)
            vecs.append(w / b)
    return None


def krylov_propagate(spec, state: DenseState, tau: float, tol: float = 1e-10,
                     max_m: int = 64, _depth: int = 0) -> DenseState:
    """Advance a dense state by tau, halving the interval on slow convergence."""
    if tau == 0.0:
        return state.copy()
    if _depth > 24:
        raise DecompositionError("Krylov propagation failed to converge even after interval halving")
    apply_h = lambda x: apply_hamiltonian(spec, x)
    result = _lanczos_expm_apply(apply_h, state.amplitudes, tau, tol, max_m)
    if result is None:
        half = krylov_propagate(spec, state, tau / 2.0, tol, max_m, _depth + 1)
        return krylov_propagate(spec, half, tau / 2.0, tol, max_m, _depth + 1)
    return DenseState(result, state.L)


# -- the oracle entry points ---------------------------------------------------


def exact_evolve(spec, initial: DenseState, times, tol: float = 1e-10) -> TrajectoryRecord:
    """Exact evolution recorded on the given time grid (must start at >= 0)."""
    _check_cap(spec.total_length)
    if initial.L != spec.total_length:
        raise ValueError(f"state has {initial.L} sites, spec expects {spec.total_length}")
    times = np.asarray(times, dtype=float)
    junction_bond = getattr(spec, "left_junction_bond", 0)
    state = initial.copy()
    t_now = 0.0
    rows_z, rows_q, junction, total_z = [], [], [], []
    for t in times:
        state = krylov_propagate(spec, state, t - t_now, tol)
        t_now = float(t)
        z = z_profile(state)
        q = current_profile(state, spec)
        rows_z.append(z)
        rows_q.append(q)
        junction.append(q[junction_bond])
        total_z.append(z.sum())
    zeros = np.zeros(times.shape[0])
    return TrajectoryRecord.from_rows(
        times, rows_z, rows_q, junction,
        max_d=zeros.astype(int), discarded=zeros, total_z=total_z, budget=zeros,
        metadata={
            "engine": "oracle",
            "junction_bond": junction_bond,
            "total_magnetization_t0": total_z[0] if total_z else 0.0,
        },
    )


def _lanczos_ground(apply_h, v0: np.ndarray, iters: int = 40, restarts: int = 60,
                    tol: float = 1e-13):
    """Restarted Lanczos for the smallest eigenpair; deterministic in v0."""
    v = v0 / np.linalg.norm(v0)
    prev_e = np.inf
    for _ in range(restarts):
        vecs = [v]
        alphas: list[float] = []
        betas: list[float] = []
        for m in range(iters):
            w = apply_h(vecs[-1])
            a = float(np.vdot(vecs[-1], w).real)
            alphas.append(a)
            w = w - a * vecs[-1]
            if len(vecs) > 1:
                w = w - betas[-1] * vecs[-2]
            for u in vecs:
                w = w - np.vdot(u, w) * u
            b = float(np.linalg.norm(w))
            if b < 1e-14:
                break
            if m < iters - 1:
                betas.append(b)
                vecs.append(w / b)
        evals, evecs = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
        v = np.tensordot(evecs[:, 0], np.asarray(vecs), axes=(0, 0))
        v = v / np.linalg.norm(v)
        if abs(evals[0] - prev_e) < tol:
            return v, float(evals[0])
        prev_e = evals[0]
    return v, float(prev_e)


def exact_ground_state(spec) -> tuple[DenseState, float]:
    """Smallest eigenpair of the chain Hamiltonian (dense below 2^12)."""
    L = spec.total_length
    if L > DENSE_SITE_CAP:
        raise CapacityError(f"exact ground states are capped at {DENSE_SITE_CAP} sites, got {L}")
    dim = 2 ** L
    if dim <= 4096:
        h = dense_hamiltonian(spec)
        evals, evecs = np.linalg.eigh(h)
        vec = np.ascontiguousarray(evecs[:, 0])
        return DenseState(vec, L), float(evals[0])
    # deterministic Neel-like start vector lies in the zero-magnetization sector
    bits = [1 if i % 2 == 0 else 0 for i in range(L)]
    v0 = dense_from_bits(bits).amplitudes
    vec, energy = _lanczos_ground(lambda x: apply_hamiltonian(spec, x), v0)
    return DenseState(vec, L), energy


def exact_rdm(state: DenseState, start: int, stop: int) -> ReducedDensityMatrix:
    """Dense partial trace over everything outside [start, stop)."""
    n = stop - start
    if not 0 <= start < stop <= state.L:
        raise ValueError(f"invalid site range [{start}, {stop}) for {state.L} sites")
    if n > 12:
        raise CapacityError(f"reduced density matrix capped at 12 sites, requested {n}")
    left = 2 ** start
    mid = 2 ** n
    right = 2 ** (state.L - stop)
    v = state.amplitudes.reshape(left, mid, right)
    rho = np.tensordot(v, v.conj(), axes=([0, 2], [0, 2]))
    rho = rho / np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensityMatrix(start, stop, np.ascontiguousarray(rho))
