"""Variational ground-state search on the isolated XXZ chain.

Two-site DMRG sweeps against the XXZ matrix product operator.  The seed is
the Neel product state, which sits in the zero-magnetization sector; the
Hamiltonian conserves the sector, so sweeps stay inside it up to numerical
noise (verified, not enforced).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SectorError
from .model import PAULI_X, PAULI_Y, PAULI_Z, IsolatedChainSpec
from .mps import MatrixProductState, expect_one_site, from_product_state
from .tensor import svd_truncate

__all__ = ["GroundStateResult", "dmrg_ground_state", "xxz_mpo", "mpo_expectation"]


@dataclass
class GroundStateResult:
    state: MatrixProductState
    energy: float
    variance: float
    sweeps_used: int
    sweep_energies: list = field(default_factory=list)


def xxz_mpo(spec: IsolatedChainSpec) -> list[np.ndarray]:
    """MPO tensors (wl, wr, s', s) for H = sum J(XX+YY) + Jz ZZ."""
    eye = np.eye(2, dtype=np.complex128)
    zero = np.zeros((2, 2), dtype=np.complex128)
    j, jz = spec.J, spec.Jz
    w = np.array([
        [eye, zero, zero, zero, zero],
        [PAULI_X, zero, zero, zero, zero],
        [PAULI_Y, zero, zero, zero, zero],
        [PAULI_Z, zero, zero, zero, zero],
        [zero, j * PAULI_X, j * PAULI_Y, jz * PAULI_Z, eye],
    ])  # (wl, wr, s', s)
    first = w[-1:, :, :, :]
    last = w[:, :1, :, :]
    return [first] + [w] * (spec.N - 2) + [last]


def _left_mpo_env(env, bra_t, w, ket_t):
    """env (bl, wl, kl) -> (br, wr, kr)."""
    tmp = np.tensordot(env, ket_t, axes=(2, 0))           # (bl, wl, s, kr)
    tmp = np.tensordot(tmp, w, axes=([1, 2], [0, 3]))     # (bl, kr, wr, s')
    out = np.tensordot(bra_t.conj(), tmp, axes=([0, 1], [0, 3]))  # (br, kr, wr)
    return out.transpose(0, 2, 1)


def _right_mpo_env(env, bra_t, w, ket_t):
    """env (br, wr, kr) -> (bl, wl, kl)."""
    tmp = np.tensordot(ket_t, env, axes=(2, 2))           # (kl, s, br, wr)
    tmp = np.tensordot(w, tmp, axes=([1, 3], [3, 1]))     # (wl, s', kl, br)
    return np.tensordot(bra_t.conj(), tmp, axes=([1, 2], [1, 3]))  # (bl, wl, kl)


def mpo_expectation(state: MatrixProductState, mpo) -> float:
    """<psi|W|psi> / <psi|psi> for a normalized-tensor MPS."""
    env = np.ones((1, 1, 1), dtype=np.complex128)
    nrm = np.ones((1, 1), dtype=np.complex128)
    for t, w in zip(state.tensors, mpo):
        env = _left_mpo_env(env, t, w, t)
        tmp = np.tensordot(nrm, t, axes=(1, 0))
        nrm = np.tensordot(t.conj(), tmp, axes=([0, 1], [0, 1]))
    return float(env[0, 0, 0].real / nrm[0, 0].real)


def _apply_effective(left, w1, w2, right, block):
    """Two-site effective Hamiltonian action on block (bl, s1, s2, br)."""
    tmp = np.tensordot(left, block, axes=(2, 0))          # (b_l, wl, s1, s2, br)
    tmp = np.tensordot(tmp, w1, axes=([1, 2], [0, 3]))    # (b_l, s2, br, w, s1')
    tmp = np.tensordot(tmp, w2, axes=([3, 1], [0, 3]))    # (b_l, br, s1', w', s2')
    tmp = np.tensordot(tmp, right, axes=([1, 3], [2, 1])) # (b_l, s1', s2', b_r)
    return tmp


def _lanczos_smallest(apply_op, v0, iters: int, restarts: int, tol: float):
    """Deterministic restarted Lanczos for the smallest eigenpair."""
    v = v0 / np.linalg.norm(v0)
    prev = np.inf
    energy = np.inf
    for _ in range(restarts):
        vecs = [v]
        alphas: list[float] = []
        betas: list[float] = []
        for m in range(iters):
            w = apply_op(vecs[-1])
            a = float(np.vdot(vecs[-1], w).real)
            alphas.append(a)
            w = w - a * vecs[-1]
            if len(vecs) > 1:
                w = w - betas[-1] * vecs[-2]
            for u in vecs:
                w = w - np.vdot(u, w) * u
            b = float(np.linalg.norm(w))
            if b < 1e-13 or m == iters - 1:
                break
            betas.append(b)
            vecs.append(w / b)
        evals, evecs = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
        energy = float(evals[0])
        v = np.tensordot(evecs[:, 0], np.asarray(vecs), axes=(0, 0))
        v = v / np.linalg.norm(v)
        if abs(energy - prev) < tol:
            break
        prev = energy
    return v, energy


def dmrg_ground_state(spec: IsolatedChainSpec, max_D: int = 64, max_sweeps: int = 16,
                      energy_tol: float = 1e-10) -> GroundStateResult:
    """Two-site DMRG for the ground state of the isolated XXZ chain.

    Requires even N so the zero-magnetization sector is reachable from the
    Neel seed.  Sweeps stop once the energy improves by less than
    ``energy_tol``; non-convergence shows up as sweeps_used == max_sweeps.
    """
    if spec.N % 2 != 0:
        raise ValueError(f"need an even chain length for the zero-magnetization sector, got N={spec.N}")
    n = spec.N
    mpo = xxz_mpo(spec)
    psi = from_product_state([1 if i % 2 == 0 else 0 for i in range(n)])
    psi.canonicalize(0)

    # environment stacks: lenvs[k] covers sites < k, renvs[k] covers sites > k
    lenvs = [np.ones((1, 1, 1), dtype=np.complex128) for _ in range(n)]
    renvs = [np.ones((1, 1, 1), dtype=np.complex128) for _ in range(n)]
    for k in range(n - 1, 1, -1):
        renvs[k - 1] = _right_mpo_env(renvs[k], psi.tensors[k], mpo[k], psi.tensors[k])

    energy = mpo_expectation(psi, mpo)
    sweep_energies: list[float] = []
    sweeps_used = 0

    for sweep in range(max_sweeps):
        # left-to-right over bonds (i, i+1), then right-to-left
        for direction in (1, -1):
            bonds = range(n - 1) if direction == 1 else range(n - 2, -1, -1)
            for i in bonds:
                left = lenvs[i]
                right = renvs[i + 1]
                block = np.tensordot(psi.tensors[i], psi.tensors[i + 1], axes=(2, 0))
                shape = block.shape
                apply_op = lambda x: _apply_effective(
                    left, mpo[i], mpo[i + 1], right, x.reshape(shape)).reshape(-1)
                vec, energy = _lanczos_smallest(
                    apply_op, block.reshape(-1), iters=24, restarts=6,
                    tol=max(energy_tol * 1e-2, 1e-14))
                block = vec.reshape(shape)
                dl, _, _, dr = shape
                res = svd_truncate(block.reshape(dl * 2, 2 * dr), max_D, 1e-14)
                k = res.rank
                if direction == 1:
                    psi.tensors[i] = np.ascontiguousarray(res.u.reshape(dl, 2, k))
                    carry = (res.s[:, None] * res.v).reshape(k, 2, dr)
                    psi.tensors[i + 1] = carry / np.linalg.norm(carry)
                    psi.ortho_center = i + 1
                    lenvs[i + 1] = _left_mpo_env(lenvs[i], psi.tensors[i], mpo[i], psi.tensors[i])
                else:
                    psi.tensors[i + 1] = np.ascontiguousarray(res.v.reshape(k, 2, dr))
                    carry = (res.u * res.s).reshape(dl, 2, k)
                    psi.tensors[i] = carry / np.linalg.norm(carry)
                    psi.ortho_center = i
                    renvs[i] = _right_mpo_env(renvs[i + 1], psi.tensors[i + 1], mpo[i + 1], psi.tensors[i + 1])
        sweeps_used = sweep + 1
        sweep_energies.append(energy)
        if sweep > 0 and abs(sweep_energies[-2] - energy) < energy_tol:
            break

    psi.log_norm_adjust = 0.0
    psi.canonicalize(0)
    psi.log_norm_adjust = 0.0  # ground state is returned normalized

    total_z = sum(expect_one_site(psi, PAULI_Z, i) for i in range(n))
    if abs(total_z) >= 1e-6:
        raise SectorError(
            f"sweeps left the zero-magnetization sector: <sum Z> = {total_z:.3e}; "
            "try a different seed state"
        )

    energy = mpo_expectation(psi, mpo)
    h2 = mpo_square_expectation(psi, mpo)
    variance = h2 - energy * energy
    return GroundStateResult(psi, energy, variance, sweeps_used, sweep_energies)


def mpo_square_expectation(state: MatrixProductState, mpo) -> float:
    """<psi|W^2|psi> / <psi|psi> via a double-MPO transfer contraction."""
    env = np.ones((1, 1, 1, 1), dtype=np.complex128)
    nrm = np.ones((1, 1), dtype=np.complex128)
    for t, w in zip(state.tensors, mpo):
        tmp = np.tensordot(env, t, axes=(3, 0))                   # (b, w1, w2, s, k)
        tmp = np.tensordot(tmp, w, axes=([2, 3], [0, 3]))         # (b, w1, k, w2', s')
        tmp = np.tensordot(tmp, w, axes=([1, 4], [0, 3]))         # (b, k, w2', w1', s'')
        env = np.tensordot(t.conj(), tmp, axes=([0, 1], [0, 4]))  # (b', w1', w2'... )
        env = env.transpose(0, 3, 2, 1)
        tmp2 = np.tensordot(nrm, t, axes=(1, 0))
        nrm = np.tensordot(t.conj(), tmp2, axes=([0, 1], [0, 1]))
    return float(env[0, 0, 0, 0].real / nrm[0, 0].real)
