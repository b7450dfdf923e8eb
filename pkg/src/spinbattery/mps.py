"""Matrix-product-state representation and manipulation.

A state over L spin-1/2 sites is stored as L rank-3 tensors with index order
(left bond, physical, right bond).  Physical index 0 is spin up (Z = +1),
index 1 is spin down (Z = -1).  Boundary bonds have extent 1.

Norm convention: the represented vector is ``exp(log_norm_adjust)`` times the
contraction of the site tensors.  Canonicalization keeps the center tensor at
unit Frobenius norm and pushes all scale factors into ``log_norm_adjust``, so
magnitudes never drift over long gate sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionMismatchError
from .tensor import svd_truncate

__all__ = [
    "MatrixProductState",
    "ReducedDensityMatrix",
    "CompressionResult",
    "from_product_state",
    "ghz_state",
    "overlap",
    "expect_one_site",
    "expect_two_site",
    "reduced_density_matrix",
]

RDM_SITE_CAP = 12  # dense matrices up to 2^12 = 4096


@dataclass
class ReducedDensityMatrix:
    """State of a contiguous site range after tracing out the rest.

    ``matrix`` is Hermitian, positive semidefinite and has unit trace;
    dimension is ``2 ** (stop - start)`` with the range's sites ordered
    left to right, first site slowest.
    """

    start: int
    stop: int
    matrix: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.stop - self.start


@dataclass
class CompressionResult:
    state: "MatrixProductState"
    infidelity: float
    sweeps: int


def _phase_fix_qr(m: np.ndarray):
    """QR with the diagonal of R made real non-negative (deterministic gauge)."""
    q, r = np.linalg.qr(m)
    d = np.diagonal(r).copy()
    phase = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phase, r * phase.conj()[:, None]


class MatrixProductState:
    def __init__(self, tensors, ortho_center=None, log_norm_adjust=0.0):
        tensors = [np.asarray(t, dtype=np.complex128) for t in tensors]
        if not tensors:
            raise ValueError("an MPS needs at least one site")
        for k, t in enumerate(tensors):
            if t.ndim != 3:
                raise DimensionMismatchError(f"site {k}: expected rank-3 tensor, got shape {t.shape}")
            if t.shape[1] != 2:
                raise DimensionMismatchError(f"site {k}: physical extent must be 2, got {t.shape[1]}")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise DimensionMismatchError("boundary bonds must have extent 1")
        for k in range(len(tensors) - 1):
            if tensors[k].shape[2] != tensors[k + 1].shape[0]:
                raise DimensionMismatchError(
                    f"bond mismatch between sites {k} and {k + 1}: "
                    f"{tensors[k].shape[2]} vs {tensors[k + 1].shape[0]}"
                )
        self.tensors = tensors
        self.ortho_center = ortho_center
        self.log_norm_adjust = float(log_norm_adjust)

    # -- basic structure ---------------------------------------------------

    @property
    def length(self) -> int:
        return len(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def bond_dimensions(self):
        """Interior bond extents, one entry per bond (length L - 1)."""
        return [t.shape[2] for t in self.tensors[:-1]]

    def max_bond_dimension(self) -> int:
        return max([1] + self.bond_dimensions())

    def copy(self) -> "MatrixProductState":
        out = MatrixProductState.__new__(MatrixProductState)
        out.tensors = [t.copy() for t in self.tensors]
        out.ortho_center = self.ortho_center
        out.log_norm_adjust = self.log_norm_adjust
        return out

    def norm(self) -> float:
        if self.ortho_center is not None:
            center = self.tensors[self.ortho_center]
            return math.exp(self.log_norm_adjust) * float(np.linalg.norm(center))
        return math.sqrt(abs(overlap(self, self)))

    # -- canonical form ----------------------------------------------------

    def _pull_norm(self, k: int) -> None:
        nrm = float(np.linalg.norm(self.tensors[k]))
        if nrm > 0.0:
            self.tensors[k] = self.tensors[k] / nrm
            self.log_norm_adjust += math.log(nrm)

    def _move_center_right(self) -> None:
        c = self.ortho_center
        t = self.tensors[c]
        dl, d, dr = t.shape
        q, r = _phase_fix_qr(t.reshape(dl * d, dr))
        k = q.shape[1]
        self.tensors[c] = np.ascontiguousarray(q.reshape(dl, d, k))
        self.tensors[c + 1] = np.tensordot(r, self.tensors[c + 1], axes=(1, 0))
        self.ortho_center = c + 1
        self._pull_norm(c + 1)

    def _move_center_left(self) -> None:
        c = self.ortho_center
        t = self.tensors[c]
        dl, d, dr = t.shape
        # LQ via QR of the conjugate transpose: m = l q with q rows orthonormal
        q, r = _phase_fix_qr(t.reshape(dl, d * dr).conj().T)
        k = q.shape[1]
        self.tensors[c] = np.ascontiguousarray(q.conj().T.reshape(k, d, dr))
        self.tensors[c - 1] = np.tensordot(self.tensors[c - 1], r.conj().T, axes=(2, 0))
        self.ortho_center = c - 1
        self._pull_norm(c - 1)

    def canonicalize(self, center: int) -> "MatrixProductState":
        """Bring the state to mixed-canonical form with the given center.

        Sites left of the center become left-canonical isometries, sites right
        of it right-canonical ones.  The physical state is unchanged.
        """
        if not 0 <= center < self.length:
            raise ValueError(f"center {center} out of range for {self.length} sites")
        if self.ortho_center is None:
            self.ortho_center = 0
            for _ in range(self.length - 1):
                self._move_center_right()
            # right sweep below brings the center back to the target
        while self.ortho_center < center:
            self._move_center_right()
        while self.ortho_center > center:
            self._move_center_left()
        self._pull_norm(center)
        return self

    # -- gates ---------------------------------------------------------------

    def apply_two_site_gate(self, gate, i: int, max_D: int, weight_tol: float = 0.0,
                            absorb: str = "right") -> float:
        """Apply a two-site gate on sites (i, i+1) and truncate the cut bond.

        ``gate`` may be a 4x4 matrix or a (2,2,2,2) tensor ordered
        (out_i, out_j, in_i, in_j).  Returns the relative discarded weight of
        the truncation.  The orthogonality center ends on site i+1 for
        ``absorb="right"`` and on site i for ``absorb="left"``.
        """
        if not 0 <= i < self.length - 1:
            raise ValueError(f"bond {i} out of range for {self.length} sites")
        gate = np.asarray(gate, dtype=np.complex128)
        if gate.ndim == 2:
            if gate.shape != (4, 4):
                raise DimensionMismatchError(f"two-site gate must be 4x4, got {gate.shape}")
            gate = gate.reshape(2, 2, 2, 2)
        elif gate.shape != (2, 2, 2, 2):
            raise DimensionMismatchError(f"two-site gate tensor must be (2,2,2,2), got {gate.shape}")

        if self.ortho_center not in (i, i + 1):
            # move to the nearer of the two sites the gate touches
            if self.ortho_center is not None and self.ortho_center > i + 1:
                self.canonicalize(i + 1)
            else:
                self.canonicalize(i)

        theta = np.tensordot(self.tensors[i], self.tensors[i + 1], axes=(2, 0))
        theta = np.tensordot(gate, theta, axes=([2, 3], [1, 2]))  # (si', sj', dl, dr)
        theta = theta.transpose(2, 0, 1, 3)
        dl, _, _, dr = theta.shape
        res = svd_truncate(theta.reshape(dl * 2, 2 * dr), max_D, weight_tol)
        k = res.rank
        if absorb == "right":
            self.tensors[i] = np.ascontiguousarray(res.u.reshape(dl, 2, k))
            self.tensors[i + 1] = np.ascontiguousarray((res.s[:, None] * res.v).reshape(k, 2, dr))
            self.ortho_center = i + 1
            self._pull_norm(i + 1)
        elif absorb == "left":
            self.tensors[i] = np.ascontiguousarray((res.u * res.s).reshape(dl, 2, k))
            self.tensors[i + 1] = np.ascontiguousarray(res.v.reshape(k, 2, dr))
            self.ortho_center = i
            self._pull_norm(i)
        else:
            raise ValueError(f"absorb must be 'left' or 'right', got {absorb!r}")
        return res.discarded_weight

    # -- local truncation (used as the compression starting guess) ---------

    def truncate_to(self, max_D: int, weight_tol: float = 0.0) -> float:
        """Truncate every bond to ``max_D`` by sweeping SVDs; returns total weight."""
        self.canonicalize(0)
        total = 0.0
        for i in range(self.length - 1):
            t = self.tensors[i]
            dl, d, dr = t.shape
            res = svd_truncate(t.reshape(dl * d, dr), max_D, weight_tol)
            k = res.rank
            self.tensors[i] = np.ascontiguousarray(res.u.reshape(dl, d, k))
            carry = res.s[:, None] * res.v
            self.tensors[i + 1] = np.tensordot(carry, self.tensors[i + 1], axes=(1, 0))
            self.ortho_center = i + 1
            self._pull_norm(i + 1)
            total += res.discarded_weight
        return total

    # -- dense reconstruction (small systems) --------------------------------

    def to_dense(self) -> np.ndarray:
        """Full state vector, site 0 slowest.  Guarded at 24 sites."""
        if self.length > 24:
            raise CapacityError(f"dense reconstruction capped at 24 sites, state has {self.length}")
        vec = self.tensors[0]
        for t in self.tensors[1:]:
            vec = np.tensordot(vec, t, axes=(vec.ndim - 1, 0))
        vec = vec.reshape(-1)
        return vec * math.exp(self.log_norm_adjust)


# -- constructors ------------------------------------------------------------


def from_product_state(bits) -> MatrixProductState:
    """Product state from a bit list; bit 1 is spin up (Z = +1), 0 is down."""
    bits = list(bits)
    if not bits:
        raise ValueError("bit list must be non-empty")
    tensors = []
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        t = np.zeros((1, 2, 1), dtype=np.complex128)
        t[0, 0 if b == 1 else 1, 0] = 1.0
        tensors.append(t)
    return MatrixProductState(tensors, ortho_center=0)


def ghz_state(n: int) -> MatrixProductState:
    """(|11...1> + |00...0>) / sqrt(2) with interior bond dimension 2."""
    if n < 1:
        raise ValueError(f"need at least one site, got {n}")
    if n == 1:
        t = np.full((1, 2, 1), 1.0 / math.sqrt(2.0), dtype=np.complex128)
        return MatrixProductState([t])
    first = np.zeros((1, 2, 2), dtype=np.complex128)
    first[0, 0, 0] = first[0, 1, 1] = 1.0 / math.sqrt(2.0)
    mid = np.zeros((2, 2, 2), dtype=np.complex128)
    mid[0, 0, 0] = mid[1, 1, 1] = 1.0
    last = np.zeros((2, 2, 1), dtype=np.complex128)
    last[0, 0, 0] = last[1, 1, 0] = 1.0
    return MatrixProductState([first] + [mid.copy() for _ in range(n - 2)] + [last])


# -- overlaps and expectation values ------------------------------------------


def overlap(a: MatrixProductState, b: MatrixProductState) -> complex:
    """<a|b> including the norm adjustments of both states."""
    if a.length != b.length:
        raise DimensionMismatchError(f"state lengths differ: {a.length} vs {b.length}")
    env = np.ones((1, 1), dtype=np.complex128)
    for ta, tb in zip(a.tensors, b.tensors):
        tmp = np.tensordot(env, tb, axes=(1, 0))          # (Da, s, Db')
        env = np.tensordot(ta.conj(), tmp, axes=([0, 1], [0, 1]))
    return complex(env[0, 0]) * math.exp(a.log_norm_adjust + b.log_norm_adjust)


def _window_bounds(state: MatrixProductState, lo: int, hi: int):
    c = state.ortho_center
    if c is None:
        return 0, state.length - 1
    return min(lo, c), max(hi, c)


def _windowed_expectation(state: MatrixProductState, ops: dict) -> complex:
    """<prod ops> / <psi|psi> using the canonical structure outside the window."""
    lo, hi = min(ops), max(ops)
    a, b = _window_bounds(state, lo, hi)
    dl = state.tensors[a].shape[0]
    env = np.eye(dl, dtype=np.complex128)
    denom_env = env
    for k in range(a, b + 1):
        t = state.tensors[k]
        tmp = np.tensordot(env, t, axes=(1, 0))
        if k in ops:
            op = np.asarray(ops[k], dtype=np.complex128)
            # tmp[d, s', r] = sum_s op[s', s] tmp[d, s, r]
            tmp = np.tensordot(tmp, op, axes=(1, 1)).transpose(0, 2, 1)
        env = np.tensordot(state.tensors[k].conj(), tmp, axes=([0, 1], [0, 1]))
        dtmp = np.tensordot(denom_env, t, axes=(1, 0))
        denom_env = np.tensordot(t.conj(), dtmp, axes=([0, 1], [0, 1]))
    num = np.trace(env)
    den = np.trace(denom_env)
    return complex(num / den)


def expect_one_site(state: MatrixProductState, op, i: int) -> float:
    """Expectation of a Hermitian single-site operator, normalized by the state."""
    if not 0 <= i < state.length:
        raise ValueError(f"site {i} out of range for {state.length} sites")
    return _windowed_expectation(state, {i: op}).real


def expect_two_site(state: MatrixProductState, op_a, op_b, i: int) -> complex:
    """Expectation of op_a on site i times op_b on site i+1, normalized."""
    if not 0 <= i < state.length - 1:
        raise ValueError(f"bond {i} out of range for {state.length} sites")
    return _windowed_expectation(state, {i: op_a, i + 1: op_b})


def reduced_density_matrix(state: MatrixProductState, start: int, stop: int) -> ReducedDensityMatrix:
    """Density matrix of sites [start, stop) with everything else traced out."""
    if not 0 <= start < stop <= state.length:
        raise ValueError(f"invalid site range [{start}, {stop}) for {state.length} sites")
    n = stop - start
    if n > RDM_SITE_CAP:
        raise CapacityError(
            f"reduced density matrix capped at {RDM_SITE_CAP} sites "
            f"(2^{RDM_SITE_CAP} = {2 ** RDM_SITE_CAP} dense dimension); requested {n}"
        )
    work = state.copy()
    work.canonicalize(start)
    block = work.tensors[start]
    for k in range(start + 1, stop):
        block = np.tensordot(block, work.tensors[k], axes=(block.ndim - 1, 0))
    dl = block.shape[0]
    dr = block.shape[-1]
    block = block.reshape(dl, 2 ** n, dr)
    rho = np.tensordot(block, block.conj(), axes=([0, 2], [0, 2]))
    tr = np.trace(rho).real
    if tr <= 0.0:
        raise ValueError("cannot normalize reduced density matrix of a zero state")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensityMatrix(start, stop, np.ascontiguousarray(rho))


# -- variational compression ---------------------------------------------------


def _left_env_update(env, guess_t, target_t):
    """env (Dg_l, Dt_l) -> (Dg_r, Dt_r) moving one site right."""
    tmp = np.tensordot(env, target_t, axes=(1, 0))
    return np.tensordot(guess_t.conj(), tmp, axes=([0, 1], [0, 1]))


def variational_compress(state: MatrixProductState, target_D: int,
                         max_sweeps: int = 4, convergence_tol: float = 1e-12) -> CompressionResult:
    """Best bond-dimension-``target_D`` approximation by one-site sweeping.

    The starting guess is the SVD-truncated state, so the reported infidelity
    1 - |<compressed|original>|^2 / (norms) never exceeds the plain SVD value.
    States already within ``target_D`` are returned unchanged.
    """
    if target_D < 1:
        raise ValueError(f"target_D must be >= 1, got {target_D}")
    if state.max_bond_dimension() <= target_D:
        return CompressionResult(state, 0.0, 0)

    target = state.copy()
    target.canonicalize(0)
    mu = target.log_norm_adjust
    target.log_norm_adjust = 0.0  # unit-norm raw tensors from here on

    guess = target.copy()
    guess.truncate_to(target_D)
    guess.canonicalize(guess.length - 1)
    guess.log_norm_adjust = 0.0
    L = guess.length

    def fidelity_and_envs_left():
        """Left environments of <guess|target> for all sites; returns list."""
        envs = [np.ones((1, 1), dtype=np.complex128)]
        env = envs[0]
        for k in range(L - 1):
            env = _left_env_update(env, guess.tensors[k], target.tensors[k])
            envs.append(env)
        return envs

    # initial fidelity of the SVD guess
    env = np.ones((1, 1), dtype=np.complex128)
    for k in range(L):
        env = _left_env_update(env, guess.tensors[k], target.tensors[k])
    ov = complex(env[0, 0])
    gnorm = float(np.linalg.norm(guess.tensors[guess.ortho_center]))
    prev_fid = abs(ov) ** 2 / gnorm ** 2
    best_fid = prev_fid
    sweeps_used = 0
    final_scale = abs(ov) / gnorm if gnorm > 0 else 0.0

    for sweep in range(max_sweeps):
        # right-to-left half sweep
        left_envs = fidelity_and_envs_left()
        renv = np.ones((1, 1), dtype=np.complex128)
        for k in range(L - 1, 0, -1):
            e = np.tensordot(target.tensors[k], renv, axes=(2, 0))       # (Dt, s, Dg)
            e = np.tensordot(left_envs[k], e, axes=(1, 0))               # (Dg_l, s, Dg_r)
            nrm = float(np.linalg.norm(e))
            guess.tensors[k] = e / nrm if nrm > 0 else e
            guess.ortho_center = k
            guess._move_center_left()
            guess.log_norm_adjust = 0.0
            renv = _right_env_update_raw(renv, guess.tensors[k], target.tensors[k])
        # left-to-right half sweep
        right_envs = [None] * (L + 1)
        right_envs[L] = np.ones((1, 1), dtype=np.complex128)
        env = right_envs[L]
        for k in range(L - 1, 0, -1):
            env = _right_env_update_raw(env, guess.tensors[k], target.tensors[k])
            right_envs[k] = env
        lenv = np.ones((1, 1), dtype=np.complex128)
        fid = best_fid
        for k in range(L - 1):
            e = np.tensordot(lenv, target.tensors[k], axes=(1, 0))        # (Dg_l, s, Dt_r)
            e = np.tensordot(e, right_envs[k + 1], axes=(2, 0))           # (Dg_l, s, Dg_r)
            nrm = float(np.linalg.norm(e))
            guess.tensors[k] = e / nrm if nrm > 0 else e
            guess.ortho_center = k
            guess._move_center_right()
            guess.log_norm_adjust = 0.0
            lenv = _left_env_update(lenv, guess.tensors[k], target.tensors[k])
        # final site: overlap = norm of the unnormalized optimal tensor
        e = np.tensordot(lenv, target.tensors[L - 1], axes=(1, 0))
        e = np.tensordot(e, right_envs[L], axes=(2, 0))
        nrm = float(np.linalg.norm(e))
        guess.tensors[L - 1] = e / nrm if nrm > 0 else e
        guess.ortho_center = L - 1
        fid = nrm ** 2  # |<g|t>|^2 with unit-norm guess and unit-norm target
        final_scale = nrm
        sweeps_used = sweep + 1
        best_fid = max(best_fid, fid)
        if fid - prev_fid < convergence_tol:
            break
        prev_fid = fid

    guess.log_norm_adjust = mu + (math.log(final_scale) if final_scale > 0 else 0.0)
    infidelity = max(0.0, 1.0 - best_fid)
    return CompressionResult(guess, infidelity, sweeps_used)


def _right_env_update_raw(env, guess_t, target_t):
    """env (Dt_r, Dg_r) -> (Dt_l, Dg_l) moving one site left."""
    tmp = np.tensordot(target_t, env, axes=(2, 0))                  # (Dt_l, s, Dg_r)
    return np.tensordot(tmp, guess_t.conj(), axes=([1, 2], [1, 2]))
