"""Dense complex tensor algebra: contractions, truncated SVD, gate exponentials.

Tensors are plain ``numpy.ndarray`` objects of dtype complex128 in C (row-major)
order, last index fastest.  Every public operation returns a fresh array in
that layout; checkpoint bit-exactness depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DecompositionError, DimensionMismatchError

__all__ = [
    "contract",
    "svd_truncate",
    "hermitian_gate_exponential",
    "TruncatedSVD",
    "as_tensor",
]


def as_tensor(a) -> np.ndarray:
    """Coerce input to a C-contiguous complex128 array."""
    return np.ascontiguousarray(a, dtype=np.complex128)


def contract(a: np.ndarray, b: np.ndarray, pairs) -> np.ndarray:
    """Contract ``a`` with ``b`` over the given ``(axis_of_a, axis_of_b)`` pairs.

    The result carries the unpaired indices of ``a`` (in order) followed by the
    unpaired indices of ``b``.  An empty pair list is the outer product.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    pairs = list(pairs)
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise ValueError(f"contraction pairs repeat an index: {pairs}")
    for ia, ib in pairs:
        if not (-a.ndim <= ia < a.ndim) or not (-b.ndim <= ib < b.ndim):
            raise ValueError(f"contraction axis out of range for pair ({ia}, {ib})")
        if a.shape[ia] != b.shape[ib]:
            raise DimensionMismatchError(
                f"cannot contract axis {ia} (extent {a.shape[ia]}) of shape "
                f"{a.shape} with axis {ib} (extent {b.shape[ib]}) of shape {b.shape}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


@dataclass
class TruncatedSVD:
    """Result of a rank-truncated singular value decomposition.

    ``u @ diag(s) @ v`` reconstructs the input up to the discarded part;
    ``discarded_weight`` is the relative squared-norm loss
    ``sum(dropped s^2) / sum(all s^2)``.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    discarded_weight: float

    @property
    def rank(self) -> int:
        return self.s.shape[0]


def _svd_with_fallback(m: np.ndarray):
    # gesdd is fast but occasionally fails to converge; gesvd is the slow,
    # robust fallback.
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
    except Exception as exc:  # pragma: no cover - exercised only on LAPACK failure
        raise DecompositionError(f"SVD failed for shape {m.shape}: {exc}") from exc


def svd_truncate(m: np.ndarray, max_rank: int, weight_tol: float = 0.0) -> TruncatedSVD:
    """SVD of a matrix, truncated to ``max_rank`` or to relative weight ``weight_tol``.

    The kept rank is ``min(max_rank, k*)`` where ``k*`` is the smallest rank
    whose relative discarded weight is <= ``weight_tol``.  At least one
    singular value is always kept.  Ties at the cut are broken by index order
    (strict truncation at ``max_rank`` even inside a degenerate group).
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionMismatchError(f"svd_truncate expects a matrix, got shape {m.shape}")
    if max_rank < 1:
        raise ValueError(f"max_rank must be >= 1, got {max_rank}")
    if not np.all(np.isfinite(m)):
        raise ValueError("svd_truncate input contains non-finite values")

    u, s, vh = _svd_with_fallback(m)
    weights = s * s
    total = float(weights.sum())
    if total == 0.0:
        # Zero matrix: keep a single zero singular value, nothing is lost.
        return TruncatedSVD(u[:, :1].copy(), s[:1].copy(), vh[:1].copy(), 0.0)

    # discarded(k) = sum of weights beyond the first k, relative to total
    tail = np.concatenate([np.cumsum(weights[::-1])[::-1][1:], [0.0]]) / total
    k_star = int(np.searchsorted(-tail, -weight_tol, side="left")) + 1
    keep = min(max_rank, k_star)
    discarded = float(tail[keep - 1]) if keep < s.shape[0] else 0.0
    return TruncatedSVD(
        np.ascontiguousarray(u[:, :keep]),
        s[:keep].copy(),
        np.ascontiguousarray(vh[:keep]),
        discarded,
    )


def hermitian_gate_exponential(h: np.ndarray, prefactor: complex) -> np.ndarray:
    """``exp(prefactor * h)`` for Hermitian ``h`` via full eigendecomposition.

    With purely imaginary prefactor the result is unitary to working
    precision.  Raises if ``h`` is not Hermitian to a 1e-12 relative norm.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {h.shape}")
    scale = np.linalg.norm(h)
    herm_defect = np.linalg.norm(h - h.conj().T)
    if herm_defect > 1e-12 * max(scale, 1.0):
        raise ValueError(
            f"matrix is not Hermitian: ||h - h^dag|| = {herm_defect:.3e} "
            f"(relative to ||h|| = {scale:.3e})"
        )
    w, vecs = np.linalg.eigh(h)
    phases = np.exp(prefactor * w)
    return np.ascontiguousarray((vecs * phases) @ vecs.conj().T)
