"""Cyclic Jacobi eigenvalues for stacks of small Hermitian matrices."""

from __future__ import annotations

import numpy as np


def jacobi_eigvalsh(A: np.ndarray, max_sweeps: int = 30, rtol: float = 1e-15) -> np.ndarray:
    """Eigenvalues of Hermitian matrices, sorted descending.

    Parameters
    ----------
    A : array, shape (..., n, n)
        Hermitian (or real symmetric) matrices.  Only the stack is batched;
        every matrix is rotated with the same pivot schedule.
    max_sweeps : int
        Upper bound on full cyclic sweeps.
    rtol : float
        Stop once the off-diagonal Frobenius norm of every matrix is below
        ``rtol`` times its total Frobenius norm.

    Returns
    -------
    w : array, shape (..., n)
    """
    A = np.array(A, dtype=complex, copy=True)
    shape = A.shape
    n = shape[-1]
    A = A.reshape(-1, n, n)
    if n == 1 or len(A) == 0:
        return np.sort(A.real.diagonal(axis1=1, axis2=2), axis=1)[:, ::-1].reshape(shape[:-1])
    scale = np.sqrt(np.sum(np.abs(A) ** 2, axis=(1, 2)))
    scale[scale == 0] = 1.0
    iu = np.triu_indices(n, 1)
    rows = np.arange(len(A))
    for _ in range(max_sweeps):
        off = np.sqrt(2 * np.sum(np.abs(A[:, iu[0], iu[1]]) ** 2, axis=1))
        if np.all(off <= rtol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                b = np.abs(apq)
                active = b > rtol * scale * 1e-3
                if not np.any(active):
                    continue
                app = A[:, p, p].real
                aqq = A[:, q, q].real
                b_safe = np.where(active, b, 1.0)
                tau = (aqq - app) / (2.0 * b_safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # phase that makes a_pq real before the real rotation
                ph = np.where(active, np.conj(apq) / b_safe, 1.0)
                # columns: A <- A G with G[:,p] = c e_p - s ph e_q, G[:,q] = s e_p + c ph e_q
                colp = A[:, :, p].copy()
                colq = A[:, :, q].copy()
                A[:, :, p] = c[:, None] * colp - (s * ph)[:, None] * colq
                A[:, :, q] = s[:, None] * colp + (c * ph)[:, None] * colq
                # rows: A <- G^H A
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :].copy()
                A[:, p, :] = c[:, None] * rowp - (s * np.conj(ph))[:, None] * rowq
                A[:, q, :] = s[:, None] * rowp + (c * np.conj(ph))[:, None] * rowq
                A[rows, p, q] = 0.0
                A[rows, q, p] = 0.0
    w = A.real.diagonal(axis1=1, axis2=2)
    return np.sort(w, axis=1)[:, ::-1].reshape(shape[:-1])
