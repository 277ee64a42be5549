"""Dense Hermitian eigensolver based on cyclic Jacobi rotations.

The matrices in this package are tiny (at most 64x64, usually 8x8 or
16x16), so a dependency-free Jacobi sweep is both simple and accurate:
each rotation zeroes one off-diagonal pair exactly, and the off-diagonal
mass decays quadratically once sweeps get going.
"""
from __future__ import annotations

import numpy as np

MAX_DIM = 64


def hermitian_eigendecomposition(matrix: np.ndarray, tol: float = 1e-14,
                                 max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues real and sorted
    ascending; eigenvector k is the column eigenvectors[:, k].  Raises
    ValueError if the input is not Hermitian within 1e-12 or larger than
    MAX_DIM.
    """
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"matrix dimension {n} exceeds supported maximum {MAX_DIM}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian within 1e-12")

    vectors = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= tol * scale * 1e-2:
                    continue
                # Factor out the phase so the 2x2 block is real symmetric,
                # then apply the classic Jacobi rotation (smaller-angle root).
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s * phase],
                                [-s * np.conj(phase), c]], dtype=complex)
                a[:, [p, q]] = a[:, [p, q]] @ rot
                a[[p, q], :] = rot.conj().T @ a[[p, q], :]
                vectors[:, [p, q]] = vectors[:, [p, q]] @ rot

    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]
