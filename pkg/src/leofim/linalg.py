"""Symmetric-matrix utilities shared by the information-matrix code.

Information matrices here mix physical units whose natural scales span tens of
decades (delay rows ~1e23, frequency-offset rows ~1e-4), so every spectral
operation first applies a unit-diagonal congruence ``D A D`` with
``D = diag(1/sqrt(diag(A)))``.  Positive definiteness, Schur complements and
inverse blocks are invariant under that congruence, while eigenvalue floors
become meaningful relative quantities.
"""

from __future__ import annotations

import numpy as np

EIG_FLOOR_REL = 1e-12
"""Relative eigenvalue floor below which a balanced spectrum is truncated."""


class NumericalError(RuntimeError):
    """Raised when a matrix operation cannot be completed reliably."""


def sym(matrix: np.ndarray) -> np.ndarray:
    """Symmetric part of a matrix (cheap guard against accumulated asymmetry)."""
    return 0.5 * (matrix + matrix.T)


def relative_asymmetry(matrix: np.ndarray) -> float:
    """``norm(A - A.T) / norm(A)`` with a zero-matrix guard."""
    scale = float(np.linalg.norm(matrix))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(matrix - matrix.T)) / scale


def balance_scale(matrix: np.ndarray) -> np.ndarray:
    """Diagonal scaling vector ``d`` such that ``diag(d) A diag(d)`` has unit
    diagonal wherever the input diagonal is positive (and 1.0 elsewhere)."""
    diag = np.diag(matrix).copy()
    positive = diag > 0.0
    scale = np.ones_like(diag)
    scale[positive] = 1.0 / np.sqrt(diag[positive])
    return scale


def balanced_eigvalsh(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of the unit-diagonal-balanced symmetric part, ascending."""
    if matrix.size == 0:
        return np.zeros(0)
    scale = balance_scale(matrix)
    balanced = sym(matrix * scale[:, None] * scale[None, :])
    return np.linalg.eigvalsh(balanced)


def invert_psd(
    matrix: np.ndarray, floor_rel: float = EIG_FLOOR_REL
) -> tuple[np.ndarray, bool]:
    """Invert a symmetric PSD matrix via its balanced eigendecomposition.

    Eigenvalues of the balanced matrix below ``floor_rel * max_eig`` are
    treated as zero information and excluded (pseudo-inverse), which is
    reported through the second return value.

    Returns
    -------
    (numpy.ndarray, bool)
        The (pseudo-)inverse, and whether any eigenvalue was floored.

    Raises
    ------
    NumericalError
        If the balanced matrix has a significantly negative eigenvalue,
        i.e. the input was not PSD to working precision.
    """
    if matrix.shape[0] == 0:
        return np.zeros_like(matrix), False
    scale = balance_scale(matrix)
    balanced = sym(matrix * scale[:, None] * scale[None, :])
    eigvals, eigvecs = np.linalg.eigh(balanced)
    top = float(eigvals[-1])
    if top <= 0.0:
        # No positive information at all: the pseudo-inverse is zero.
        if float(eigvals[0]) < -1e-6:
            raise NumericalError("matrix is indefinite, not PSD")
        return np.zeros_like(matrix), True
    if float(eigvals[0]) < -1e-6 * top:
        raise NumericalError(
            f"matrix is indefinite (min/max eigenvalue {eigvals[0] / top:.3e})"
        )
    floor = floor_rel * top
    keep = eigvals > floor
    used_pseudo = bool(np.any(~keep))
    inv_vals = np.zeros_like(eigvals)
    inv_vals[keep] = 1.0 / eigvals[keep]
    inv_balanced = (eigvecs * inv_vals[None, :]) @ eigvecs.T
    inverse = inv_balanced * scale[:, None] * scale[None, :]
    return sym(inverse), used_pseudo


def schur_complement(
    matrix: np.ndarray,
    keep: np.ndarray,
    drop: np.ndarray,
    floor_rel: float = EIG_FLOOR_REL,
) -> tuple[np.ndarray, bool]:
    """Schur complement of the ``drop`` block: ``A - B C^-1 B.T``.

    Parameters
    ----------
    matrix : numpy.ndarray
        Full symmetric matrix.
    keep, drop : numpy.ndarray
        Integer index arrays selecting the retained block A and the
        marginalized block C.
    floor_rel : float
        Relative eigenvalue floor for inverting C.

    Returns
    -------
    (numpy.ndarray, bool)
        The complement, and whether C's inversion floored any eigenvalue.
    """
    keep = np.asarray(keep, dtype=int)
    drop = np.asarray(drop, dtype=int)
    a = matrix[np.ix_(keep, keep)]
    if drop.size == 0:
        return sym(a.copy()), False
    b = matrix[np.ix_(keep, drop)]
    c = matrix[np.ix_(drop, drop)]
    c_inv, used_pseudo = invert_psd(c, floor_rel)
    return sym(a - b @ c_inv @ b.T), used_pseudo
