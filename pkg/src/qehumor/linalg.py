"""Dense symmetric eigensolver and matrix helpers.

All entropy computations in this package reduce to full spectra of small
(order <= a few hundred, typically 50) real symmetric matrices. A cyclic
Jacobi iteration is used: it is simple, unconditionally robust on symmetric
input, and returns an orthogonal eigenvector matrix by construction.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    ContractViolationError,
    ConvergenceError,
    DimensionError,
    NotPositiveSemidefiniteError,
)

# Entrywise symmetry tolerance: |a[i][j] - a[j][i]| <= SYMMETRY_RTOL * max(1, |a[i][j]|).
SYMMETRY_RTOL = 1e-12
# Eigenvalues in [PSD_EIG_FLOOR, 0) are round-off from rank-deficient input; clip to 0.
PSD_EIG_FLOOR = -1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-12


class Spectrum(NamedTuple):
    """Full eigendecomposition: eigenvalues descending, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_symmetric(a) -> np.ndarray:
    """Return ``a`` as a float array, raising if it is not symmetric."""
    a = as_square_matrix(a)
    gap = np.abs(a - a.T)
    bound = SYMMETRY_RTOL * np.maximum(1.0, np.abs(a))
    if np.any(gap > bound):
        i, j = np.unravel_index(int(np.argmax(gap - bound)), a.shape)
        raise ContractViolationError(
            f"matrix is not symmetric: a[{i}][{j}]={a[i, j]!r} vs a[{j}][{i}]={a[j, i]!r}"
        )
    return a


def _offdiag_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(off * off)))


def eig_sym(a) -> Spectrum:
    """Full spectrum of a symmetric matrix via cyclic Jacobi rotations.

    Deterministic for a given input: fixed sweep order, stable descending
    eigenvalue sort, and a sign convention that makes the entry of largest
    magnitude in each eigenvector positive.
    """
    a = check_symmetric(a)
    n = a.shape[0]
    m = (a + a.T) / 2.0
    v = np.eye(n)
    scale = max(1.0, float(np.abs(m).max()))
    stop = JACOBI_OFF_TOL * scale
    # Rotations below this threshold are skipped inside a sweep; the skipped
    # mass keeps the off-diagonal norm under ``stop`` (n*(n-1) entries).
    skip = stop / (2.0 * n) if n > 1 else stop

    converged = n < 2
    for _ in range(JACOBI_MAX_SWEEPS):
        if _offdiag_norm(m) <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= skip:
                    continue
                app = m[p, p]
                aqq = m[q, q]
                theta = (aqq - app) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = m[:, p].copy()
                col_q = m[:, q].copy()
                m[:, p] = c * col_p - s * col_q
                m[:, q] = s * col_p + c * col_q
                m[p, p] = app - t * apq
                m[q, q] = aqq + t * apq
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, :] = m[:, p]
                m[q, :] = m[:, q]
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    if not converged and _offdiag_norm(m) > stop:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps; "
            f"off-diagonal residual {_offdiag_norm(m):.3e}"
        )

    values = np.diag(m).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for k in range(n):
        pivot = int(np.argmax(np.abs(vectors[:, k])))
        if vectors[pivot, k] < 0.0:
            vectors[:, k] = -vectors[:, k]
    return Spectrum(values, vectors)


def sqrt_psd(a) -> np.ndarray:
    """Symmetric square root Q diag(sqrt(lambda)) Q^T of a PSD matrix."""
    spectrum = eig_sym(a)
    smallest = float(spectrum.eigenvalues.min())
    if smallest < PSD_EIG_FLOOR:
        raise NotPositiveSemidefiniteError(
            f"matrix is not positive semi-definite: eigenvalue {smallest!r}"
        )
    roots = np.sqrt(np.clip(spectrum.eigenvalues, 0.0, None))
    b = (spectrum.eigenvectors * roots) @ spectrum.eigenvectors.T
    return (b + b.T) / 2.0


def trace_product(a, b) -> float:
    """tr(a b) evaluated as sum_ij a[i][j] * b[j][i]."""
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"order mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sum(a * b.T))
