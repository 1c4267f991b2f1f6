"""Von Neumann entropy and the conditional entropy of a matrix product.

Both quantities are in nats. The entropy of a spectrum uses the standard
0*ln(0) = 0 convention with eigenvalues at or below 1e-12 treated as exact
zeros; sentence density matrices are heavily rank-deficient, so this path is
the common one, not an edge case.
"""

from __future__ import annotations

import numpy as np

from .density import TRACE_ATOL, DensityMatrix
from .errors import ContractViolationError, DimensionError, NumericError
from .linalg import PSD_EIG_FLOOR, check_symmetric, eig_sym

ENTROPY_EIG_CUTOFF = 1e-12
# Product-matrix eigenvalues below this indicate a kernel failure, not round-off.
PRODUCT_EIG_FLOOR = -1e-8


def entropy_of_spectrum(values: np.ndarray) -> float:
    """-sum(v * ln v) over entries above the zero cutoff; not normalized."""
    lam = np.asarray(values, dtype=float)
    lam = lam[lam > ENTROPY_EIG_CUTOFF]
    if lam.size == 0:
        return 0.0
    return float(-(lam * np.log(lam)).sum())


def _checked_matrix(d: DensityMatrix) -> np.ndarray:
    try:
        m = check_symmetric(d.matrix)
    except Exception as exc:
        raise ContractViolationError(f"density matrix invalid: {exc}") from exc
    trace = float(np.trace(m))
    if abs(trace - 1.0) > TRACE_ATOL:
        raise ContractViolationError(f"density matrix trace is {trace!r}, expected 1")
    return m


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -tr(rho ln rho), evaluated on the spectrum of rho."""
    m = _checked_matrix(rho)
    spectrum = eig_sym(m)
    if float(spectrum.eigenvalues.min()) < PSD_EIG_FLOOR:
        raise ContractViolationError(
            f"density matrix has eigenvalue {float(spectrum.eigenvalues.min())!r} < 0"
        )
    return max(entropy_of_spectrum(np.clip(spectrum.eigenvalues, 0.0, None)), 0.0)


def conditional_quantum_entropy(sigma: DensityMatrix, rho: DensityMatrix) -> float:
    """-tr(sigma rho ln(sigma rho)) + tr(rho ln rho); may be negative.

    The product sigma*rho is not symmetric, but its nonzero eigenvalues equal
    those of the symmetric PSD matrix rho^(1/2) sigma rho^(1/2) (AB and BA
    share nonzero spectra), so the symmetric eigensolver is reused. The
    product has trace tr(sigma rho) != 1 in general; no renormalization is
    applied.
    """
    ms = _checked_matrix(sigma)
    mr = _checked_matrix(rho)
    if ms.shape != mr.shape:
        raise DimensionError(f"order mismatch: {ms.shape[0]} vs {mr.shape[0]}")

    rho_spectrum = eig_sym(mr)
    if float(rho_spectrum.eigenvalues.min()) < PSD_EIG_FLOOR:
        raise ContractViolationError(
            f"density matrix has eigenvalue {float(rho_spectrum.eigenvalues.min())!r} < 0"
        )
    rho_eigs = np.clip(rho_spectrum.eigenvalues, 0.0, None)
    root = (rho_spectrum.eigenvectors * np.sqrt(rho_eigs)) @ rho_spectrum.eigenvectors.T
    product = root @ ms @ root
    product = (product + product.T) / 2.0

    product_spectrum = eig_sym(product)
    smallest = float(product_spectrum.eigenvalues.min())
    if smallest < PRODUCT_EIG_FLOOR:
        raise NumericError(
            f"symmetrized product has eigenvalue {smallest!r}; kernel failure"
        )
    term = entropy_of_spectrum(np.clip(product_spectrum.eigenvalues, 0.0, None))
    return term - entropy_of_spectrum(rho_eigs)
