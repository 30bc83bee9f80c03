"""
    Operator models - validated Hermitian and density matrices.

    Both classes wrap a read-only complex ``numpy`` array.  Validation runs
    once, at construction; afterwards the value is immutable and can be
    shared freely between threads.
"""
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np

from ..exceptions import ValidationError
from ..tolerances import HERMITIAN_TOL, PSD_TOL, TRACE_TOL, SPECTRAL_TOL


def as_matrix(value: Any) -> np.ndarray:
    """Return the complex matrix behind an operator, array or nested list (no copy if possible)."""
    if isinstance(value, HermitianOperator):
        return value.matrix
    return np.asarray(value, dtype=complex)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


class HermitianOperator:
    """
    A square complex matrix equal to its conjugate transpose.

    The Hermiticity check is relative: ``max|A − A†| ≤ tol · max|A_ij|``.
    Accepted input is symmetrised, so downstream code can rely on exact
    Hermiticity.
    """

    def __init__(self, entries: Union[np.ndarray, Sequence, "HermitianOperator"],
                 *, tol: float = HERMITIAN_TOL):
        matrix = np.array(as_matrix(entries), dtype=complex, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValidationError(f"Operator must be a non-empty square matrix, got shape {matrix.shape}.")
        if not np.all(np.isfinite(matrix)):
            raise ValidationError("Operator has non-finite entries.")

        scale = float(np.max(np.abs(matrix)))
        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > tol * scale:
            raise ValidationError(
                f"Operator is not Hermitian: max|A - A†| = {deviation:.3e} "
                f"exceeds {tol:.0e} × {scale:.3e}."
            )
        self._matrix = _frozen((matrix + matrix.conj().T) / 2)
        self._eigenvalues: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._matrix

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order (cached)."""
        if self._eigenvalues is None:
            self._eigenvalues = _frozen(np.linalg.eigvalsh(self._matrix)[::-1].copy())
        return self._eigenvalues

    def trace(self) -> float:
        return float(np.trace(self._matrix).real)

    def __array__(self, dtype=None, copy=None):
        return np.array(self._matrix, dtype=dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self._matrix, other._matrix)

    def __hash__(self) -> int:
        return hash((self.dim, self._matrix.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class DensityOperator(HermitianOperator):
    """
    A positive semi-definite Hermitian operator of unit trace.

    Eigenvalues down to ``-psd_tol`` are accepted (numerical noise); the
    trace must be within ``trace_tol`` of 1.
    """

    def __init__(self, entries: Union[np.ndarray, Sequence, HermitianOperator],
                 *, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL,
                 trace_tol: float = TRACE_TOL):
        super().__init__(entries, tol=tol)
        smallest = float(self.eigenvalues()[-1])
        if smallest < -psd_tol:
            raise ValidationError(f"Density operator has negative eigenvalue {smallest:.3e}.")
        trace = self.trace()
        if abs(trace - 1.0) > trace_tol:
            raise ValidationError(f"Density operator has trace {trace:.12g}, expected 1.")

    # ── Factories ────────────────────────────────────────────────

    @classmethod
    def basis(cls, dim: int, index: int) -> "DensityOperator":
        """The pure state |index⟩⟨index|."""
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1.0
        return cls(m)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, probabilities: Sequence[float]) -> "DensityOperator":
        return cls(np.diag(np.asarray(probabilities, dtype=complex)))

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> "DensityOperator":
        """|ψ⟩⟨ψ| for a vector, normalised first."""
        psi = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValidationError("Cannot build a pure state from the zero vector.")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    Eigen-decomposition A = U diag(λ) U† with eigenvalues in descending order.

    Attributes:
        eigenvalues:  Real vector, descending.
        eigenvectors: Unitary matrix whose columns are the eigenvectors.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def is_orthonormal(self, tol: float = SPECTRAL_TOL) -> bool:
        u = self.eigenvectors
        return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))) <= tol)
