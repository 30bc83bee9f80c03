"""
    Dense Hermitian linear algebra.

    Spectral calculus on the support (powers, logarithms), tensor products,
    partial traces, trace norms and the noncommutative quotient.  Functions
    accept ``HermitianOperator`` instances or plain arrays and return plain
    complex ``numpy`` arrays; wrap results in ``DensityOperator`` where an
    invariant has to be carried further.

    Support convention
    ──────────────────
    An eigenvalue λ counts as zero when λ < SUPPORT_CUTOFF · max(|λ_max|, 1).
    Negative powers and logarithms act on the support only.
"""
from functools import reduce
from typing import Any, Iterable, Sequence, Tuple

import numpy as np
import scipy.linalg

from .exceptions import DomainError, ValidationError
from .models.operator import HermitianOperator, SpectralDecomposition, as_matrix
from .tolerances import PSD_TOL, SUPPORT_CHECK_TOL, SUPPORT_CUTOFF


def _hermitian(value: Any) -> np.ndarray:
    if isinstance(value, HermitianOperator):
        return value.matrix
    return HermitianOperator(value).matrix


# ── Low-level spectral helpers (no validation) ──────────────────

def support_threshold(eigenvalues: np.ndarray, cutoff: float = SUPPORT_CUTOFF) -> float:
    """Absolute threshold below which an eigenvalue is treated as 0."""
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return cutoff * max(scale, 1.0)


def psd_spectrum(matrix: np.ndarray, name: str = "operator",
                 psd_tol: float = PSD_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decompose a Hermitian PSD matrix and zero the eigenvalues off the support.

    The caller guarantees Hermiticity; only the sign is checked.

    Raises:
        ValidationError: If an eigenvalue is below ``-psd_tol · max(1, |λ_max|)``.
    """
    w, u = np.linalg.eigh(matrix)
    scale = max(float(np.max(np.abs(w))), 1.0)
    if w[0] < -psd_tol * scale:
        raise ValidationError(f"{name} is not positive semi-definite (eigenvalue {w[0]:.3e}).")
    w = np.where(w < support_threshold(w), 0.0, w)
    return w, u


def from_spectrum(eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> np.ndarray:
    """U diag(λ) U†."""
    return (eigenvectors * eigenvalues) @ eigenvectors.conj().T


def spectral_power(w: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    """Support-restricted power from an already clipped spectrum."""
    f = np.zeros_like(w)
    mask = w > 0
    f[mask] = 1.0 if p == 0 else w[mask] ** p
    return from_spectrum(f, u)


# ── Public operations ────────────────────────────────────────────

def spectral(a: Any) -> SpectralDecomposition:
    """
    Eigen-decomposition with eigenvalues sorted in descending order.

    Raises:
        ValidationError: For non-square or non-Hermitian input.
    """
    m = _hermitian(a)
    w, u = scipy.linalg.eigh(m)
    return SpectralDecomposition(eigenvalues=w[::-1].copy(), eigenvectors=u[:, ::-1].copy())


def mat_power(a: Any, p: float) -> np.ndarray:
    """
    A^p for PSD A, on the support when ``p <= 0`` (zero eigenvalues stay zero;
    ``p = 0`` yields the support projector).
    """
    w, u = psd_spectrum(_hermitian(a))
    return spectral_power(w, u, p)


def mat_log_support(a: Any) -> np.ndarray:
    """log A on the support of a PSD operator; the kernel contributes 0."""
    w, u = psd_spectrum(_hermitian(a))
    f = np.zeros_like(w)
    mask = w > 0
    f[mask] = np.log(w[mask])
    return from_spectrum(f, u)


def support_projector(a: Any) -> np.ndarray:
    return mat_power(a, 0)


def support_contained(a: Any, b: Any, tol: float = SUPPORT_CHECK_TOL) -> bool:
    """Whether supp(A) ⊆ supp(B), compared through the projectors."""
    pa = support_projector(a)
    pb = support_projector(b)
    leak = pa - pb @ pa
    return bool(np.linalg.norm(leak, 2) <= tol)


def tensor(*operators: Any) -> np.ndarray:
    """Kronecker product of one or more operators, left to right."""
    if not operators:
        raise ValidationError("tensor needs at least one operator.")
    return reduce(np.kron, (as_matrix(op) for op in operators))


def partial_trace(a: Any, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    Trace out every subsystem not listed in ``keep``.

    Args:
        a:    Operator on ⊗_i C^{dims[i]}.
        dims: Subsystem dimensions.
        keep: Indices of the subsystems to keep (any order; output follows ``dims``).
    """
    m = as_matrix(a)
    dims = [int(d) for d in dims]
    keep_set = set(int(k) for k in keep)
    total = int(np.prod(dims)) if dims else 0
    if m.ndim != 2 or m.shape != (total, total):
        raise ValidationError(f"Operator shape {m.shape} does not match subsystem dims {dims}.")
    if not keep_set.issubset(range(len(dims))):
        raise ValidationError(f"keep={sorted(keep_set)} is out of range for {len(dims)} subsystems.")

    t = m.reshape(dims + dims)
    for i in sorted(set(range(len(dims))) - keep_set, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    kept = int(np.prod([dims[i] for i in sorted(keep_set)])) if keep_set else 1
    return t.reshape(kept, kept)


def trace_norm(a: Any) -> float:
    """‖A‖₁ = Σ|λ_i| for Hermitian A."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(_hermitian(a)))))


def trace_distance(a: Any, b: Any) -> float:
    """½‖A − B‖₁."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise ValidationError(f"Dimension mismatch: {ma.shape} vs {mb.shape}.")
    return 0.5 * trace_norm(ma - mb)


def nc_quotient(a: Any, b: Any) -> np.ndarray:
    """
    Noncommutative quotient A/B := B^{-1/2} A B^{-1/2} (support-restricted root).

    Raises:
        DomainError: If supp(A) is not contained in supp(B).
    """
    ma, mb = _hermitian(a), _hermitian(b)
    if ma.shape != mb.shape:
        raise ValidationError(f"Dimension mismatch: {ma.shape} vs {mb.shape}.")
    if not support_contained(ma, mb):
        raise DomainError("nc_quotient: support of A is not contained in support of B.")
    root = mat_power(mb, -0.5)
    return root @ ma @ root


def positive_part(a: Any) -> np.ndarray:
    """(A)_+ by clipping the spectrum at 0."""
    w, u = np.linalg.eigh(_hermitian(a))
    return from_spectrum(np.clip(w, 0.0, None), u)


def abs_op(a: Any) -> np.ndarray:
    """|A| by taking absolute eigenvalues."""
    w, u = np.linalg.eigh(_hermitian(a))
    return from_spectrum(np.abs(w), u)


def nonnegative_projector(a: Any) -> np.ndarray:
    """Projector onto the eigenspace {A ≥ 0}; the optimal test for ½‖A‖₁ when Tr A = 0."""
    w, u = np.linalg.eigh(_hermitian(a))
    return from_spectrum((w >= 0).astype(float), u)
