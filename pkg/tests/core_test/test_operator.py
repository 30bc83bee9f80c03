# tests/core_test/test_operator.py
"""
Tests for the operator types and the linear-algebra helpers.

Covers:
    • HermitianOperator / DensityOperator validation and immutability
    • Density factories (basis, maximally mixed, diagonal, pure)
    • spectral: descending order, reconstruction, orthonormality
    • Support-restricted powers and logarithms
    • tensor and partial_trace
    • trace norm / distance, positive part, |A|, {A ≥ 0} projector
    • Noncommutative quotient and its support check
"""
import numpy as np
import pytest

from api.exceptions import DomainError, ValidationError
from api.linalg import (
    abs_op,
    mat_log_support,
    mat_power,
    nc_quotient,
    nonnegative_projector,
    partial_trace,
    positive_part,
    spectral,
    support_contained,
    support_projector,
    tensor,
    trace_distance,
    trace_norm,
)
from api.models.operator import DensityOperator, HermitianOperator


# ═════════════════════════════════════════════════════════════════
#  HermitianOperator
# ═════════════════════════════════════════════════════════════════

class TestHermitianOperator:

    def test_accepts_hermitian_matrix(self):
        op = HermitianOperator([[1, 1j], [-1j, 2]])
        assert op.dim == 2
        assert op.trace() == pytest.approx(3.0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError, match="not Hermitian"):
            HermitianOperator([[1, 1], [0, 1]])

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            HermitianOperator(np.zeros((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            HermitianOperator([[np.nan, 0], [0, 1]])

    def test_small_asymmetry_is_symmetrised(self):
        op = HermitianOperator([[1, 1e-14], [0, 1]])
        assert np.array_equal(op.matrix, op.matrix.conj().T)

    def test_matrix_is_read_only(self):
        op = HermitianOperator(np.eye(2))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5

    def test_eigenvalues_descending(self):
        op = HermitianOperator(np.diag([1.0, 3.0, 2.0]))
        assert np.allclose(op.eigenvalues(), [3.0, 2.0, 1.0])

    def test_equality_and_hash(self):
        a = HermitianOperator(np.eye(2))
        b = HermitianOperator(np.eye(2))
        assert a == b
        assert hash(a) == hash(b)


# ═════════════════════════════════════════════════════════════════
#  DensityOperator
# ═════════════════════════════════════════════════════════════════

class TestDensityOperator:

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError, match="negative eigenvalue"):
            DensityOperator(np.diag([1.2, -0.2]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            DensityOperator(np.diag([0.5, 0.6]))

    def test_basis_state(self):
        rho = DensityOperator.basis(3, 1)
        assert rho.matrix[1, 1] == 1
        assert rho.trace() == pytest.approx(1.0)

    def test_maximally_mixed(self):
        rho = DensityOperator.maximally_mixed(4)
        assert np.allclose(rho.eigenvalues(), 0.25)

    def test_diagonal(self):
        rho = DensityOperator.diagonal([0.25, 0.75])
        assert np.allclose(np.diag(rho.matrix).real, [0.25, 0.75])

    def test_pure_normalises(self):
        rho = DensityOperator.pure([1, 1])
        assert np.allclose(rho.matrix, 0.5 * np.ones((2, 2)))

    def test_pure_rejects_zero_vector(self):
        with pytest.raises(ValidationError):
            DensityOperator.pure([0, 0])


# ═════════════════════════════════════════════════════════════════
#  Spectral calculus
# ═════════════════════════════════════════════════════════════════

class TestSpectral:

    def test_descending_and_reconstructs(self, rng):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a = g + g.conj().T
        dec = spectral(a)
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        assert np.allclose(dec.reconstruct(), a, atol=1e-9)
        assert dec.is_orthonormal()

    def test_power_on_full_rank(self):
        assert np.allclose(mat_power(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]))

    def test_negative_power_stays_on_support(self):
        assert np.allclose(mat_power(np.diag([4.0, 0.0]), -0.5), np.diag([0.5, 0.0]))

    def test_zero_power_is_support_projector(self):
        assert np.allclose(mat_power(np.diag([2.0, 0.0]), 0), np.diag([1.0, 0.0]))
        assert np.allclose(support_projector(np.diag([0.0, 3.0])), np.diag([0.0, 1.0]))

    def test_power_rejects_indefinite(self):
        with pytest.raises(ValidationError):
            mat_power(np.diag([1.0, -1.0]), 0.5)

    def test_log_kernel_contributes_zero(self):
        out = mat_log_support(np.diag([np.e, 0.0]))
        assert np.allclose(out, np.diag([1.0, 0.0]))

    def test_support_containment(self):
        assert support_contained(np.diag([1.0, 0.0]), np.eye(2))
        assert not support_contained(np.eye(2), np.diag([1.0, 0.0]))


# ═════════════════════════════════════════════════════════════════
#  Tensor and partial trace
# ═════════════════════════════════════════════════════════════════

class TestPartialTrace:

    def test_tensor_needs_an_operand(self):
        with pytest.raises(ValidationError):
            tensor()

    def test_tensor_of_three(self):
        assert tensor(np.eye(2), np.eye(3), np.eye(2)).shape == (12, 12)

    def test_trace_out_second(self):
        a = np.array([[0.7, 0.1], [0.1, 0.3]])
        b = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
        assert np.allclose(partial_trace(np.kron(a, b), [2, 2], [0]), a)

    def test_trace_out_first(self):
        a = np.diag([0.5, 0.5])
        b = np.diag([0.1, 0.2, 0.7])
        assert np.allclose(partial_trace(np.kron(a, b), [2, 3], [1]), b)

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            partial_trace(np.eye(4), [2, 3], [0])

    def test_keep_out_of_range(self):
        with pytest.raises(ValidationError):
            partial_trace(np.eye(4), [2, 2], [2])


# ═════════════════════════════════════════════════════════════════
#  Norms and order operations
# ═════════════════════════════════════════════════════════════════

class TestNorms:

    def test_orthogonal_states_at_distance_one(self):
        assert trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0)

    def test_identical_states_at_distance_zero(self):
        assert trace_distance(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(0.0)

    def test_distance_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            trace_distance(np.eye(2), np.eye(3))

    def test_trace_norm_of_indefinite(self):
        assert trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0)

    def test_positive_part_and_abs(self):
        a = np.diag([1.0, -2.0])
        assert np.allclose(positive_part(a), np.diag([1.0, 0.0]))
        assert np.allclose(abs_op(a), np.diag([1.0, 2.0]))
        assert np.allclose(nonnegative_projector(a), np.diag([1.0, 0.0]))

    def test_projector_attains_half_trace_norm(self):
        """Tr[P(ρ − σ)] with P = {ρ − σ ≥ 0} equals ½‖ρ − σ‖₁."""
        rho = DensityOperator.pure([1, 0]).matrix
        sigma = DensityOperator.pure([1, 1]).matrix
        p = nonnegative_projector(rho - sigma)
        assert np.trace(p @ (rho - sigma)).real == pytest.approx(trace_distance(rho, sigma))


# ═════════════════════════════════════════════════════════════════
#  Noncommutative quotient
# ═════════════════════════════════════════════════════════════════

class TestQuotient:

    def test_quotient_by_identity(self):
        a = np.array([[0.7, 0.1], [0.1, 0.3]])
        assert np.allclose(nc_quotient(a, np.eye(2)), a)

    def test_quotient_scales(self):
        assert np.allclose(nc_quotient(np.diag([1.0, 1.0]), np.diag([4.0, 1.0])),
                           np.diag([0.25, 1.0]))

    def test_support_violation(self):
        with pytest.raises(DomainError):
            nc_quotient(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
