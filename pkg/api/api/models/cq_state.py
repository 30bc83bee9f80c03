"""
    Classical-quantum states, wiretap channels, codebooks and Kraus channels.

    A ``CQState`` ρ_XE = Σ_x p(x)|x⟩⟨x| ⊗ ρ_E^x is stored as a probability
    vector plus a stack of d_E × d_E blocks; the full |X|·d_E matrix is only
    built on request (``to_operator``).  Symbols with p(x) = 0 may carry any
    density operator; padding and empty hash preimages use the designated
    state |0⟩⟨0|, and their weighted block p(x)ρ_E^x is the zero matrix.
"""
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from ..exceptions import CapacityError, DomainError, ValidationError
from ..linalg import partial_trace
from ..tolerances import EXPLICIT_SIZE_LIMIT, KRAUS_TOL, PROBABILITY_TOL
from .hashing import AffineHash, is_balanced
from .operator import DensityOperator, as_matrix


def designated_state(dim: int) -> np.ndarray:
    """|0⟩⟨0| in dimension ``dim``; the filler for zero-probability symbols."""
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = 1.0
    return m


def _probability_vector(p: Any, tol: float = PROBABILITY_TOL) -> np.ndarray:
    arr = np.array(p, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ValidationError("Probability vector must be non-empty and finite.")
    if np.min(arr) < -tol:
        raise ValidationError(f"Probability vector has negative entry {np.min(arr):.3e}.")
    if abs(arr.sum() - 1.0) > tol:
        raise ValidationError(f"Probabilities sum to {arr.sum():.12g}, expected 1.")
    return np.clip(arr, 0.0, None)


def _density_stack(rhos: Any) -> np.ndarray:
    if isinstance(rhos, np.ndarray) and rhos.ndim == 3:
        items: Sequence[Any] = list(rhos)
    else:
        items = list(rhos)
    if not items:
        raise ValidationError("At least one density operator is required.")
    checked = [r.matrix if isinstance(r, DensityOperator) else DensityOperator(r).matrix
               for r in items]
    dims = {m.shape[0] for m in checked}
    if len(dims) != 1:
        raise ValidationError(f"Density operators must share a dimension, got {sorted(dims)}.")
    return np.stack(checked)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class CQState:
    """
    A classical-quantum state over the alphabet {0, …, |X|−1}.

    Args:
        p:    Probability vector over X.
        rhos: One density operator per symbol (``DensityOperator``, array or
              nested list), or a (|X|, d, d) array.
    """

    def __init__(self, p: Any, rhos: Any):
        prob = _probability_vector(p)
        stack = _density_stack(rhos)
        if stack.shape[0] != prob.size:
            raise ValidationError(
                f"{prob.size} probabilities but {stack.shape[0]} density operators."
            )
        self._p = _frozen(prob)
        self._rhos = _frozen(stack)

    @classmethod
    def _trusted(cls, p: np.ndarray, rhos: np.ndarray) -> "CQState":
        """Build from arrays already known to satisfy the invariants."""
        obj = cls.__new__(cls)
        obj._p = _frozen(np.array(p, dtype=float))
        obj._rhos = _frozen(np.array(rhos, dtype=complex))
        return obj

    # ── Accessors ────────────────────────────────────────────────

    @property
    def p(self) -> np.ndarray:
        return self._p

    @property
    def rhos(self) -> np.ndarray:
        """Read-only (|X|, d_E, d_E) stack of conditional states."""
        return self._rhos

    @property
    def alphabet_size(self) -> int:
        return self._p.size

    @property
    def dim_e(self) -> int:
        return self._rhos.shape[1]

    @property
    def blocks(self) -> np.ndarray:
        """Weighted blocks p(x)ρ_E^x."""
        return self._p[:, None, None] * self._rhos

    @property
    def u(self) -> Optional[int]:
        """log₂|X| when the alphabet size is a power of two, else ``None``."""
        n = self.alphabet_size
        return n.bit_length() - 1 if n & (n - 1) == 0 else None

    # ── Derived states ───────────────────────────────────────────

    def marginal_e(self) -> DensityOperator:
        """ρ_E = Σ_x p(x) ρ_E^x."""
        return DensityOperator(self.blocks.sum(axis=0))

    def to_operator(self) -> np.ndarray:
        """The full block-diagonal |X|·d_E matrix of ρ_XE."""
        return scipy.linalg.block_diag(*self.blocks)

    def padded(self, size: Optional[int] = None) -> "CQState":
        """
        Extend the alphabet with zero-probability symbols carrying |0⟩⟨0|.

        Args:
            size: Target alphabet size; defaults to the next power of two.
        """
        n = self.alphabet_size
        target = size if size is not None else 1 << max(0, (n - 1).bit_length())
        if target < n:
            raise ValidationError(f"Cannot pad alphabet of size {n} down to {target}.")
        if target == n:
            return self
        extra = target - n
        p = np.concatenate([self._p, np.zeros(extra)])
        fill = np.broadcast_to(designated_state(self.dim_e), (extra, self.dim_e, self.dim_e))
        return CQState._trusted(p, np.concatenate([self._rhos, fill]))

    def iid_extend(self, n: int, max_size: int = EXPLICIT_SIZE_LIMIT) -> "CQState":
        """
        ρ_XE^{⊗n} over X^n in lexicographic order.

        Raises:
            ValidationError: If n < 1.
            CapacityError:   If |X|^n · d_E^n exceeds ``max_size``.
        """
        n = int(n)
        if n < 1:
            raise ValidationError(f"Blocklength must be ≥ 1, got {n}.")
        size = (self.alphabet_size * self.dim_e) ** n
        if size > max_size:
            raise CapacityError(
                f"iid_extend: |X|^n·d_E^n = {size} exceeds the explicit-size limit {max_size}."
            )
        p, rhos = self._p, self._rhos
        for _ in range(n - 1):
            p = np.kron(p, self._p)
            a, b = rhos.shape[0], self.alphabet_size
            da, db = rhos.shape[1], self.dim_e
            rhos = np.einsum("aij,bkl->abikjl", rhos, self._rhos).reshape(a * b, da * db, da * db)
        return CQState._trusted(p, rhos)

    def apply_hash(self, h: AffineHash) -> "CQState":
        """
        R^h(ρ_XE): the c-q state over Z = {0,1}^v.

        Empty preimages (and zero-mass outputs) carry p'(z) = 0 and |0⟩⟨0|.

        Raises:
            ValidationError: If |X| ≠ 2^u of the hash.
        """
        if self.alphabet_size != h.ctx.order:
            raise ValidationError(
                f"Hash input width u={h.ctx.u} does not match alphabet size {self.alphabet_size}."
            )
        z = h.table()
        summed = np.zeros((h.output_size, self.dim_e, self.dim_e), dtype=complex)
        np.add.at(summed, z, self.blocks)
        p_out = np.real(np.trace(summed, axis1=1, axis2=2))
        rhos = np.empty_like(summed)
        for k in range(h.output_size):
            rhos[k] = summed[k] / p_out[k] if p_out[k] > 0 else designated_state(self.dim_e)
        p_out = np.clip(p_out, 0.0, None)
        return CQState._trusted(p_out / p_out.sum(), rhos)

    def randomized_target(self, zsize: int) -> np.ndarray:
        """(1_Z/|Z|) ⊗ ρ_E as a block-diagonal matrix over z."""
        zsize = int(zsize)
        if zsize < 1:
            raise ValidationError(f"Output size must be ≥ 1, got {zsize}.")
        rho_e = self.blocks.sum(axis=0) / zsize
        return scipy.linalg.block_diag(*([rho_e] * zsize))

    def __repr__(self) -> str:
        return f"CQState(|X|={self.alphabet_size}, d_E={self.dim_e})"


class Codebook:
    """Codewords x_k for k ∈ [ML]."""

    def __init__(self, entries: Sequence[int], alphabet_size: int):
        arr = np.array(entries, dtype=np.int64).ravel()
        if arr.size == 0:
            raise ValidationError("Codebook must not be empty.")
        if np.min(arr) < 0 or np.max(arr) >= alphabet_size:
            raise ValidationError(f"Codebook entry outside alphabet [0, {alphabet_size}).")
        self._entries = _frozen(arr)
        self._alphabet_size = int(alphabet_size)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def alphabet_size(self) -> int:
        return self._alphabet_size

    def __len__(self) -> int:
        return self._entries.size

    def __repr__(self) -> str:
        return f"Codebook({self._entries.tolist()})"


class WiretapChannel:
    """
    A c-q wiretap channel x ↦ σ_BE^x on C^{d_B} ⊗ C^{d_E} (B first).
    """

    def __init__(self, outputs: Any, d_b: int, d_e: int):
        stack = _density_stack(outputs)
        if stack.shape[1] != int(d_b) * int(d_e):
            raise ValidationError(
                f"Outputs have dimension {stack.shape[1]}, expected d_B·d_E = {int(d_b) * int(d_e)}."
            )
        self._outputs = _frozen(stack)
        self._d_b = int(d_b)
        self._d_e = int(d_e)

    @property
    def outputs(self) -> np.ndarray:
        return self._outputs

    @property
    def d_b(self) -> int:
        return self._d_b

    @property
    def d_e(self) -> int:
        return self._d_e

    @property
    def alphabet_size(self) -> int:
        return self._outputs.shape[0]

    def reduced_outputs(self, keep: str) -> np.ndarray:
        """Stack of Tr_E σ_BE^x (keep='B') or Tr_B σ_BE^x (keep='E')."""
        index = {"B": 0, "E": 1}.get(str(keep).upper())
        if index is None:
            raise ValidationError(f"keep must be 'B' or 'E', got {keep!r}.")
        dims = [self._d_b, self._d_e]
        return np.stack([partial_trace(s, dims, [index]) for s in self._outputs])

    def induced_cq(self, p: Any, keep: str) -> CQState:
        """
        Σ_x p(x)|x⟩⟨x| ⊗ Tr_{other}[σ_BE^x].

        Raises:
            ValidationError: If p does not match the channel alphabet.
        """
        prob = _probability_vector(p)
        if prob.size != self.alphabet_size:
            raise ValidationError(
                f"Prior has {prob.size} entries but the channel has {self.alphabet_size} inputs."
            )
        return CQState(prob, self.reduced_outputs(keep))

    def __repr__(self) -> str:
        return f"WiretapChannel(|X|={self.alphabet_size}, d_B={self._d_b}, d_E={self._d_e})"


def induced_cq(channel: WiretapChannel, p: Any, keep: str) -> CQState:
    return channel.induced_cq(p, keep)


class StinespringDilation:
    """The isometry V = Σ_i K_i ⊗ |i⟩_E of a Kraus channel."""

    def __init__(self, isometry: np.ndarray, d_b: int, d_e: int):
        self._v = _frozen(np.array(isometry, dtype=complex))
        self._d_b = d_b
        self._d_e = d_e

    @property
    def isometry(self) -> np.ndarray:
        return self._v

    @property
    def d_b(self) -> int:
        return self._d_b

    @property
    def d_e(self) -> int:
        return self._d_e

    def apply(self, rho: Any) -> DensityOperator:
        """V ρ V† on B ⊗ E."""
        m = as_matrix(rho)
        return DensityOperator(self._v @ m @ self._v.conj().T)

    def wiretap_channel(self, inputs: Sequence[Any]) -> WiretapChannel:
        """The c-q wiretap channel x ↦ V ρ_{A'}^x V†."""
        return WiretapChannel([self.apply(r) for r in inputs], self._d_b, self._d_e)


class KrausChannel:
    """
    A CPTP map ρ ↦ Σ_i K_i ρ K_i† with K_i of shape d_B × d_A.

    Raises:
        ValidationError: If the Kraus set is empty, ragged or incomplete.
    """

    def __init__(self, kraus: Sequence[Any], tol: float = KRAUS_TOL):
        ops = [np.array(as_matrix(k), dtype=complex) for k in kraus]
        if not ops:
            raise ValidationError("A Kraus channel needs at least one operator.")
        shapes = {k.shape for k in ops}
        if len(shapes) != 1 or ops[0].ndim != 2:
            raise ValidationError(f"Kraus operators must share one 2-D shape, got {sorted(shapes)}.")
        d_a = ops[0].shape[1]
        completeness = sum(k.conj().T @ k for k in ops)
        deviation = float(np.max(np.abs(completeness - np.eye(d_a))))
        if deviation > tol:
            raise ValidationError(f"Kraus operators are incomplete: max|ΣK†K − 1| = {deviation:.3e}.")
        self._kraus = _frozen(np.stack(ops))

    @property
    def kraus(self) -> np.ndarray:
        return self._kraus

    @property
    def d_a(self) -> int:
        return self._kraus.shape[2]

    @property
    def d_b(self) -> int:
        return self._kraus.shape[1]

    def apply(self, rho: Any) -> np.ndarray:
        m = as_matrix(rho)
        return np.einsum("iab,bc,idc->ad", self._kraus, m, self._kraus.conj())

    def stinespring(self) -> StinespringDilation:
        """V with V[(b, i), a] = K_i[b, a]; d_E is the number of Kraus operators."""
        n, d_b, d_a = self._kraus.shape
        v = np.transpose(self._kraus, (1, 0, 2)).reshape(d_b * n, d_a)
        return StinespringDilation(v, d_b, n)


def stinespring(channel: KrausChannel) -> StinespringDilation:
    return channel.stinespring()


def eve_states(channel: Union[WiretapChannel, np.ndarray]) -> np.ndarray:
    """Eve's conditional states σ_E^x from a channel or an explicit (|X|, d, d) stack."""
    if isinstance(channel, WiretapChannel):
        return channel.reduced_outputs("E")
    return np.asarray(channel, dtype=complex)


def wiretap_joint_blocks(codebook: Codebook, h: AffineHash,
                         channel: Union[WiretapChannel, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eve's per-message states (1/L) Σ_{k ∈ h^{-1}(m)} σ_E^{x_k} and the
    codebook average σ^C_E = (1/ML) Σ_k σ_E^{x_k}.

    Raises:
        ValidationError: If |codebook| ≠ 2^u.
        DomainError:     If the hash is not balanced.
    """
    if len(codebook) != h.ctx.order:
        raise ValidationError(f"Codebook size {len(codebook)} does not match ML = 2^{h.ctx.u}.")
    if not is_balanced(h):
        raise DomainError(f"Hash (a={h.a}, b={h.b}) is not balanced.")
    sigma = eve_states(channel)
    per_codeword = sigma[codebook.entries]
    messages = h.table()
    per_message = np.zeros((h.output_size,) + sigma.shape[1:], dtype=complex)
    np.add.at(per_message, messages, per_codeword)
    per_message /= 1 << (h.ctx.u - h.v)
    return per_message, per_codeword.mean(axis=0)


def block_list(state: CQState) -> List[np.ndarray]:
    """The weighted blocks as a list (convenience for callers iterating per symbol)."""
    return list(state.blocks)
