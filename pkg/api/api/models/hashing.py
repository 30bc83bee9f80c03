"""
    GF(2^u) arithmetic and the affine hash family h(x) = [a·x + b]_v.

    Field elements are plain unsigned integers read as coefficient
    bitmasks (bit i = coefficient of x^i).  Multiplication is the
    shift-and-reduce carry-less product; it is also available vectorised
    over ``numpy`` integer arrays, which is what the simulator uses to
    evaluate whole hash families at once.

    ``[y]_v`` is pinned to the v most significant bits of the u-bit word.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Optional, Tuple, Union

import numpy as np

from ..exceptions import CapacityError, ValidationError
from ..tolerances import ENUMERATE_U_LIMIT, MAX_U, UNIVERSALITY_U_LIMIT

# One fixed modulus per degree: the lowest-weight irreducible polynomial with a
# non-zero constant term, the numerically smallest among equal weights.  Checked
# for irreducibility on first use.
IRREDUCIBLE_POLYNOMIALS: Dict[int, int] = {
    1: 0b11,                    # x + 1
    2: 0b111,                   # x^2 + x + 1
    3: 0b1011,                  # x^3 + x + 1
    4: 0b10011,                 # x^4 + x + 1
    5: 0b100101,                # x^5 + x^2 + 1
    6: 0b1000011,               # x^6 + x + 1
    7: 0b10000011,              # x^7 + x + 1
    8: 0x11B,                   # x^8 + x^4 + x^3 + x + 1
    9: 0x203,                   # x^9 + x + 1
    10: 0x409,                  # x^10 + x^3 + 1
    11: 0x805,                  # x^11 + x^2 + 1
    12: 0x1009,                 # x^12 + x^3 + 1
    13: 0x201B,                 # x^13 + x^4 + x^3 + x + 1
    14: 0x4021,                 # x^14 + x^5 + 1
    15: 0x8003,                 # x^15 + x + 1
    16: 0x1002B,                # x^16 + x^5 + x^3 + x + 1
}

IntOrArray = Union[int, np.ndarray]


def _poly_mod(a: int, m: int) -> int:
    """Remainder of polynomial a modulo m over GF(2)."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


@lru_cache(maxsize=None)
def is_irreducible(modulus: int) -> bool:
    """Exhaustive factor check: no polynomial of degree 1..deg/2 divides ``modulus``."""
    degree = modulus.bit_length() - 1
    if degree < 1:
        return False
    for factor_degree in range(1, degree // 2 + 1):
        for low in range(1 << factor_degree):
            if _poly_mod(modulus, (1 << factor_degree) | low) == 0:
                return False
    return True


class GFContext:
    """
    The field GF(2^u) with a fixed irreducible modulus.

    Immutable; construction verifies irreducibility (cached per modulus).
    """

    def __init__(self, u: int, modulus: Optional[int] = None):
        u = int(u)
        if not 1 <= u <= MAX_U:
            raise ValidationError(f"Field degree u={u} outside [1, {MAX_U}].")
        modulus = IRREDUCIBLE_POLYNOMIALS[u] if modulus is None else int(modulus)
        if modulus.bit_length() - 1 != u:
            raise ValidationError(f"Modulus {modulus:#x} does not have degree {u}.")
        if not is_irreducible(modulus):
            raise ValidationError(f"Modulus {modulus:#x} is reducible over GF(2).")
        self._u = u
        self._modulus = modulus

    @property
    def u(self) -> int:
        return self._u

    @property
    def modulus(self) -> int:
        return self._modulus

    @property
    def order(self) -> int:
        """Number of field elements, 2^u."""
        return 1 << self._u

    def check_element(self, x: IntOrArray, name: str = "operand") -> None:
        arr = np.asarray(x)
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= self.order):
            raise ValidationError(f"{name} out of range for GF(2^{self._u}).")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GFContext):
            return NotImplemented
        return (self._u, self._modulus) == (other._u, other._modulus)

    def __hash__(self) -> int:
        return hash((self._u, self._modulus))

    def __repr__(self) -> str:
        return f"GFContext(u={self._u}, modulus={self._modulus:#x})"


# ── Field arithmetic ────────────────────────────────────────────

def gf_add(x: IntOrArray, y: IntOrArray) -> IntOrArray:
    """Addition in characteristic 2 is XOR."""
    return x ^ y


def gf_mul(ctx: GFContext, x: IntOrArray, y: IntOrArray) -> IntOrArray:
    """
    Carry-less product reduced modulo the context polynomial.

    Works on Python ints and, elementwise with broadcasting, on integer
    ``numpy`` arrays.

    Raises:
        ValidationError: If an operand is not a field element.
    """
    ctx.check_element(x, "x")
    ctx.check_element(y, "y")
    vectorised = isinstance(x, np.ndarray) or isinstance(y, np.ndarray)
    a = np.asarray(x, dtype=np.int64) if vectorised else int(x)
    b = np.asarray(y, dtype=np.int64) if vectorised else int(y)
    if vectorised:
        a, b = np.broadcast_arrays(a, b)
        a, b = a.copy(), b.copy()
    res = a * 0
    top = ctx.order
    for _ in range(ctx.u):
        res = res ^ (a * (b & 1))
        a = a << 1
        a = a ^ (ctx.modulus * ((a & top) != 0))
        b = b >> 1
    return res


def gf_pow(ctx: GFContext, x: int, e: int) -> int:
    result, base = 1, int(x)
    while e:
        if e & 1:
            result = gf_mul(ctx, result, base)
        base = gf_mul(ctx, base, base)
        e >>= 1
    return result


def gf_inv(ctx: GFContext, x: int) -> int:
    """Multiplicative inverse x^{2^u − 2}."""
    if int(x) == 0:
        raise ValidationError("0 has no multiplicative inverse.")
    return gf_pow(ctx, x, ctx.order - 2)


# ── Hash family ─────────────────────────────────────────────────

@dataclass(frozen=True)
class AffineHash:
    """
    One member h(x) = [a·x + b]_v of the affine family.

    Attributes:
        ctx: Field context (fixes u and the modulus).
        v:   Output width, 1 ≤ v ≤ u.
        a:   Multiplier.
        b:   Offset.
    """
    ctx: GFContext
    v: int
    a: int
    b: int

    def __post_init__(self):
        if not 1 <= self.v <= self.ctx.u:
            raise ValidationError(f"Output width v={self.v} outside [1, u={self.ctx.u}].")
        self.ctx.check_element(self.a, "a")
        self.ctx.check_element(self.b, "b")

    @property
    def u(self) -> int:
        return self.ctx.u

    @property
    def output_size(self) -> int:
        return 1 << self.v

    def __call__(self, x: IntOrArray) -> IntOrArray:
        return eval_hash(self, x)

    def table(self) -> np.ndarray:
        """h(x) for every x in GF(2^u), as an int array."""
        return eval_hash(self, np.arange(self.ctx.order, dtype=np.int64))

    def to_dict(self) -> Dict[str, int]:
        return {"u": self.ctx.u, "v": self.v, "modulus": self.ctx.modulus,
                "a": self.a, "b": self.b}


def eval_hash(h: AffineHash, x: IntOrArray) -> IntOrArray:
    """The v most significant bits of a·x + b."""
    y = gf_add(gf_mul(h.ctx, h.a, x), h.b)
    return y >> (h.ctx.u - h.v)


def is_balanced(h: AffineHash) -> bool:
    """True iff every output has exactly 2^{u−v} preimages."""
    counts = np.bincount(h.table(), minlength=h.output_size)
    return bool(np.all(counts == 1 << (h.ctx.u - h.v)))


class HashFamily:
    """
    The full family {(a, b)} in a-major, b-minor order.

    Supports ``len``, indexing, iteration, and chunked iteration for
    parallel consumers; members are built on demand.
    """

    def __init__(self, ctx: GFContext, v: int):
        self._ctx = ctx
        self._v = int(v)
        AffineHash(ctx, self._v, 0, 0)  # validates v

    @property
    def ctx(self) -> GFContext:
        return self._ctx

    @property
    def v(self) -> int:
        return self._v

    def __len__(self) -> int:
        return self._ctx.order ** 2

    def __getitem__(self, index: int) -> AffineHash:
        if not 0 <= index < len(self):
            raise IndexError(index)
        a, b = divmod(int(index), self._ctx.order)
        return AffineHash(self._ctx, self._v, a, b)

    def __iter__(self) -> Iterator[AffineHash]:
        for index in range(len(self)):
            yield self[index]

    def chunks(self, size: int) -> Iterator[Tuple[int, int]]:
        """Yield (start, stop) index ranges covering the family."""
        size = max(1, int(size))
        for start in range(0, len(self), size):
            yield start, min(start + size, len(self))

    def outputs_for_multiplier(self, a: int) -> np.ndarray:
        """Table [b, x] → h_{a,b}(x) for all offsets b at once."""
        xs = np.arange(self._ctx.order, dtype=np.int64)
        ax = gf_mul(self._ctx, np.full_like(xs, int(a)), xs)
        bs = np.arange(self._ctx.order, dtype=np.int64)[:, None]
        return (ax[None, :] ^ bs) >> (self._ctx.u - self._v)

    def __repr__(self) -> str:
        return f"HashFamily(u={self._ctx.u}, v={self._v}, size={len(self)})"


def enumerate_family(ctx: GFContext, v: int, max_u: int = ENUMERATE_U_LIMIT) -> HashFamily:
    """
    All 2^{2u} affine hashes.

    Raises:
        CapacityError: If u exceeds the enumeration limit (use ``sample_hash``).
    """
    if ctx.u > max_u:
        raise CapacityError(
            f"Family enumeration needs u ≤ {max_u} (got u={ctx.u}); sample hashes instead."
        )
    return HashFamily(ctx, v)


@dataclass(frozen=True)
class UniversalityTable:
    """
    Exact pair-collision counts.

    Attributes:
        counts:   Integer array [x, x', z, z'] → #{(a,b) : h(x)=z ∧ h(x')=z'};
                  the diagonal x = x' is zeroed and excluded.
        expected: 2^{2u} / 2^{2v}, the count strong 2-universality requires.
    """
    u: int
    v: int
    counts: np.ndarray
    expected: int

    def off_diagonal(self) -> np.ndarray:
        n = self.counts.shape[0]
        mask = ~np.eye(n, dtype=bool)
        return self.counts[mask]

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.off_diagonal() == self.expected))


def universality_check(ctx: GFContext, v: int,
                       max_u: int = UNIVERSALITY_U_LIMIT) -> UniversalityTable:
    """
    Count, for every x ≠ x' and every output pair (z, z'), the family members
    with h(x) = z and h(x') = z'.  Integer arithmetic only.

    Raises:
        CapacityError: For u above ``max_u``.
    """
    if ctx.u > max_u:
        raise CapacityError(f"Exhaustive universality check needs u ≤ {max_u} (got u={ctx.u}).")
    family = HashFamily(ctx, v)
    nx, nz = ctx.order, 1 << v
    outputs = np.concatenate([family.outputs_for_multiplier(a) for a in range(nx)])  # [hash, x]

    counts = np.zeros((nx, nx, nz, nz), dtype=np.uint32)
    for x in range(nx):
        cell = outputs[:, x][:, None] * nz + outputs                     # [hash, x'] → z·|Z| + z'
        flat = (np.arange(nx)[None, :] * nz * nz + cell).ravel()
        counts[x] = np.bincount(flat, minlength=nx * nz * nz).reshape(nx, nz, nz)
        counts[x, x] = 0
    return UniversalityTable(u=ctx.u, v=v, counts=counts, expected=(nx * nx) // (nz * nz))


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def sample_hash(ctx: GFContext, v: int, seed: int) -> AffineHash:
    """Uniform (a, b) from a counter-based generator; reproducible per seed."""
    a, b = _generator(seed).integers(0, ctx.order, size=2)
    return AffineHash(ctx, v, int(a), int(b))


def sample_hashes(ctx: GFContext, v: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniform (a, b) pairs as an int array of shape (count, 2)."""
    return _generator(seed).integers(0, ctx.order, size=(int(count), 2), dtype=np.int64)


def balanced_fraction(family: HashFamily) -> Fraction:
    """Exact fraction of balanced members, counted over every (a, b)."""
    per_output = 1 << (family.ctx.u - family.v)
    balanced = 0
    for a in range(family.ctx.order):
        table = family.outputs_for_multiplier(a)
        for row in table:
            balanced += bool(np.all(np.bincount(row, minlength=1 << family.v) == per_output))
    return Fraction(balanced, len(family))
