"""
Majorana string algebra on bitmasks.

Generators satisfy ``{psi_i, psi_j} = delta_ij`` so that ``psi_i**2 = 1/2``.
A string is stored as an ``n``-bit mask (bit ``i`` set when ``psi_i`` is
present) together with a complex coefficient multiplying the *bare* ordered
product ``psi_{i_1} ... psi_{i_k}`` with ``i_1 < ... < i_k``.  The physical
Hermitian string ``psi_I = i^{|I|/2} psi_{i_1} ... psi_{i_k}`` therefore has
coefficient ``i^{|I|/2}`` on mask ``I``.

Operators are linear combinations of strings, kept as two parallel numpy
arrays (sorted ``uint64`` masks, ``complex128`` coefficients) so that products
can be evaluated as vectorised outer operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import IndexOutOfRange, InvalidParity, ResultTooLarge

__all__ = [
    "MAX_MODES",
    "DEFAULT_TERM_CAP",
    "MajoranaTerm",
    "SparseOperator",
    "make_string",
    "indices_to_mask",
    "mask_to_indices",
    "term_product",
    "op_multiply",
    "normalized_trace",
    "adjoint",
    "pairwise_products",
]

MAX_MODES = 62
DEFAULT_TERM_CAP = 1 << 26

# Bin-count accumulation is used below this many modes (2**22 bins).
_DENSE_ACCUMULATE_MODES = 22
# Upper bound on the size of one outer-product block.
_BLOCK_ELEMENTS = 1 << 21

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def _check_modes(n: int) -> int:
    n = int(n)
    if n <= 0:
        raise ValueError(f"mode count must be positive, got {n}")
    if n > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes fit a 64-bit mask, got {n}")
    return n


def indices_to_mask(indices: Iterable[int], n: int) -> int:
    """Encode an index set as an integer bitmask, validating range."""
    mask = 0
    for i in indices:
        i = int(i)
        if i < 0 or i >= n:
            raise IndexOutOfRange(f"mode index {i} outside [0, {n})")
        mask |= 1 << i
    return mask


def mask_to_indices(mask: int) -> tuple[int, ...]:
    mask = int(mask)
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class MajoranaTerm:
    """A single canonical string: ``coeff * psi_{i_1} ... psi_{i_k}``."""

    mask: int
    coeff: complex
    n: int

    @property
    def indices(self) -> tuple[int, ...]:
        return mask_to_indices(self.mask)

    @property
    def weight(self) -> int:
        return int(self.mask).bit_count()


def make_string(indices: Iterable[int], n: int) -> MajoranaTerm:
    """Return the Hermitian string ``psi_I = i^{|I|/2} psi_{i_1} ... psi_{i_q}``.

    Parameters
    ----------
    indices : iterable of int
        Strictly ascending mode indices, even in number.
    n : int
        Number of Majorana modes.
    """
    n = _check_modes(n)
    idx = [int(i) for i in indices]
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices must be strictly ascending, got {idx}")
    if len(idx) % 2:
        raise InvalidParity(f"string must have even length, got {len(idx)}")
    mask = indices_to_mask(idx, n)
    return MajoranaTerm(mask, _I_POWERS[(len(idx) // 2) % 4], n)


def _reorder_parity(a: int, b: int) -> int:
    """Parity of transpositions needed to bring ``psi_a psi_b`` to canonical order.

    Each generator ``j`` of ``b`` moves left past every generator of ``a``
    with a strictly larger index.
    """
    parity = 0
    bb = b
    while bb:
        low = bb & -bb
        j = low.bit_length() - 1
        parity ^= (a >> (j + 1)).bit_count() & 1
        bb ^= low
    return parity


def term_product(a: MajoranaTerm, b: MajoranaTerm) -> MajoranaTerm:
    if a.n != b.n:
        raise ValueError(f"mode counts differ: {a.n} != {b.n}")
    sign = -1.0 if _reorder_parity(a.mask, b.mask) else 1.0
    shared = (a.mask & b.mask).bit_count()
    coeff = a.coeff * b.coeff * sign * 2.0 ** (-shared)
    return MajoranaTerm(a.mask ^ b.mask, coeff, a.n)


def _greater_parity_masks(masks: np.ndarray, n: int) -> np.ndarray:
    """Bit ``j`` of the output is the parity of ``#{i in mask : i > j}``."""
    out = np.zeros_like(masks)
    running = np.zeros_like(masks)
    one = np.uint64(1)
    for j in range(n - 1, -1, -1):
        shift = np.uint64(j)
        out |= running << shift
        running ^= (masks >> shift) & one
    return out


def pairwise_products(ma, ca, mb, cb, n):
    """Elementwise product of two aligned arrays of strings.

    Returns ``(masks, coeffs)`` with ``masks[k], coeffs[k]`` the canonical
    form of ``(ca[k] psi_{ma[k]}) (cb[k] psi_{mb[k]})``.  Inputs broadcast.
    """
    ma = np.asarray(ma, dtype=np.uint64)
    mb = np.asarray(mb, dtype=np.uint64)
    ga = _greater_parity_masks(ma, n)
    parity = np.bitwise_count(mb & ga) & 1
    shared = np.bitwise_count(ma & mb)
    coeff = np.asarray(ca) * np.asarray(cb)
    coeff = coeff * (1.0 - 2.0 * parity) * np.ldexp(1.0, -shared.astype(np.int64))
    return ma ^ mb, coeff


class SparseOperator:
    """Linear combination of canonical Majorana strings.

    Masks are stored sorted and unique; no stored coefficient is exactly zero.
    Instances are treated as immutable values.
    """

    __slots__ = ("n", "masks", "coeffs")

    def __init__(self, n: int, masks=(), coeffs=(), *, _trusted: bool = False):
        self.n = _check_modes(n)
        masks = np.asarray(masks, dtype=np.uint64).reshape(-1)
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if masks.shape != coeffs.shape:
            raise ValueError("masks and coeffs must have equal length")
        if not _trusted:
            if masks.size and self.n < 64 and int(masks.max()) >> self.n:
                raise IndexOutOfRange(f"mask exceeds {self.n} modes")
            masks, coeffs = _reduce(masks, coeffs)
        masks.flags.writeable = False
        coeffs.flags.writeable = False
        self.masks = masks
        self.coeffs = coeffs

    @classmethod
    def identity(cls, n: int, scale: complex = 1.0) -> "SparseOperator":
        return cls(n, [0], [scale])

    @classmethod
    def zero(cls, n: int) -> "SparseOperator":
        return cls(n)

    @classmethod
    def from_terms(cls, n: int, terms) -> "SparseOperator":
        """Build from ``MajoranaTerm`` objects or a ``{mask: coeff}`` mapping."""
        if isinstance(terms, Mapping):
            items = list(terms.items())
            return cls(n, [m for m, _ in items], [c for _, c in items])
        terms = list(terms)
        for t in terms:
            if t.n != n:
                raise ValueError(f"term has {t.n} modes, operator has {n}")
        return cls(n, [t.mask for t in terms], [t.coeff for t in terms])

    @property
    def terms(self) -> dict[int, complex]:
        return {int(m): complex(c) for m, c in zip(self.masks, self.coeffs)}

    def __len__(self) -> int:
        return int(self.masks.size)

    def __iter__(self):
        for m, c in zip(self.masks, self.coeffs):
            yield MajoranaTerm(int(m), complex(c), self.n)

    def coefficient(self, mask: int) -> complex:
        k = np.searchsorted(self.masks, np.uint64(mask))
        if k < self.masks.size and int(self.masks[k]) == int(mask):
            return complex(self.coeffs[k])
        return 0j

    def is_even(self) -> bool:
        return bool(np.all(np.bitwise_count(self.masks) % 2 == 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.masks, other.masks)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        if not isinstance(other, SparseOperator):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("mode counts differ")
        return SparseOperator(
            self.n,
            np.concatenate([self.masks, other.masks]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(self.n, self.masks.copy(), -self.coeffs, _trusted=True)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + (-other)

    def __mul__(self, scalar) -> "SparseOperator":
        if isinstance(scalar, SparseOperator):
            return NotImplemented
        return SparseOperator(self.n, self.masks, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        return op_multiply(self, other)

    def __repr__(self) -> str:
        return f"SparseOperator(n={self.n}, terms={len(self)})"


def _reduce(masks: np.ndarray, coeffs: np.ndarray):
    """Sum coefficients of equal masks, sort by mask, drop exact zeros."""
    if masks.size == 0:
        return masks.copy(), coeffs.copy()
    uniq, inv = np.unique(masks, return_inverse=True)
    re = np.bincount(inv, weights=coeffs.real, minlength=uniq.size)
    im = np.bincount(inv, weights=coeffs.imag, minlength=uniq.size)
    keep = (re != 0.0) | (im != 0.0)
    return uniq[keep], (re + 1j * im)[keep]


def op_multiply(
    a: SparseOperator,
    b: SparseOperator,
    *,
    term_cap: int = DEFAULT_TERM_CAP,
    prune: float | None = None,
) -> SparseOperator:
    """Product ``a @ b`` distributed over all pairs of strings.

    Parameters
    ----------
    term_cap : int
        Maximum number of distinct masks allowed in the result.
    prune : float, optional
        Drop result coefficients with modulus below this value.  Off by
        default; exact moments require it to stay off.
    """
    if a.n != b.n:
        raise ValueError(f"mode counts differ: {a.n} != {b.n}")
    n = a.n
    if len(a) == 0 or len(b) == 0:
        return SparseOperator(n)

    rows = max(1, _BLOCK_ELEMENTS // len(b))
    ga_all = _greater_parity_masks(a.masks, n)
    mb = b.masks[None, :]
    cb = b.coeffs[None, :]
    dense = n <= _DENSE_ACCUMULATE_MODES
    if dense:
        re = np.zeros(1 << n)
        im = np.zeros(1 << n)
    else:
        parts_m, parts_c = [], []

    for start in range(0, len(a), rows):
        ma = a.masks[start : start + rows, None]
        ca = a.coeffs[start : start + rows, None]
        ga = ga_all[start : start + rows, None]
        parity = np.bitwise_count(mb & ga) & 1
        shared = np.bitwise_count(ma & mb).astype(np.int64)
        coeff = (ca * cb) * ((1.0 - 2.0 * parity) * np.ldexp(1.0, -shared))
        masks = (ma ^ mb).ravel()
        coeff = coeff.ravel()
        if dense:
            idx = masks.astype(np.intp)
            re += np.bincount(idx, weights=coeff.real, minlength=1 << n)
            im += np.bincount(idx, weights=coeff.imag, minlength=1 << n)
        else:
            m, c = _reduce(masks, coeff)
            parts_m.append(m)
            parts_c.append(c)
            if sum(p.size for p in parts_m) > 4 * term_cap:
                m, c = _reduce(np.concatenate(parts_m), np.concatenate(parts_c))
                parts_m, parts_c = [m], [c]

    if dense:
        idx = np.flatnonzero((re != 0.0) | (im != 0.0))
        masks, coeffs = idx.astype(np.uint64), re[idx] + 1j * im[idx]
    else:
        masks, coeffs = _reduce(np.concatenate(parts_m), np.concatenate(parts_c))

    if prune is not None:
        keep = np.abs(coeffs) >= prune
        masks, coeffs = masks[keep], coeffs[keep]
    if masks.size > term_cap:
        raise ResultTooLarge(
            f"product has {masks.size} distinct strings, cap is {term_cap}"
        )
    return SparseOperator(n, masks, coeffs, _trusted=True)


def normalized_trace(a: SparseOperator) -> complex:
    """``(1/d) Tr a``: the identity coefficient, since other strings are traceless."""
    return a.coefficient(0)


def adjoint(a: SparseOperator) -> SparseOperator:
    """Hermitian conjugate.  Reversing ``k`` generators costs ``(-1)^{k(k-1)/2}``."""
    k = np.bitwise_count(a.masks).astype(np.int64)
    sign = np.where((k * (k - 1) // 2) % 2 == 1, -1.0, 1.0)
    return SparseOperator(a.n, a.masks.copy(), np.conj(a.coeffs) * sign, _trusted=True)
