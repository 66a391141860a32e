"""
Dense Jordan-Wigner oracle for small systems.

Mode ``2k`` maps to ``Z^{(x)k} X I...`` and mode ``2k+1`` to ``Z^{(x)k} Y I...``
(each scaled by ``1/sqrt(2)``), with qubit 0 as the leftmost tensor factor.
Every Majorana string is then a Pauli string ``i^p X^x Z^z`` times a power
of ``1/sqrt(2)``, i.e. a phased permutation matrix, which lets dense
matrices be assembled by scatter-adding one entry per row and term.

All thermal quantities are computed from the eigenvalues of a Hermitian
matrix; matrix exponentials are never formed directly.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .errors import IndexOutOfRange, InvalidParity, TooLargeForDense
from .majorana import SparseOperator

__all__ = [
    "DENSE_MAX_MODES",
    "jw_pauli",
    "jw_generator",
    "to_dense",
    "dense_strings",
    "spectrum",
    "partition_function",
    "log_partition_function",
    "gibbs_state",
    "gibbs_expectation",
    "string_expectations",
    "spectral_norm",
]

DENSE_MAX_MODES = 20

_PHASES = np.array([1, 1j, -1, -1j], dtype=np.complex128)
_CHUNK = 1 << 22


def _check_dense(n: int, max_modes: int) -> int:
    if n % 2:
        raise InvalidParity(f"Jordan-Wigner needs an even mode count, got {n}")
    if n > max_modes:
        raise TooLargeForDense(
            f"n={n} exceeds dense cap of {max_modes} modes (dim {2 ** (max_modes // 2)})"
        )
    return n // 2


def jw_pauli(masks, n: int):
    """Pauli form of the bare ordered products ``prod_{j in mask} psi_j``.

    Returns
    -------
    x, z : ndarray of uint64
        Bit-flip and phase-flip patterns in basis-index bit order.
    phase : ndarray of int64
        Exponent ``p`` (mod 4) such that the string equals
        ``2^{-k/2} i^p X^x Z^z`` with ``k`` the mask popcount.
    """
    masks = np.asarray(masks, dtype=np.uint64)
    nq = n // 2
    x = np.zeros_like(masks)
    z = np.zeros_like(masks)
    phase = np.zeros(masks.shape, dtype=np.int64)
    one = np.uint64(1)
    for j in range(n):
        k = j // 2
        pos = nq - 1 - k
        gx = one << np.uint64(pos)
        # Z on qubits 0..k-1, i.e. basis bits above ``pos``.
        gz = np.uint64(((1 << nq) - 1) ^ ((1 << (pos + 1)) - 1))
        gp = 0
        if j % 2:
            gz |= gx
            gp = 1
        sel = ((masks >> np.uint64(j)) & one).astype(bool)
        if not sel.any():
            continue
        flip = (np.bitwise_count(z & gx) & 1).astype(np.int64)
        phase = np.where(sel, phase + gp + 2 * flip, phase)
        x = np.where(sel, x ^ gx, x)
        z = np.where(sel, z ^ gz, z)
    return x, z, phase % 4


def to_dense(op: SparseOperator, *, max_modes: int = DENSE_MAX_MODES) -> np.ndarray:
    """Dense ``2^{n/2} x 2^{n/2}`` matrix of a sparse Majorana operator."""
    nq = _check_dense(op.n, max_modes)
    dim = 1 << nq
    out_re = np.zeros(dim * dim)
    out_im = np.zeros(dim * dim)
    if len(op) == 0:
        return np.zeros((dim, dim), dtype=np.complex128)
    x, z, p = jw_pauli(op.masks, op.n)
    weight = np.bitwise_count(op.masks).astype(np.int64)
    amp = op.coeffs * _PHASES[p] * np.power(2.0, -0.5 * weight)
    b = np.arange(dim, dtype=np.uint64)
    step = max(1, _CHUNK // dim)
    for s in range(0, len(op), step):
        xs, zs, a = x[s : s + step, None], z[s : s + step, None], amp[s : s + step, None]
        sign = 1.0 - 2.0 * (np.bitwise_count(zs & b[None, :]) & 1)
        vals = (a * sign).ravel()
        rows = (xs ^ b[None, :]).astype(np.intp)
        flat = (rows * dim + b[None, :].astype(np.intp)).ravel()
        out_re += np.bincount(flat, weights=vals.real, minlength=dim * dim)
        out_im += np.bincount(flat, weights=vals.imag, minlength=dim * dim)
    return (out_re + 1j * out_im).reshape(dim, dim)


def jw_generator(i: int, n: int, *, max_modes: int = DENSE_MAX_MODES) -> np.ndarray:
    """Dense matrix of the bare generator ``psi_i``."""
    if i < 0 or i >= n:
        raise IndexOutOfRange(f"mode index {i} outside [0, {n})")
    return to_dense(SparseOperator(n, [1 << i], [1.0]), max_modes=max_modes)


def dense_strings(masks, coeffs, n: int, *, max_modes: int = DENSE_MAX_MODES) -> np.ndarray:
    """Stack of dense matrices ``coeffs[t] * psi_{masks[t]}``, shape ``(T, d, d)``."""
    nq = _check_dense(n, max_modes)
    dim = 1 << nq
    masks = np.asarray(masks, dtype=np.uint64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    x, z, p = jw_pauli(masks, n)
    weight = np.bitwise_count(masks).astype(np.int64)
    amp = coeffs * _PHASES[p] * np.power(2.0, -0.5 * weight)
    b = np.arange(dim, dtype=np.uint64)
    out = np.zeros((masks.size, dim, dim), dtype=np.complex128)
    sign = 1.0 - 2.0 * (np.bitwise_count(z[:, None] & b[None, :]) & 1)
    rows = (x[:, None] ^ b[None, :]).astype(np.intp)
    t = np.arange(masks.size)[:, None]
    out[t, rows, b[None, :].astype(np.intp)] = amp[:, None] * sign
    return out


def spectrum(h: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    return np.linalg.eigvalsh(h)


def _energies(h) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim == 1:
        return h.astype(float)
    return spectrum(h)


def partition_function(h, beta):
    """Normalized partition function ``(1/d) sum_j exp(-beta E_j)``.

    ``h`` is either a Hermitian matrix or its eigenvalues.  ``beta`` may be
    complex and array-valued.
    """
    e = _energies(h)
    beta = np.asarray(beta)
    vals = np.exp(-np.multiply.outer(beta, e)).mean(axis=-1)
    return vals if vals.ndim else vals[()]


def log_partition_function(h, beta):
    """``log Zhat(beta)`` on the branch continuous from ``log Zhat(0) = 0``.

    Near ``beta = 0`` uses ``log1p(mean(expm1(-beta E)))`` so small values keep
    full absolute precision; otherwise falls back to a shifted log-sum-exp
    (real ``beta``) or the principal complex logarithm.
    """
    e = _energies(h)
    beta = np.asarray(beta)
    scalar = beta.ndim == 0
    beta = np.atleast_1d(beta)
    out = np.empty(beta.shape, dtype=np.result_type(beta.dtype, float))
    for k, b in np.ndenumerate(beta):
        s = np.expm1(-b * e).mean()
        if abs(s) < 0.5:
            out[k] = np.log1p(s)
        elif np.isrealobj(b) or np.imag(b) == 0:
            out[k] = logsumexp(-np.real(b) * e) - np.log(e.size)
        else:
            out[k] = np.log(np.exp(-b * e).mean())
    return out[0] if scalar else out


def gibbs_state(h: np.ndarray, beta: float) -> np.ndarray:
    e, v = np.linalg.eigh(h)
    w = -beta * e
    p = np.exp(w - w.max())
    p /= p.sum()
    return (v * p) @ v.conj().T


def gibbs_expectation(h: np.ndarray, o: np.ndarray, beta: float) -> float:
    """``Tr(O exp(-beta H)) / Tr exp(-beta H)`` via the eigenbasis of ``H``."""
    e, v = np.linalg.eigh(h)
    w = -beta * e
    p = np.exp(w - w.max())
    p /= p.sum()
    diag = np.einsum("ji,jk,ki->i", v.conj(), o, v)
    val = np.dot(p, diag)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def string_expectations(rho: np.ndarray, masks, n: int) -> np.ndarray:
    """``Tr(psi_I rho)`` for every Hermitian string ``psi_I`` with ``I`` in ``masks``."""
    masks = np.asarray(masks, dtype=np.uint64)
    dim = rho.shape[0]
    x, z, p = jw_pauli(masks, n)
    weight = np.bitwise_count(masks).astype(np.int64)
    herm_phase = _PHASES[(weight // 2) % 4]
    amp = herm_phase * _PHASES[p] * np.power(2.0, -0.5 * weight)
    b = np.arange(dim, dtype=np.uint64)
    out = np.empty(masks.size, dtype=np.complex128)
    step = max(1, _CHUNK // dim)
    for s in range(0, masks.size, step):
        xs, zs = x[s : s + step, None], z[s : s + step, None]
        sign = 1.0 - 2.0 * (np.bitwise_count(zs & b[None, :]) & 1)
        cols = (xs ^ b[None, :]).astype(np.intp)
        # M[b^x, b] rho[b, b^x] summed over b
        vals = rho[b[None, :].astype(np.intp), cols] * sign
        out[s : s + step] = amp[s : s + step] * vals.sum(axis=1)
    return out.real


def spectral_norm(h) -> float:
    e = _energies(h)
    return float(np.max(np.abs(e)))
