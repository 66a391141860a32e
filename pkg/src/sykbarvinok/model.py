"""
SYK instances, local observables and the perturbed Hamiltonian ``H0 + lambda O``.

Couplings are drawn reproducibly from a seed: q-subsets are visited in
colexicographic order, and each consecutive pair of subsets consumes one
Box-Muller pair built from two 64-bit words of a Philox4x64 stream keyed by
the seed (counter starting at zero).  Word ``w`` becomes a uniform via its top
53 bits: ``u1 = ((w >> 11) + 1) / 2**53`` in ``(0, 1]`` for the radius and
``u2 = (w >> 11) / 2**53`` in ``[0, 1)`` for the angle.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import IndexOutOfRange, InvalidLocality, InvalidParity
from .majorana import MAX_MODES, SparseOperator

__all__ = [
    "SykInstance",
    "Observable",
    "coupling_variance",
    "colex_subsets",
    "subset_masks",
    "gaussian_stream",
    "sample_instance",
    "sample_couplings",
    "build_hamiltonian",
    "observable_stats",
    "parse_observable",
    "dump_instance",
    "load_instance",
    "dump_observable",
    "load_observable",
]

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)
_TWO_53 = float(1 << 53)


def coupling_variance(n: int, q: int) -> float:
    """``sigma^2 = (q-1)! / n^(q-1)``."""
    return math.factorial(q - 1) / float(n) ** (q - 1)


def _validate_nq(n: int, q: int) -> None:
    if n % 2:
        raise InvalidParity(f"mode count n must be even, got {n}")
    if q % 2:
        raise InvalidParity(f"locality q must be even, got {q}")
    if q < 2 or q > n:
        raise InvalidLocality(f"need 2 <= q <= n, got q={q}, n={n}")
    if n > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes supported, got {n}")


@lru_cache(maxsize=64)
def colex_subsets(n: int, q: int) -> tuple[tuple[int, ...], ...]:
    """All ascending q-subsets of ``range(n)`` in colexicographic order."""
    return tuple(sorted(combinations(range(n), q), key=lambda s: s[::-1]))


@lru_cache(maxsize=64)
def _subset_masks(n: int, q: int) -> np.ndarray:
    masks = np.array(
        [sum(1 << i for i in s) for s in colex_subsets(n, q)], dtype=np.uint64
    )
    masks.flags.writeable = False
    return masks


def subset_masks(n: int, q: int) -> np.ndarray:
    """Bitmasks of :func:`colex_subsets`, same order (read-only array)."""
    return _subset_masks(n, q)


def gaussian_stream(seed: int, count: int) -> np.ndarray:
    """First ``count`` standard normals of the seeded Box-Muller stream."""
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    pairs = (count + 1) // 2
    words = np.random.Philox(key=seed).random_raw(2 * pairs).reshape(pairs, 2)
    top = words >> np.uint64(11)
    u1 = (top[:, 0].astype(np.float64) + 1.0) / _TWO_53
    u2 = top[:, 1].astype(np.float64) / _TWO_53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


@dataclass(frozen=True, eq=False)
class SykInstance:
    """One disorder realisation ``H0 = sum_I J_I psi_I``.

    ``values[k]`` is the coupling of ``subsets[k]``; subsets are in colex order.
    """

    n: int
    q: int
    seed: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _validate_nq(self.n, self.q)
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        expected = math.comb(self.n, self.q)
        if vals.size != expected:
            raise ValueError(f"expected {expected} couplings, got {vals.size}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def subsets(self) -> tuple[tuple[int, ...], ...]:
        return colex_subsets(self.n, self.q)

    @property
    def masks(self) -> np.ndarray:
        return subset_masks(self.n, self.q)

    @property
    def couplings(self) -> dict[tuple[int, ...], float]:
        return dict(zip(self.subsets, self.values.tolist()))

    @property
    def sigma2(self) -> float:
        return coupling_variance(self.n, self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SykInstance):
            return NotImplemented
        return (
            (self.n, self.q, self.seed) == (other.n, other.q, other.seed)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def sample_couplings(n: int, q: int, seed: int) -> np.ndarray:
    count = math.comb(n, q)
    return math.sqrt(coupling_variance(n, q)) * gaussian_stream(seed, count)


def sample_instance(n: int, q: int, seed: int) -> SykInstance:
    """Draw ``J_I ~ N(0, (q-1)!/n^(q-1))`` for every q-subset, deterministically."""
    _validate_nq(n, q)
    if q < 4:
        warnings.warn(f"q={q} is below the model's q >= 4 regime", stacklevel=2)
    return SykInstance(n, q, int(seed), sample_couplings(n, q, seed))


@dataclass(frozen=True)
class Observable:
    """``O = sum_a c_a psi_{A_a}`` with real ``c_a`` and even-size ascending ``A_a``."""

    terms: tuple[tuple[float, tuple[int, ...]], ...]

    def __init__(self, terms: Iterable[tuple[float, Sequence[int]]] = ()):
        clean = []
        for c, sites in terms:
            if isinstance(c, complex) or np.iscomplexobj(c):
                raise TypeError("observable coefficients must be real")
            sites = tuple(int(s) for s in sites)
            if any(b <= a for a, b in zip(sites, sites[1:])):
                raise ValueError(f"sites must be strictly ascending, got {sites}")
            if sites and sites[0] < 0:
                raise IndexOutOfRange(f"negative site in {sites}")
            if len(sites) % 2:
                raise InvalidParity(f"observable term {sites} has odd size")
            clean.append((float(c), sites))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def gamma(self) -> float:
        return observable_stats(self)[0]

    @property
    def locality(self) -> int:
        return observable_stats(self)[1]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    def masks(self) -> np.ndarray:
        return np.array([sum(1 << i for i in s) for _, s in self.terms], dtype=np.uint64)

    def max_site(self) -> int:
        return max((s[-1] for _, s in self.terms if s), default=-1)

    def __len__(self) -> int:
        return len(self.terms)


def observable_stats(obs: Observable) -> tuple[float, int]:
    """``(Gamma, L)``: maximal per-site absolute weight and maximal term size."""
    weight: dict[int, float] = {}
    for c, sites in obs.terms:
        for x in sites:
            weight[x] = weight.get(x, 0.0) + abs(c)
    gamma = max(weight.values(), default=0.0)
    locality = max((len(s) for _, s in obs.terms), default=0)
    return gamma, locality


def build_hamiltonian(
    inst: SykInstance, obs: Observable | None = None, lam: float = 0.0
) -> SparseOperator:
    """``sum_I J_I psi_I + lam * sum_a c_a psi_{A_a}`` as a sparse operator."""
    n = inst.n
    phase = _I_POWERS[(inst.q // 2) % 4]
    masks = [inst.masks]
    coeffs = [inst.values * phase]
    if obs is not None and len(obs):
        if obs.max_site() >= n:
            raise IndexOutOfRange(f"observable site {obs.max_site()} outside [0, {n})")
        om = obs.masks()
        oc = np.array(
            [lam * c * _I_POWERS[(len(s) // 2) % 4] for c, s in obs.terms],
            dtype=np.complex128,
        )
        masks.append(om)
        coeffs.append(oc)
    return SparseOperator(n, np.concatenate(masks), np.concatenate(coeffs))


def parse_observable(text: str) -> Observable:
    """Parse ``"c:i,j;c:i,j,k,l"`` into an observable (``c:`` alone is the identity)."""
    terms = []
    for chunk in text.replace(" ", "").split(";"):
        if not chunk:
            continue
        coeff, _, sites = chunk.partition(":")
        idx = [int(s) for s in sites.split(",") if s != ""]
        terms.append((float(coeff), idx))
    return Observable(terms)


def _fmt(x: float, hex_floats: bool) -> str:
    return float(x).hex() if hex_floats else repr(float(x))


def dump_instance(inst: SykInstance, fp: TextIO | None = None, *, hex_floats: bool = True):
    """Write ``n q seed`` then one ``i1,...,iq value`` line per coupling.

    Returns the text when ``fp`` is None.
    """
    buf = io.StringIO() if fp is None else fp
    buf.write(f"{inst.n} {inst.q} {inst.seed}\n")
    for s, v in zip(inst.subsets, inst.values):
        buf.write(",".join(map(str, s)) + " " + _fmt(v, hex_floats) + "\n")
    if fp is None:
        return buf.getvalue()


def _parse_float(tok: str) -> float:
    return float.fromhex(tok) if "0x" in tok.lower() else float(tok)


def load_instance(fp: TextIO | str) -> SykInstance:
    lines = (fp.splitlines() if isinstance(fp, str) else fp.read().splitlines())
    lines = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    n, q, seed = (int(t) for t in lines[0].split())
    lookup = {s: k for k, s in enumerate(colex_subsets(n, q))}
    values = np.full(len(lookup), np.nan)
    for ln in lines[1:]:
        sites, val = ln.split()
        key = tuple(int(t) for t in sites.split(","))
        if key not in lookup:
            raise ValueError(f"{key} is not an ascending {q}-subset of [{n}]")
        values[lookup[key]] = _parse_float(val)
    if np.isnan(values).any():
        raise ValueError("instance file is missing couplings")
    return SykInstance(n, q, seed, values)


def dump_observable(obs: Observable, fp: TextIO | None = None, *, hex_floats: bool = True):
    """Write the term count, then ``i1,...,ik value`` per term (``-`` for no sites)."""
    buf = io.StringIO() if fp is None else fp
    buf.write(f"{len(obs)}\n")
    for c, s in obs.terms:
        buf.write((",".join(map(str, s)) or "-") + " " + _fmt(c, hex_floats) + "\n")
    if fp is None:
        return buf.getvalue()


def load_observable(fp: TextIO | str) -> Observable:
    lines = (fp.splitlines() if isinstance(fp, str) else fp.read().splitlines())
    lines = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    count = int(lines[0])
    terms = []
    for ln in lines[1 : 1 + count]:
        sites, val = ln.split()
        idx = [] if sites == "-" else [int(t) for t in sites.split(",")]
        terms.append((_parse_float(val), idx))
    if len(terms) != count:
        raise ValueError(f"expected {count} observable terms, found {len(terms)}")
    return Observable(terms)
