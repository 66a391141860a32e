"""
Disorder averages of SYK moments.

Exact averages expand ``E tr(H^m)`` over slot labellings ``eta`` (coupling vs
observable slot), Wick pairings ``pi`` of the coupling slots, one q-subset per
pair and one observable term per observable slot.  Every configuration
contributes ``sigma^{#0} lambda^{#1} prod c_a tr(X_1 ... X_m)``.  Two-replica
averages ``E[tr(H^l1) tr(H^l2)]`` additionally label slots by replica and
divide by ``binom(l1 + l2, l1)``, the number of such labellings.

Monte Carlo averages draw instances with seeds ``seed, seed + 1, ...`` and
evaluate them densely.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded, InvalidParity, StatisticsTooFew, TooLargeForDense
from .majorana import pairwise_products
from .model import (
    Observable,
    colex_subsets,
    coupling_variance,
    sample_couplings,
    subset_masks,
)
from .model import SykInstance, build_hamiltonian
from .oracle import DENSE_MAX_MODES, dense_strings, gibbs_state, string_expectations, to_dense

__all__ = [
    "PAIRING_CAP",
    "DEFAULT_BUDGET",
    "double_factorial",
    "enumerate_pairings",
    "WickConfiguration",
    "IntersectionGraph",
    "intersection_graph",
    "random_configuration",
    "configuration_count",
    "annealed_trace_moment",
    "annealed_moments",
    "annealed_partition_series",
    "two_replica_moment",
    "connected_factorization_check",
    "instance_spectra",
    "monte_carlo_trace_moment",
    "monte_carlo_two_replica",
    "concentration_ratio",
    "local_fluctuations",
]

PAIRING_CAP = 12
DEFAULT_BUDGET = 10_000_000
_GRID_CHUNK = 1 << 20
_STACK_LIMIT = 1 << 23

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def enumerate_pairings(k2: int, *, cap: int = PAIRING_CAP) -> Iterator[tuple[tuple[int, int], ...]]:
    """Yield every perfect matching of ``range(k2)`` exactly once.

    The lowest unmatched element is paired with each later element in
    ascending order, recursively, so the order is deterministic.
    """
    if k2 % 2:
        raise InvalidParity(f"cannot pair an odd number of slots ({k2})")
    if k2 > cap:
        raise BudgetExceeded(
            f"pairing enumeration limited to {cap} slots, got {k2}",
            required=double_factorial(k2 - 1),
        )
    yield from _pairings(tuple(range(k2)))


def _pairings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        for tail in _pairings(remaining):
            yield ((first, partner),) + tail


@dataclass(frozen=True)
class WickConfiguration:
    """One term ``(eta, pi, mu, I, a)`` of a disorder-averaged moment.

    ``gaussian_sets`` maps each pair of ``pi`` to its q-subset and
    ``obs_indices`` maps each observable slot to a term index.  ``replica``
    is ``None`` for single-trace moments.
    """

    m: int
    eta: tuple[int, ...]
    pi: tuple[tuple[int, int], ...]
    gaussian_sets: dict = field(hash=False)
    obs_indices: dict = field(default_factory=dict, hash=False)
    replica: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.eta) != self.m:
            raise ValueError("eta must label every slot")
        zeros = [j for j in range(self.m) if self.eta[j] == 0]
        paired = sorted(x for p in self.pi for x in p)
        if paired != zeros:
            raise ValueError("pi must be a perfect matching of the coupling slots")
        if set(self.gaussian_sets) != set(self.pi):
            raise ValueError("every pair needs exactly one q-subset")
        ones = [j for j in range(self.m) if self.eta[j] == 1]
        if sorted(self.obs_indices) != ones:
            raise ValueError("every observable slot needs a term index")
        if self.replica is not None and (
            len(self.replica) != self.m or not set(self.replica) <= {1, 2}
        ):
            raise ValueError("replica must map every slot to 1 or 2")

    def slot_sites(self, obs: Observable | None = None) -> list[tuple[int, ...]]:
        sites: list[tuple[int, ...]] = [()] * self.m
        for pair, subset in self.gaussian_sets.items():
            for j in pair:
                sites[j] = tuple(subset)
        for j, a in self.obs_indices.items():
            if obs is None:
                raise ValueError("configuration has observable slots but no observable")
            sites[j] = obs.terms[a][1]
        return sites


@dataclass(frozen=True)
class IntersectionGraph:
    m: int
    edges: frozenset

    def components(self) -> list[list[int]]:
        if self.m == 0:
            return []
        rows = [u for u, v in self.edges]
        cols = [v for u, v in self.edges]
        adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.m, self.m))
        count, labels = connected_components(adj, directed=False)
        comps: dict[int, list[int]] = {}
        for j, lab in enumerate(labels):
            comps.setdefault(int(lab), []).append(j)
        return sorted(comps.values())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def intersection_graph(
    config: WickConfiguration, obs: Observable | None = None, variant: str = "auto"
) -> IntersectionGraph:
    """Support-intersection graph of a configuration.

    ``variant`` is ``"single"`` (one trace), ``"sep"`` (edges only within a
    replica) or ``"mix"`` (``"sep"`` plus cross-replica Wick-pair edges);
    ``"auto"`` picks ``"single"`` or ``"mix"`` from ``config.replica``.
    """
    if variant == "auto":
        variant = "single" if config.replica is None else "mix"
    if variant != "single" and config.replica is None:
        raise ValueError(f"variant {variant!r} needs replica labels")
    sites = [set(s) for s in config.slot_sites(obs)]
    edges = set()
    for u, v in itertools.combinations(range(config.m), 2):
        same = variant == "single" or config.replica[u] == config.replica[v]
        if same and sites[u] & sites[v]:
            edges.add((u, v))
    if variant == "mix":
        for u, v in config.pi:
            if config.replica[u] != config.replica[v]:
                edges.add((min(u, v), max(u, v)))
    return IntersectionGraph(config.m, frozenset(edges))


def random_configuration(
    n: int,
    q: int,
    m: int,
    rng: np.random.Generator,
    obs: Observable | None = None,
    replicas: bool = False,
) -> WickConfiguration:
    """Draw a uniformly random labelling, pairing and set assignment."""
    if m % 2 and (obs is None or not len(obs)):
        raise InvalidParity("an odd slot count needs observable slots")
    while True:
        if obs is not None and len(obs):
            eta = tuple(int(x) for x in rng.integers(0, 2, m))
        else:
            eta = (0,) * m
        if eta.count(0) % 2 == 0:
            break
    zeros = [j for j in range(m) if eta[j] == 0]
    perm = list(rng.permutation(zeros))
    pi = tuple(sorted(tuple(sorted((int(perm[2 * k]), int(perm[2 * k + 1])))) for k in range(len(perm) // 2)))
    subsets = colex_subsets(n, q)
    sets = {p: subsets[int(rng.integers(len(subsets)))] for p in pi}
    obs_idx = {j: int(rng.integers(len(obs))) for j in range(m) if eta[j] == 1}
    replica = tuple(int(x) for x in rng.integers(1, 3, m)) if replicas else None
    return WickConfiguration(m, eta, pi, sets, obs_idx, replica)


def _ordered_trace(items: Sequence[tuple[int, complex]], n: int) -> complex:
    """Normalized trace of an ordered product of ``(mask, coeff)`` strings."""
    mask, coeff = np.uint64(0), 1.0 + 0j
    for mk, c in items:
        mask, coeff = pairwise_products(mask, coeff, np.uint64(mk), c, n)
    return complex(coeff) if int(mask) == 0 else 0j


def _hermitian_string(sites: Sequence[int]) -> tuple[int, complex]:
    return sum(1 << i for i in sites), _I_POWERS[(len(sites) // 2) % 4]


def connected_factorization_check(
    config: WickConfiguration,
    n: int,
    obs: Observable | None = None,
    sigma: float = 1.0,
    lam: float = 1.0,
    *,
    rtol: float = 1e-10,
) -> bool:
    """Check that the weighted trace(s) of ``config`` factor over connected components.

    The left side is ``sigma^{#0} lambda^{#1} tr(W)`` (or ``tr(W_1) tr(W_2)``
    with replicas); the right side is the product over components of the
    same quantity restricted to each component, slot order preserved.
    """
    sites = config.slot_sites(obs)
    strings = [_hermitian_string(s) for s in sites]

    def weighted(slots: list[int]) -> complex:
        w = sigma ** sum(config.eta[j] == 0 for j in slots)
        w *= lam ** sum(config.eta[j] == 1 for j in slots)
        if config.replica is None:
            return w * _ordered_trace([strings[j] for j in slots], n)
        for b in (1, 2):
            w *= _ordered_trace([strings[j] for j in slots if config.replica[j] == b], n)
        return w

    lhs = weighted(list(range(config.m)))
    rhs = 1.0 + 0j
    for comp in intersection_graph(config, obs).components():
        rhs *= weighted(comp)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) <= rtol * scale


def configuration_count(
    n: int,
    q: int,
    m: int,
    n_obs_terms: int = 0,
    l1: int | None = None,
) -> int:
    """Number of configurations enumerated for an ``m``-slot moment.

    With ``n_obs_terms = 0`` only all-coupling labellings are counted; ``l1``
    adds the ``binom(m, l1)`` replica labellings.
    """
    T = math.comb(n, q)
    total = 0
    for z in range(m, -1, -1):
        if z % 2 or (n_obs_terms == 0 and z != m):
            continue
        total += math.comb(m, z) * double_factorial(z - 1) * T ** (z // 2) * n_obs_terms ** (m - z)
    if l1 is not None:
        total *= math.comb(m, l1)
    return total


def _labellings(m: int, obs: Observable | None, lam: float):
    """Yield ``(eta, obs_slots)`` with an even number of coupling slots."""
    use_obs = obs is not None and len(obs) and lam != 0
    for eta in itertools.product((0, 1), repeat=m):
        if not use_obs and any(eta):
            continue
        if eta.count(0) % 2:
            continue
        yield eta


def _grid_values(
    n: int,
    q: int,
    eta: tuple[int, ...],
    pi: tuple[tuple[int, int], ...],
    obs_strings: list[tuple[int, complex]],
    replica: tuple[int, ...] | None,
):
    """Yield arrays of ``tr(W)`` (or ``tr(W_1) tr(W_2)``) over all pair-set choices."""
    m = len(eta)
    masks_all = subset_masks(n, q)
    T = masks_all.size
    phase = _I_POWERS[(q // 2) % 4]
    p = len(pi)
    slot_pair = {}
    for k, (u, v) in enumerate(pi):
        slot_pair[u] = k
        slot_pair[v] = k
    total = T**p
    groups = [list(range(m))] if replica is None else [
        [j for j in range(m) if replica[j] == b] for b in (1, 2)
    ]
    for start in range(0, total, _GRID_CHUNK):
        g = np.arange(start, min(total, start + _GRID_CHUNK), dtype=np.int64)
        digits = [(g // T**k) % T for k in range(p)]
        out = np.ones(g.size, dtype=np.complex128)
        for slots in groups:
            mask = np.zeros(g.size, dtype=np.uint64)
            coeff = np.ones(g.size, dtype=np.complex128)
            for j in slots:
                if eta[j] == 0:
                    mk, c = masks_all[digits[slot_pair[j]]], phase
                else:
                    mk, c = obs_strings[j]
                mask, coeff = pairwise_products(mask, coeff, mk, c, n)
            out *= np.where(mask == 0, coeff, 0)
        yield out


def _moment_sum(
    n: int,
    q: int,
    m: int,
    obs: Observable | None,
    lam: float,
    budget: int,
    l1: int | None = None,
    separated: bool = False,
) -> float:
    M = len(obs) if (obs is not None and lam != 0) else 0
    count = configuration_count(n, q, m, M, l1)
    if count > budget:
        raise BudgetExceeded(
            f"{count} configurations exceed the enumeration budget of {budget}",
            required=count,
        )
    sigma = math.sqrt(coupling_variance(n, q))
    parts_re: list[np.ndarray] = []
    parts_im: list[np.ndarray] = []
    replicas = [None] if l1 is None else [
        tuple(1 if j in ones else 2 for j in range(m))
        for ones in map(set, itertools.combinations(range(m), l1))
    ]
    for eta in _labellings(m, obs, lam):
        zeros = [j for j in range(m) if eta[j] == 0]
        ones = [j for j in range(m) if eta[j] == 1]
        for pairing in enumerate_pairings(len(zeros)):
            pi = tuple((zeros[a], zeros[b]) for a, b in pairing)
            for assign in itertools.product(range(M), repeat=len(ones)):
                pref = sigma ** len(zeros) * lam ** len(ones)
                obs_strings = {}
                for j, a in zip(ones, assign):
                    c, sites = obs.terms[a]
                    pref *= c
                    obs_strings[j] = _hermitian_string(sites)
                for rep in replicas:
                    if separated and any(rep[u] != rep[v] for u, v in pi):
                        continue
                    for vals in _grid_values(n, q, eta, pi, obs_strings, rep):
                        nz = vals[vals != 0] * pref
                        parts_re.append(nz.real)
                        parts_im.append(nz.imag)
    re = math.fsum(np.concatenate(parts_re)) if parts_re else 0.0
    im = math.fsum(np.concatenate(parts_im)) if parts_im else 0.0
    norm = 1 if l1 is None else math.comb(m, l1)
    scale = max(1.0, abs(re))
    if abs(im) > 1e-10 * scale:
        raise ArithmeticError(f"disorder average has imaginary part {im:.3e}")
    return re / norm


@lru_cache(maxsize=256)
def annealed_trace_moment(
    n: int,
    q: int,
    m: int,
    obs: Observable | None = None,
    lam: float = 0.0,
    *,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Exact ``E tr(H^m)`` for ``H = H0 + lam O`` by full Wick enumeration."""
    if m == 0:
        return 1.0
    return _moment_sum(n, q, m, obs, lam, budget)


def annealed_moments(
    n: int,
    q: int,
    K: int,
    obs: Observable | None = None,
    lam: float = 0.0,
    *,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """``E tr(H^l)`` for ``l = 0..K``; the budget applies to the total enumeration."""
    M = len(obs) if (obs is not None and lam != 0) else 0
    total = sum(configuration_count(n, q, m, M) for m in range(1, K + 1))
    if total > budget:
        raise BudgetExceeded(
            f"{total} configurations up to order {K} exceed the budget of {budget}",
            required=total,
        )
    return np.array(
        [annealed_trace_moment(n, q, m, obs, lam, budget=budget) for m in range(K + 1)]
    )


def annealed_partition_series(
    n: int,
    q: int,
    beta,
    obs: Observable | None = None,
    lam: float = 0.0,
    K: int = 6,
    *,
    budget: int = DEFAULT_BUDGET,
):
    """Truncated ``E Zhat(beta) = sum_{l<=K} (-beta)^l / l! E tr(H^l)``."""
    mom = annealed_moments(n, q, K, obs, lam, budget=budget)
    beta = np.asarray(beta, dtype=complex)
    out = np.zeros_like(beta)
    term = np.ones_like(beta)
    for l in range(K + 1):
        out = out + mom[l] * term
        term = term * (-beta) / (l + 1)
    return out if out.ndim else out[()]


def two_replica_moment(
    n: int,
    q: int,
    l1: int,
    l2: int,
    obs: Observable | None = None,
    lam: float = 0.0,
    *,
    budget: int = DEFAULT_BUDGET,
    separated: bool = False,
) -> float:
    """Exact ``E[tr(H^l1) tr(H^l2)]`` summed over replica-labelled configurations.

    With ``separated=True`` only pairings that stay inside one replica are
    kept, which yields ``E tr(H^l1) * E tr(H^l2)``.
    """
    m = l1 + l2
    if m == 0:
        return 1.0
    return _moment_sum(n, q, m, obs, lam, budget, l1=l1, separated=separated)


def _seeds(seed: int, samples: int) -> np.ndarray:
    return np.arange(samples, dtype=np.uint64) + np.uint64(seed)


def instance_spectra(
    n: int,
    q: int,
    seeds,
    obs: Observable | None = None,
    lam: float = 0.0,
    *,
    batch: int = 4096,
) -> np.ndarray:
    """Eigenvalues of ``H0 + lam O`` for each seed, shape ``(len(seeds), 2^{n/2})``."""
    if n > DENSE_MAX_MODES:
        raise TooLargeForDense(f"n={n} exceeds the dense cap of {DENSE_MAX_MODES}")
    seeds = [int(s) for s in seeds]
    dim = 1 << (n // 2)
    T = math.comb(n, q)
    extra = np.zeros((dim, dim), dtype=np.complex128)
    if obs is not None and len(obs) and lam != 0:
        zero = SykInstance(n, q, 0, np.zeros(T))
        extra = to_dense(build_hamiltonian(zero, obs, lam))
    out = np.empty((len(seeds), dim))
    if T * dim * dim <= _STACK_LIMIT:
        phase = _I_POWERS[(q // 2) % 4]
        stack = dense_strings(subset_masks(n, q), np.full(T, phase), n).reshape(T, dim * dim)
        for s in range(0, len(seeds), batch):
            chunk = seeds[s : s + batch]
            J = np.stack([sample_couplings(n, q, sd) for sd in chunk])
            H = (J @ stack).reshape(len(chunk), dim, dim) + extra
            out[s : s + len(chunk)] = np.linalg.eigvalsh(H)
    else:
        for k, sd in enumerate(seeds):
            inst = SykInstance(n, q, sd, sample_couplings(n, q, sd))
            out[k] = np.linalg.eigvalsh(to_dense(build_hamiltonian(inst)) + extra)
    return out


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def monte_carlo_trace_moment(
    n: int,
    q: int,
    m: int,
    samples: int,
    seed: int,
    obs: Observable | None = None,
    lam: float = 0.0,
) -> tuple[float, float]:
    """Sample mean and standard error of ``tr(H^m)`` over seeds ``seed .. seed+samples-1``."""
    e = instance_spectra(n, q, _seeds(seed, samples), obs, lam)
    return _mean_stderr(np.mean(e**m, axis=1))


def monte_carlo_two_replica(
    n: int,
    q: int,
    l1: int,
    l2: int,
    samples: int,
    seed: int,
    obs: Observable | None = None,
    lam: float = 0.0,
) -> tuple[float, float]:
    """Sample mean and standard error of ``tr(H^l1) tr(H^l2)``."""
    e = instance_spectra(n, q, _seeds(seed, samples), obs, lam)
    return _mean_stderr(np.mean(e**l1, axis=1) * np.mean(e**l2, axis=1))


def concentration_ratio(
    n: int,
    q: int,
    beta: complex,
    samples: int,
    seed: int,
    obs: Observable | None = None,
    lam: float = 0.0,
) -> tuple[float, float]:
    """Monte Carlo ``E|Z - EZ|^2 / |EZ|^2`` for the normalized partition function.

    ``EZ`` is replaced by the sample mean.  Returns ``(ratio, stderr)``.
    """
    if samples < 100:
        raise StatisticsTooFew(f"need at least 100 samples, got {samples}")
    e = instance_spectra(n, q, _seeds(seed, samples), obs, lam)
    z = np.exp(-complex(beta) * e).mean(axis=1)
    zbar = z.mean()
    dev = np.abs(z - zbar) ** 2
    denom = abs(zbar) ** 2
    return float(dev.mean() / denom), float(dev.std(ddof=1) / math.sqrt(samples) / denom)


def local_fluctuations(
    n: int,
    q: int,
    beta: float,
    pairs: int,
    seed: int,
    *,
    seed_pairs: Sequence[tuple[int, int]] | None = None,
) -> np.ndarray:
    """Per-pair ``max_I |Tr(psi_I rho) - Tr(psi_I rho')|`` over all q-subsets ``I``.

    Pair ``k`` uses seeds ``(seed + 2k, seed + 2k + 1)`` unless ``seed_pairs``
    is given explicitly.
    """
    if n > DENSE_MAX_MODES:
        raise TooLargeForDense(f"n={n} exceeds the dense cap of {DENSE_MAX_MODES}")
    if seed_pairs is None:
        seed_pairs = [(seed + 2 * k, seed + 2 * k + 1) for k in range(pairs)]
    masks = subset_masks(n, q)
    cache: dict[int, np.ndarray] = {}

    def local(sd: int) -> np.ndarray:
        if sd not in cache:
            inst = SykInstance(n, q, sd, sample_couplings(n, q, sd))
            rho = gibbs_state(to_dense(build_hamiltonian(inst)), beta)
            cache[sd] = string_expectations(rho, masks, n)
        return cache[sd]

    return np.array([float(np.max(np.abs(local(a) - local(b)))) for a, b in seed_pairs])
