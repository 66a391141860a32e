"""
Zero-free radii and complex-temperature scans of partition functions.

Scans evaluate ``|Zhat(beta)|`` on a uniform Cartesian grid over the square
bounding a disk, skipping points outside the disk.  Instance scans are exact
(dense eigenvalues); annealed scans use the truncated Wick series and flag a
point as certified nonzero only when the truncated value exceeds twice a
geometric estimate of the neglected tail.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .disorder import DEFAULT_BUDGET, annealed_moments
from .errors import DomainError, InvalidParity
from .estimator import constant_C
from .majorana import SparseOperator
from .model import Observable, SykInstance, build_hamiltonian, observable_stats
from .oracle import partition_function, spectrum, to_dense

__all__ = [
    "RadiusSheet",
    "radius_sheet",
    "tree_function",
    "GridSpec",
    "ZeroScanReport",
    "scan_hamiltonian_zeros",
    "scan_instance_zeros",
    "scan_annealed_zeros",
]

_SQRT_TERM = math.sqrt(1.0 + 4.0 / math.e) - 1.0
_ANNEAL_TERM = math.sqrt(1.0 + 1.0 / math.e) - 1.0


@dataclass(frozen=True)
class RadiusSheet:
    """Explicit constants for locality ``q`` and observable locality ``L``."""

    q: int
    L: int
    C: float
    coupling_scale: float
    annealed_radius: float
    concentration_radius: float
    whp_radius: float
    main_radius: float
    estimator_ceiling: float
    lambda_gamma_annealed: float
    lambda_gamma_concentration: float

    def to_dict(self) -> dict:
        return asdict(self)


def radius_sheet(q: int, L: int) -> RadiusSheet:
    if q <= 0 or L < 0 or q % 2 or L % 2:
        raise InvalidParity(f"q and L must be even and positive, got q={q}, L={L}")
    alpha = max(q, L)
    root = math.sqrt(q * alpha)
    C = constant_C(q)
    coupling_scale = math.sqrt(q / 2.0 ** (q - 1))
    annealed = math.sqrt(2.0) * _ANNEAL_TERM * math.sqrt(q / alpha) / coupling_scale
    return RadiusSheet(
        q=q,
        L=L,
        C=C,
        coupling_scale=coupling_scale,
        annealed_radius=annealed,
        concentration_radius=C / root,
        whp_radius=(19.0 * C / 20.0) / root,
        main_radius=(2.0 ** (q / 2) / q) * (19.0 / (40.0 * math.exp(0.25))) * _SQRT_TERM,
        estimator_ceiling=(9.0 * C / 10.0) / root,
        lambda_gamma_annealed=2.0 ** (-q / 2) / math.sqrt(alpha),
        lambda_gamma_concentration=2.0 ** (-q / 2) / root,
    )


def tree_function(x: float, *, tol: float = 1e-14, max_terms: int = 2000) -> float:
    """Tree function ``T(x) = sum_{k>=1} k^{k-1} x^k / k!`` on ``[0, 1/e]``.

    The series is summed until a term drops below ``tol`` or ``max_terms``
    terms are used.  Close to ``1/e`` the series converges only like
    ``k^{-3/2}``, so an unconverged partial sum is refined by Newton steps
    on ``T e^{-T} = x`` kept inside ``[partial sum, 1]``.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0 / math.e * (1 + 1e-15):
        raise DomainError(f"tree function needs 0 <= x <= 1/e, got {x}")
    if x == 0.0:
        return 0.0
    logx = math.log(x)
    total = 0.0
    term = 1.0
    for k in range(1, max_terms + 1):
        term = math.exp((k - 1) * math.log(k) - math.lgamma(k + 1) + k * logx)
        total += term
        if term < tol:
            return total
    t = min(total, 1.0)
    for _ in range(200):
        f = t * math.exp(-t) - x
        df = (1.0 - t) * math.exp(-t)
        if df <= 0.0 or abs(f) < 1e-17:
            break
        t = min(max(t - f / df, total), 1.0)
    return t


@dataclass(frozen=True)
class GridSpec:
    center: complex = 0j
    radius: float = 1.0
    resolution: int = 41

    def points(self) -> np.ndarray:
        """Grid points inside the closed disk, in row-major (imag, real) order."""
        axis = np.linspace(-self.radius, self.radius, self.resolution)
        re, im = np.meshgrid(axis, axis)
        offsets = (re + 1j * im).ravel()
        keep = np.abs(offsets) <= self.radius * (1 + 1e-12)
        return complex(self.center) + offsets[keep]

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / (self.resolution - 1) if self.resolution > 1 else 0.0

    def to_dict(self) -> dict:
        c = complex(self.center)
        return {"center": [c.real, c.imag], "radius": self.radius, "resolution": self.resolution}


@dataclass(frozen=True)
class ZeroScanReport:
    grid: GridSpec
    points: np.ndarray = field(repr=False)
    abs_z: np.ndarray = field(repr=False)
    source: str
    certified: np.ndarray | None = field(default=None, repr=False)
    tail: np.ndarray | None = field(default=None, repr=False)
    warnings: tuple[str, ...] = ()

    @property
    def argmin(self) -> complex:
        return complex(self.points[int(np.argmin(self.abs_z))])

    @property
    def min_modulus(self) -> float:
        return float(np.min(self.abs_z))

    @property
    def all_certified(self) -> bool | None:
        return None if self.certified is None else bool(np.all(self.certified))

    def summary(self) -> dict:
        a = self.argmin
        return {
            "source": self.source,
            "grid": self.grid.to_dict(),
            "points": int(self.points.size),
            "min_modulus": self.min_modulus,
            "argmin": [a.real, a.imag],
            "all_certified": self.all_certified,
            "warnings": list(self.warnings),
        }

    def to_csv(self, fp=None, *, hex_floats: bool = False):
        """Rows ``re_beta, im_beta, abs_Z, certified_flag`` (flag empty for exact scans)."""
        buf = io.StringIO() if fp is None else fp
        fmt = (lambda v: float(v).hex()) if hex_floats else (lambda v: f"{v:.17g}")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re_beta", "im_beta", "abs_Z", "certified_flag"])
        for k, (p, a) in enumerate(zip(self.points, self.abs_z)):
            flag = "" if self.certified is None else int(bool(self.certified[k]))
            w.writerow([fmt(p.real), fmt(p.imag), fmt(a), flag])
        if fp is None:
            return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def scan_hamiltonian_zeros(
    h: SparseOperator | np.ndarray, grid: GridSpec, *, source: str = "operator"
) -> ZeroScanReport:
    """Exact ``|Zhat(beta)|`` on the grid for a sparse or dense Hermitian ``h``."""
    dense = to_dense(h) if isinstance(h, SparseOperator) else np.asarray(h)
    energies = spectrum(dense)
    pts = grid.points()
    vals = np.abs(partition_function(energies, pts))
    return ZeroScanReport(grid, pts, vals, source)


def scan_instance_zeros(
    inst: SykInstance,
    obs: Observable | None = None,
    lam: float = 0.0,
    grid: GridSpec | None = None,
) -> ZeroScanReport:
    grid = grid or GridSpec()
    h = build_hamiltonian(inst, obs, lam)
    return scan_hamiltonian_zeros(h, grid, source=f"seed={inst.seed}")


def scan_annealed_zeros(
    n: int,
    q: int,
    obs: Observable | None = None,
    lam: float = 0.0,
    grid: GridSpec | None = None,
    K: int = 6,
    *,
    budget: int = DEFAULT_BUDGET,
) -> ZeroScanReport:
    """``|E Zhat(beta)|`` from the order-``K`` Wick series, with tail annotations.

    The tail is estimated from the last two nonzero series terms ``t_a, t_b``
    as ``|t_b| r / (1 - r)`` with per-order ratio ``r = |t_b / t_a|^{1/(b-a)}``
    (infinite when ``r >= 1``).
    """
    grid = grid or GridSpec()
    warnings = []
    if obs is not None and len(obs) and lam != 0:
        gamma, locality = observable_stats(obs)
        ceiling = radius_sheet(q, max(locality, 2)).lambda_gamma_annealed
        if abs(lam) * gamma > ceiling:
            warnings.append(
                f"|lambda|*Gamma = {abs(lam) * gamma:.6g} exceeds the annealed ceiling {ceiling:.6g}"
            )
    mom = annealed_moments(n, q, K, obs, lam, budget=budget)
    pts = grid.points()
    terms = []
    term = np.ones_like(pts)
    for l in range(K + 1):
        terms.append(mom[l] * term)
        term = term * (-pts) / (l + 1)
    terms = np.array(terms)
    series = terms.sum(axis=0)
    nonzero = [l for l in range(K + 1) if mom[l] != 0.0]
    tail = np.full(pts.shape, np.inf)
    if len(nonzero) >= 2:
        a, b = nonzero[-2], nonzero[-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (np.abs(terms[b]) / np.abs(terms[a])) ** (1.0 / (b - a))
            tail = np.where(r < 1.0, np.abs(terms[b]) * r / (1.0 - r), np.inf)
        tail = np.where(np.abs(terms[b]) == 0.0, 0.0, tail)
    elif len(nonzero) == 1:
        tail = np.zeros(pts.shape)
    absz = np.abs(series)
    return ZeroScanReport(grid, pts, absz, "annealed", absz > 2.0 * tail, tail, tuple(warnings))
