"""
Thermal expectations by Taylor interpolation of ``log Zhat``.

The thermal expectation ``Tr(O rho_beta) = -(1/beta) d/dlambda log Zhat_lambda(beta)``
is approximated by a one-sided finite difference between ``lambda = 0`` and
``lambda = h``, where each ``log Zhat_lambda(beta)`` is replaced by its Taylor
polynomial of degree ``K`` in ``beta``.  Taylor coefficients come from exact
moments converted to cumulants.  The step ``h``, the order ``K`` and the
Cauchy radius ``R`` are fixed in closed form from ``(n, q, beta, epsilon,
Gamma, L)`` so that the truncation error stays below ``epsilon / 2`` and the
finite-difference error below ``epsilon / 16`` whenever the instance has no
partition-function zeros in the disk of radius ``rho``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BetaOutOfRange, BudgetExceeded, EpsilonOutOfRange
from .majorana import DEFAULT_TERM_CAP
from .model import Observable, SykInstance, build_hamiltonian, observable_stats
from .moments import MomentSequence, power_trace_sequence
from .oracle import log_partition_function, spectral_norm, spectrum, to_dense

__all__ = [
    "DEFAULT_K_MAX",
    "DELTA",
    "constant_C",
    "norm_density_bound",
    "EstimatorParams",
    "select_parameters",
    "CumulantSequence",
    "moments_to_cumulants",
    "cumulants_to_moments",
    "log_partition_taylor",
    "EstimateReport",
    "estimate_expectation",
    "DuhamelCheck",
    "duhamel_second_derivative_check",
]

DEFAULT_K_MAX = 24
DELTA = 1.0 / 19.0


def constant_C(q: int) -> float:
    """``C = 2^{q/2-1} e^{-1/4} (sqrt(1 + 4/e) - 1)``."""
    return 2.0 ** (q / 2 - 1) * math.exp(-0.25) * (math.sqrt(1.0 + 4.0 / math.e) - 1.0)


def norm_density_bound(q: int) -> float:
    """``sqrt(1.01 ln 2 / (q 2^q))``: typical ``||H0|| / n`` ceiling."""
    return math.sqrt(1.01 * math.log(2.0) / (q * 2.0**q))


@dataclass(frozen=True)
class EstimatorParams:
    n: int
    q: int
    beta: float
    epsilon: float
    gamma: float
    locality: int
    h: float
    K: int
    K_bound: float
    rho: float
    R: float
    delta: float
    B: float
    C: float

    @property
    def truncation_tail(self) -> float:
        """``B n sum_{m>K} (beta/R)^m``: remainder bound for one log series."""
        x = self.beta / self.R
        return self.B * self.n * x ** (self.K + 1) / (1.0 - x)

    @property
    def truncation_bound(self) -> float:
        """Truncation contribution to the expectation estimate (``<= epsilon/2``)."""
        return 2.0 * self.truncation_tail / (self.beta * self.h)

    @property
    def fd_bound(self) -> float:
        """Finite-difference contribution ``h beta n^2 Gamma^2 / 2`` (``= epsilon/16``)."""
        return 0.5 * self.h * self.beta * self.n**2 * self.gamma**2

    @property
    def total_bound(self) -> float:
        return self.truncation_bound + self.fd_bound


def select_parameters(
    n: int,
    q: int,
    beta: float,
    epsilon: float,
    gamma: float,
    locality: int,
    *,
    K_max: int = DEFAULT_K_MAX,
) -> EstimatorParams:
    """Closed-form step, radii and truncation order for the estimator.

    Raises
    ------
    BetaOutOfRange
        Unless ``0 < beta < (9C/10) / sqrt(q max(q, L))``.
    EpsilonOutOfRange
        Unless ``0 < epsilon < 2^{3-q/2} beta n^2 Gamma / sqrt(q max(q, L))``.
    BudgetExceeded
        When the required ``K`` exceeds ``K_max``; ``.required`` holds it.
    """
    if gamma <= 0:
        raise ValueError(f"observable weight Gamma must be positive, got {gamma}")
    C = constant_C(q)
    root = math.sqrt(q * max(q, locality))
    beta_ceiling = 0.9 * C / root
    if not 0 < beta < beta_ceiling:
        raise BetaOutOfRange(
            f"need 0 < beta < (9C/10)/sqrt(q*max(q,L)) = {beta_ceiling:.6g}, got beta={beta}"
        )
    eps_ceiling = 2.0 ** (3 - q / 2) * beta * n**2 * gamma / root
    if not 0 < epsilon < eps_ceiling:
        raise EpsilonOutOfRange(
            f"need 0 < epsilon < 2^(3-q/2)*beta*n^2*Gamma/sqrt(q*max(q,L)) = "
            f"{eps_ceiling:.6g}, got epsilon={epsilon}"
        )
    h = epsilon / (8.0 * beta * n**2 * gamma**2)
    rho = (19.0 * C / 20.0) / root
    R = (1.0 - DELTA / 2.0) * rho
    outer = (1.0 - DELTA / 4.0) * rho
    B = 2.0 * R * outer / (outer - R) * (h * gamma + norm_density_bound(q))
    K_bound = math.log(4.0 * B * n / (beta * h * epsilon * (1.0 - beta / R))) / math.log(R / beta)
    K = max(1, math.ceil(K_bound))
    if K > K_max:
        raise BudgetExceeded(
            f"truncation order K={K} exceeds K_max={K_max}; raise K_max or relax epsilon",
            required=K,
        )
    return EstimatorParams(
        n=n, q=q, beta=beta, epsilon=epsilon, gamma=gamma, locality=locality,
        h=h, K=K, K_bound=K_bound, rho=rho, R=R, delta=DELTA, B=B, C=C,
    )


def _binomial_rows(K: int) -> list[list[float]]:
    rows = [[1.0]]
    for r in range(1, K + 1):
        prev = rows[-1]
        rows.append([1.0] + [prev[i - 1] + prev[i] for i in range(1, r)] + [1.0])
    return rows


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants ``kappa_1 .. kappa_K``; ``values[r-1]`` holds ``kappa_r``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def K(self) -> int:
        return len(self.values)

    def kappa(self, r: int) -> float:
        return float(self.values[r - 1])

    @property
    def taylor(self) -> np.ndarray:
        """``a_m = (-1)^m kappa_m / m!`` for ``m = 1..K`` (index ``m-1``)."""
        m = np.arange(1, self.K + 1)
        fact = np.array([float(math.factorial(k)) for k in m])
        return (-1.0) ** m * self.values / fact


def moments_to_cumulants(mu) -> CumulantSequence:
    """``kappa_r = mu_r - sum_{i=1}^{r-1} binom(r-1, i-1) kappa_i mu_{r-i}``."""
    mu = np.asarray(getattr(mu, "values", mu), dtype=float)
    if mu[0] != 1.0:
        raise ValueError(f"moment sequence must start with mu_0 = 1, got {mu[0]}")
    K = len(mu) - 1
    binom = _binomial_rows(K)
    kappa = np.zeros(K + 1)
    for r in range(1, K + 1):
        acc = mu[r]
        for i in range(1, r):
            acc -= binom[r - 1][i - 1] * kappa[i] * mu[r - i]
        kappa[r] = acc
    return CumulantSequence(kappa[1:])


def cumulants_to_moments(kappa) -> np.ndarray:
    """Inverse recurrence: ``mu_r = kappa_r + sum_{i=1}^{r-1} binom(r-1, i-1) kappa_i mu_{r-i}``."""
    k = np.concatenate([[0.0], np.asarray(getattr(kappa, "values", kappa), dtype=float)])
    K = len(k) - 1
    binom = _binomial_rows(K)
    mu = np.zeros(K + 1)
    mu[0] = 1.0
    for r in range(1, K + 1):
        mu[r] = k[r] + sum(binom[r - 1][i - 1] * k[i] * mu[r - i] for i in range(1, r))
    return mu


def log_partition_taylor(kappa: CumulantSequence, z):
    """Truncated series ``sum_{m=1}^K a_m z^m`` for ``log Zhat(z)``."""
    a = kappa.taylor
    z = np.asarray(z)
    acc = np.zeros_like(z, dtype=np.result_type(z.dtype, float))
    for coef in a[::-1]:
        acc = (acc + coef) * z
    return acc if acc.ndim else acc[()]


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    params: EstimatorParams
    moments_zero: MomentSequence = field(repr=False)
    moments_h: MomentSequence = field(repr=False)
    seed: int | None = None

    @property
    def truncation_bound(self) -> float:
        return self.params.truncation_bound

    @property
    def fd_bound(self) -> float:
        return self.params.fd_bound

    @property
    def total_bound(self) -> float:
        return self.params.total_bound

    def to_dict(self) -> dict:
        p = self.params
        return {
            "estimate": self.estimate,
            "h": p.h,
            "K": p.K,
            "rho": p.rho,
            "R": p.R,
            "B": p.B,
            "C": p.C,
            "truncation_bound": p.truncation_bound,
            "fd_bound": p.fd_bound,
            "beta": p.beta,
            "epsilon": p.epsilon,
            "seed": self.seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def estimate_expectation(
    inst: SykInstance,
    obs: Observable,
    beta: float,
    epsilon: float,
    *,
    K_max: int = DEFAULT_K_MAX,
    term_cap: int = DEFAULT_TERM_CAP,
) -> EstimateReport:
    """Estimate ``Tr(O rho_beta)`` for one instance to additive error ``epsilon``.

    The guarantee holds when the instance's normalized partition function
    has no zeros on the disk of radius ``rho`` for both ``lambda = 0`` and
    ``lambda = h``; that event is typical but not certified here.
    """
    gamma, locality = observable_stats(obs)
    p = select_parameters(inst.n, inst.q, beta, epsilon, gamma, locality, K_max=K_max)
    meta = {"q": inst.q, "seed": inst.seed}
    mu0 = power_trace_sequence(
        build_hamiltonian(inst, obs, 0.0), p.K, term_cap=term_cap, meta=dict(meta, lam=0.0)
    )
    muh = power_trace_sequence(
        build_hamiltonian(inst, obs, p.h), p.K, term_cap=term_cap, meta=dict(meta, lam=p.h)
    )
    a0 = moments_to_cumulants(mu0).taylor
    ah = moments_to_cumulants(muh).taylor
    powers = beta ** np.arange(1, p.K + 1)
    estimate = -float(np.dot(ah - a0, powers)) / (beta * p.h)
    return EstimateReport(estimate, p, mu0, muh, seed=inst.seed)


@dataclass(frozen=True)
class DuhamelCheck:
    lambdas: np.ndarray
    values: np.ndarray
    bound: float

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))

    @property
    def max_value(self) -> float:
        return float(np.max(self.values))

    def within_bound(self, tol: float = 1e-6) -> bool:
        return self.min_value >= -tol and self.max_value <= self.bound + tol


def duhamel_second_derivative_check(
    inst: SykInstance,
    obs: Observable,
    beta: float,
    lambda_max: float,
    steps: int,
    *,
    step: float = 1e-3,
) -> DuhamelCheck:
    """Central second differences of exact ``log Zhat_lambda(beta)`` on ``[0, lambda_max]``.

    ``bound`` is ``beta^2 ||O||^2`` with the dense spectral norm of ``O``.
    """
    lambdas = np.linspace(0.0, lambda_max, steps)
    h0 = to_dense(build_hamiltonian(inst))
    o = to_dense(build_hamiltonian(_zero_like(inst), obs, 1.0))

    def f(lam):
        return float(log_partition_function(spectrum(h0 + lam * o), beta))

    values = np.array(
        [(f(l + step) - 2.0 * f(l) + f(l - step)) / step**2 for l in lambdas]
    )
    return DuhamelCheck(lambdas, values, beta**2 * spectral_norm(o) ** 2)


def _zero_like(inst: SykInstance) -> SykInstance:
    return SykInstance(inst.n, inst.q, inst.seed, np.zeros_like(inst.values))
