import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykbarvinok.errors import BetaOutOfRange, BudgetExceeded, EpsilonOutOfRange
from sykbarvinok.estimator import (
    constant_C,
    cumulants_to_moments,
    duhamel_second_derivative_check,
    estimate_expectation,
    log_partition_taylor,
    moments_to_cumulants,
    norm_density_bound,
    select_parameters,
)
from sykbarvinok.majorana import SparseOperator, make_string
from sykbarvinok.model import Observable, SykInstance, build_hamiltonian, sample_instance
from sykbarvinok.moments import power_trace_sequence
from sykbarvinok.oracle import gibbs_expectation, log_partition_function, spectrum, to_dense

# Evaluated independently at 40 digits.
C4 = 0.8911134440667105329
RHO_Q4 = 0.2116394429658437516


def zero_instance(n, q=4):
    return SykInstance(n, q, 0, np.zeros(math.comb(n, q)))


def test_constant_C():
    assert constant_C(4) == pytest.approx(C4, rel=1e-15)
    assert constant_C(4) == pytest.approx(2 * math.exp(-0.25) * (math.sqrt(1 + 4 / math.e) - 1), rel=1e-15)


def test_select_parameters_examples():
    p = select_parameters(12, 4, 0.1, 0.05, 1.0, 2, K_max=64)
    assert p.h == pytest.approx(4.340277777777778e-4, rel=1e-14)
    assert p.rho == pytest.approx(RHO_Q4, rel=1e-15)
    assert p.C == pytest.approx(C4, rel=1e-15)
    with pytest.raises(BetaOutOfRange, match="9C/10"):
        select_parameters(12, 4, 0.3, 0.05, 1.0, 2)
    with pytest.raises(EpsilonOutOfRange):
        select_parameters(12, 4, 0.1, 100.0, 1.0, 2)
    with pytest.raises(ValueError):
        select_parameters(12, 4, 0.1, 0.05, 0.0, 2)


def test_params_invariants():
    p = select_parameters(12, 4, 0.1, 0.02, 1.0, 4, K_max=64)
    assert p.beta < (1 - p.delta) * p.rho < p.R < p.rho
    outer = (1 - p.delta / 4) * p.rho
    expected_B = 2 * p.R * outer / (outer - p.R) * (p.h * p.gamma + norm_density_bound(4))
    assert p.B == pytest.approx(expected_B, rel=1e-15)
    assert p.K >= p.K_bound > p.K - 1
    assert p.fd_bound == pytest.approx(p.epsilon / 16, rel=1e-14)
    assert p.truncation_bound <= p.epsilon / 2
    assert p.total_bound < p.epsilon


def test_K_monotone_in_epsilon():
    a = select_parameters(12, 4, 0.1, 0.02, 1.0, 4, K_max=64)
    b = select_parameters(12, 4, 0.1, 0.01, 1.0, 4, K_max=64)
    assert b.K > a.K


def test_h_scaling_identity():
    a = select_parameters(12, 4, 0.1, 0.02, 1.0, 4, K_max=64)
    b = select_parameters(12, 4, 0.1, 0.02, math.sqrt(2), 4, K_max=64)
    assert b.h == pytest.approx(a.h / 2, rel=1e-15)


def test_budget_exceeded_reports_required():
    with pytest.raises(BudgetExceeded) as info:
        select_parameters(12, 4, 0.1, 0.02, 1.0, 4, K_max=10)
    assert info.value.required == 29


def test_cumulants_constant_spectrum():
    c = 0.3
    kap = moments_to_cumulants(c ** np.arange(8))
    assert kap.values[0] == pytest.approx(c)
    np.testing.assert_allclose(kap.values[1:], 0, atol=1e-15)


def test_cumulants_pm_one():
    kap = moments_to_cumulants([1, 0, 1, 0, 1])
    np.testing.assert_allclose(kap.values, [0, 1, 0, -2], atol=1e-12)
    # log cosh z = z^2/2 - z^4/12
    np.testing.assert_allclose(kap.taylor, [0, 0.5, 0, -1 / 12], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=12))
def test_cumulant_round_trip(kappa):
    kappa = np.array(kappa)
    mu = cumulants_to_moments(kappa)
    back = moments_to_cumulants(mu).values
    # Error is measured against the size of the terms the recurrence cancels.
    k = np.concatenate([[0.0], kappa])
    for r in range(1, len(k)):
        scale = abs(mu[r]) + sum(math.comb(r - 1, i - 1) * abs(k[i] * mu[r - i]) for i in range(1, r))
        assert abs(back[r - 1] - kappa[r - 1]) <= 1e-12 * max(1.0, scale)
    again = cumulants_to_moments(back)
    assert np.all(np.abs(again - mu) <= 1e-9 * np.maximum(1.0, np.abs(mu)))


def test_kappa_one_is_mean():
    mu = power_trace_sequence(build_hamiltonian(sample_instance(8, 4, 3)), 6)
    assert moments_to_cumulants(mu).kappa(1) == mu[1]


def test_log_partition_taylor_one_term():
    J = 1.0
    n = 8
    h = J * SparseOperator.from_terms(n, [make_string([0, 1, 2, 3], n)])
    kap = moments_to_cumulants(power_trace_sequence(h, 12))
    assert log_partition_taylor(kap, 0.0) == 0
    for z in (0.5, 1.0 + 0.5j, 2.0):
        exact = np.log(np.cosh(z * J / 4))
        assert abs(log_partition_taylor(kap, z) - exact) < 1e-9 * max(1, abs(z)) ** 14


def test_log_partition_taylor_random_instance_within_bound():
    inst = sample_instance(10, 4, 4)
    p = select_parameters(10, 4, 0.15, 0.02, 1.0, 4, K_max=128)
    h = build_hamiltonian(inst)
    kap = moments_to_cumulants(power_trace_sequence(h, p.K))
    exact = log_partition_function(spectrum(to_dense(h)), p.beta).real
    assert abs(log_partition_taylor(kap, p.beta) - exact) <= p.truncation_tail


def test_zero_coupling_estimate():
    rep = estimate_expectation(zero_instance(8), Observable([(0.5, (0, 1))]), 0.1, 0.05, K_max=64)
    assert abs(rep.estimate) <= 0.05


def test_estimate_seed5_against_oracle():
    inst = sample_instance(12, 4, 5)
    obs = Observable([(1.0, (0, 1, 2, 3))])
    rep = estimate_expectation(inst, obs, 0.1, 0.02, K_max=32)
    o = to_dense(build_hamiltonian(zero_instance(12), obs, 1.0))
    exact = gibbs_expectation(to_dense(build_hamiltonian(inst)), o, 0.1)
    assert abs(rep.estimate - exact) <= 0.02
    d = rep.to_dict()
    assert set(d) == {"estimate", "h", "K", "rho", "R", "B", "C", "truncation_bound",
                      "fd_bound", "beta", "epsilon", "seed"}
    assert d["seed"] == 5


def test_duhamel_examples():
    inst = sample_instance(8, 4, 2)
    chk = duhamel_second_derivative_check(inst, Observable([]), 0.5, 1.0, 5)
    assert chk.max_abs <= 1e-6
    beta = 0.7
    chk = duhamel_second_derivative_check(zero_instance(8), Observable([(1.0, (0, 1))]), beta, 0.0, 1)
    assert chk.values[0] == pytest.approx(beta**2 / 4, abs=1e-6)
    assert chk.bound == pytest.approx(beta**2 / 4, rel=1e-12)
