import math

import numpy as np
import pytest

from sykbarvinok.disorder import (
    WickConfiguration,
    annealed_moments,
    annealed_partition_series,
    annealed_trace_moment,
    concentration_ratio,
    configuration_count,
    connected_factorization_check,
    double_factorial,
    enumerate_pairings,
    instance_spectra,
    intersection_graph,
    local_fluctuations,
    monte_carlo_trace_moment,
    random_configuration,
    two_replica_moment,
)
from sykbarvinok.errors import BudgetExceeded, InvalidParity, StatisticsTooFew, TooLargeForDense
from sykbarvinok.model import Observable, build_hamiltonian, coupling_variance, sample_instance
from sykbarvinok.oracle import spectrum, to_dense

SECOND_MOMENT_8_4 = 6 / 512 * 70 / 16


@pytest.mark.parametrize("k2,count", [(2, 1), (4, 3), (6, 15), (8, 105), (10, 945), (12, 10395)])
def test_pairing_counts(k2, count):
    pairings = list(enumerate_pairings(k2))
    assert len(pairings) == count == double_factorial(k2 - 1)
    assert len(set(pairings)) == count
    for p in pairings:
        assert sorted(x for pair in p for x in pair) == list(range(k2))


def test_pairing_errors_and_order():
    with pytest.raises(InvalidParity):
        list(enumerate_pairings(3))
    with pytest.raises(BudgetExceeded):
        list(enumerate_pairings(14))
    assert list(enumerate_pairings(4)) == list(enumerate_pairings(4))


def test_first_moments():
    assert annealed_trace_moment(8, 4, 3) == 0
    assert annealed_trace_moment(8, 4, 2) == pytest.approx(SECOND_MOMENT_8_4, rel=1e-14)
    n, q = 10, 4
    expected = coupling_variance(n, q) * math.comb(n, q) * 2.0**-q
    assert annealed_trace_moment(n, q, 2) == pytest.approx(expected, rel=1e-14)


def test_second_moment_against_instance_average():
    # E tr(H^2) is exactly sigma^2 C(n,q) 2^-q; the sample mean of 4000 instances is close.
    mean, se = monte_carlo_trace_moment(8, 4, 2, 4000, 0)
    assert abs(mean - SECOND_MOMENT_8_4) <= 4 * se


def test_with_observable_matches_dense_expansion():
    # With lam != 0, E tr((H0 + lam O)^2) = E tr(H0^2) + lam^2 tr(O^2).
    obs = Observable([(0.5, (0, 1)), (-0.3, (2, 3, 4, 5))])
    lam = 0.4
    o_sq = 0.5**2 / 4 + 0.3**2 / 16
    got = annealed_trace_moment(8, 4, 2, obs, lam)
    assert got == pytest.approx(SECOND_MOMENT_8_4 + lam**2 * o_sq, rel=1e-13)


def test_annealed_series():
    assert annealed_partition_series(8, 4, 0.0) == 1
    beta = 0.3 + 0.1j
    got = annealed_partition_series(8, 4, beta, K=2)
    assert got == pytest.approx(1 + beta**2 / 2 * SECOND_MOMENT_8_4, rel=1e-14)
    vals = annealed_partition_series(8, 4, np.array([0.1, 0.2]), K=4)
    assert vals.shape == (2,)


def test_budget():
    with pytest.raises(BudgetExceeded) as info:
        annealed_moments(8, 4, 6, budget=1000)
    assert info.value.required == configuration_count(8, 4, 2) + configuration_count(8, 4, 4) + configuration_count(8, 4, 6)


def test_two_replica_identities():
    n, q = 8, 4
    assert two_replica_moment(n, q, 0, 4) == pytest.approx(annealed_trace_moment(n, q, 4), rel=1e-14)
    assert two_replica_moment(n, q, 1, 1) == 0
    assert two_replica_moment(n, q, 1, 3) == two_replica_moment(n, q, 3, 1)
    sep = two_replica_moment(n, q, 2, 2, separated=True)
    assert sep == pytest.approx(annealed_trace_moment(n, q, 2) ** 2, rel=1e-13)


def test_graph_variants():
    rng = np.random.default_rng(3)
    for _ in range(50):
        cfg = random_configuration(10, 4, 6, rng, replicas=True)
        sep = intersection_graph(cfg, variant="sep").edges
        mix = intersection_graph(cfg, variant="mix").edges
        assert sep <= mix
        for u, v in mix - sep:
            assert cfg.replica[u] != cfg.replica[v]
            assert (u, v) in cfg.pi


def test_factorization_examples():
    q = 4
    k1, k2 = (0, 1, 2, 3), (4, 5, 6, 7)
    cfg = WickConfiguration(4, (0, 0, 0, 0), ((0, 1), (2, 3)), {(0, 1): k1, (2, 3): k2})
    assert len(intersection_graph(cfg).components()) == 2
    assert connected_factorization_check(cfg, 8)
    from sykbarvinok.disorder import _hermitian_string, _ordered_trace

    strings = [_hermitian_string(k) for k in (k1, k1, k2, k2)]
    assert _ordered_trace(strings, 8) == pytest.approx(2.0 ** (-2 * q))
    single = WickConfiguration(2, (0, 0), ((0, 1),), {(0, 1): k1})
    assert connected_factorization_check(single, 8)


def test_random_configuration_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidParity):
        random_configuration(8, 4, 3, rng)
    with pytest.raises(ValueError):
        WickConfiguration(2, (0, 0), ((0, 1),), {})


def test_instance_spectra_match_direct():
    seeds = [3, 4]
    batch = instance_spectra(8, 4, seeds)
    for row, sd in zip(batch, seeds):
        direct = spectrum(to_dense(build_hamiltonian(sample_instance(8, 4, sd))))
        np.testing.assert_allclose(row, direct, atol=1e-13)
    with pytest.raises(TooLargeForDense):
        instance_spectra(22, 4, [0])


def test_concentration_examples():
    ratio, se = concentration_ratio(8, 4, 0.0, 100, 0)
    assert ratio == 0 and se == 0
    with pytest.raises(StatisticsTooFew):
        concentration_ratio(8, 4, 0.1, 10, 0)


def test_fluctuations_identical_seeds_zero():
    devs = local_fluctuations(8, 4, 0.2, 0, 0, seed_pairs=[(5, 5), (5, 6)])
    assert devs[0] == 0.0
    assert devs[1] > 0.0
