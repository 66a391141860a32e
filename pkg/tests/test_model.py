import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykbarvinok.errors import IndexOutOfRange, InvalidLocality, InvalidParity
from sykbarvinok.majorana import SparseOperator, adjoint, make_string
from sykbarvinok.model import (
    Observable,
    SykInstance,
    build_hamiltonian,
    colex_subsets,
    coupling_variance,
    dump_instance,
    dump_observable,
    gaussian_stream,
    load_instance,
    load_observable,
    observable_stats,
    parse_observable,
    sample_instance,
)
from sykbarvinok.oracle import spectrum, to_dense

# First couplings of seed 0 at n=8, q=4, frozen to detect generator drift.
GOLDEN_SEED0 = [0.0171617910065411, 0.32290615439608594, -0.20846227202553586]


def test_variance_formula():
    assert coupling_variance(8, 4) == 6 / 512


def test_sample_instance_shape_and_determinism():
    a = sample_instance(8, 4, 1)
    b = sample_instance(8, 4, 1)
    assert len(a.couplings) == 70
    assert a == b
    assert a.couplings == b.couplings
    assert sample_instance(8, 4, 2) != a


def test_golden_couplings():
    np.testing.assert_array_equal(sample_instance(8, 4, 0).values[:3], GOLDEN_SEED0)


def test_pooled_variance_within_three_standard_errors():
    vals = np.concatenate([sample_instance(8, 4, s).values for s in range(1, 101)])
    s2 = coupling_variance(8, 4)
    # Standard error of the sample variance of Gaussians is sigma^2 sqrt(2/(N-1)).
    assert abs(vals.var(ddof=1) - s2) <= 3 * s2 * math.sqrt(2 / (vals.size - 1))
    assert abs(vals.mean()) <= 3 * math.sqrt(s2 / vals.size)


def test_gaussian_stream_matches_scalar_box_muller():
    words = np.random.Philox(key=5).random_raw(6)
    ref = []
    for w1, w2 in zip(words[0::2], words[1::2]):
        u1 = ((int(w1) >> 11) + 1) / 2.0**53
        u2 = (int(w2) >> 11) / 2.0**53
        r = math.sqrt(-2.0 * math.log(u1))
        ref += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    np.testing.assert_allclose(gaussian_stream(5, 6), ref, rtol=0, atol=1e-15)


def test_gaussian_stream_prefix_stable():
    np.testing.assert_array_equal(gaussian_stream(9, 7), gaussian_stream(9, 20)[:7])
    with pytest.raises(ValueError):
        gaussian_stream(-1, 3)


def test_sample_errors():
    with pytest.raises(InvalidParity):
        sample_instance(7, 4, 1)
    with pytest.raises(InvalidParity):
        sample_instance(8, 3, 1)
    with pytest.raises(InvalidLocality):
        sample_instance(4, 6, 1)
    with pytest.warns(UserWarning):
        sample_instance(6, 2, 1)


def test_colex_order():
    subs = colex_subsets(5, 2)
    assert subs[:4] == ((0, 1), (0, 2), (1, 2), (0, 3))


def test_build_hamiltonian_examples():
    n, q = 8, 4
    zero = SykInstance(n, q, 0, np.zeros(math.comb(n, q)))
    h = build_hamiltonian(zero, Observable([(0.5, (0, 1))]), 1.0)
    assert h == 0.5 * SparseOperator.from_terms(n, [make_string([0, 1], n)])
    inst = sample_instance(n, q, 7)
    obs = Observable([(0.3, (1, 2, 5, 6))])
    assert build_hamiltonian(inst, obs, 0.0) == build_hamiltonian(inst)
    h = build_hamiltonian(inst, obs, 0.1)
    assert adjoint(h) == h
    e = np.linalg.eigvals(to_dense(h))
    assert np.abs(e.imag).max() < 1e-12
    with pytest.raises(IndexOutOfRange):
        build_hamiltonian(inst, Observable([(1.0, (6, 8))]), 1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from([(6, 2), (8, 4), (10, 4), (8, 6)]))
def test_hermiticity_property(seed, nq):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inst = sample_instance(*nq, seed)
    h = build_hamiltonian(inst, Observable([(0.2, (0, 1)), (-0.4, (0, 2, 3, 5))]), 0.3)
    assert adjoint(h) == h


def test_observable_stats_examples():
    assert observable_stats(Observable([(0.5, (0, 1))])) == (0.5, 2)
    assert observable_stats(Observable([(0.5, (0, 1)), (-0.25, (1, 2, 3, 4))])) == (0.75, 4)
    assert observable_stats(Observable([(1.0, (0, 1)), (1.0, (2, 3))])) == (1.0, 2)


def test_observable_validation():
    with pytest.raises(InvalidParity):
        Observable([(1.0, (0, 1, 2))])
    with pytest.raises(TypeError):
        Observable([(1j, (0, 1))])
    with pytest.raises(ValueError):
        Observable([(1.0, (2, 1))])


def test_parse_observable():
    obs = parse_observable("0.5:0,1; -0.25:1,2,3,4")
    assert obs.terms == ((0.5, (0, 1)), (-0.25, (1, 2, 3, 4)))


def test_instance_round_trip():
    inst = sample_instance(8, 4, 11)
    text = dump_instance(inst)
    assert load_instance(text) == inst
    assert load_instance(io.StringIO(text)) == inst
    assert text.splitlines()[0] == "8 4 11"
    assert load_instance(dump_instance(inst, hex_floats=False)) == inst


def test_observable_round_trip():
    obs = Observable([(0.1, (0, 1)), (-2.5, (0, 3, 4, 7)), (1.0, ())])
    assert load_observable(dump_observable(obs)) == obs


def test_spectrum_real_and_sorted():
    e = spectrum(to_dense(build_hamiltonian(sample_instance(8, 4, 5))))
    assert np.all(np.diff(e) >= 0)
