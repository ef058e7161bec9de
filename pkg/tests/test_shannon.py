import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcap.shannon import (
    ConvergenceError,
    DiscreteChannel,
    ba_capacity,
    binary_symmetric,
    blahut_arimoto,
    classical_erasure,
    dary_symmetric,
    dary_symmetric_capacity,
    h_dary,
    mutual_information,
    noiseless,
    shannon_entropy,
)


def brute_force_capacity(ch: DiscreteChannel, grid: int = 400) -> float:
    # oracle for binary-input channels: scan the prior
    best = 0.0
    for t in np.linspace(0, 1, grid + 1):
        best = max(best, mutual_information(ch, [t, 1 - t]))
    return best


def test_shannon_entropy():
    assert shannon_entropy([0.5, 0.5]) == 1.0
    assert shannon_entropy([1, 0]) == 0.0
    assert abs(shannon_entropy([0.75, 0.25]) - 0.8112781244591328) < 1e-12
    with pytest.raises(ValueError):
        shannon_entropy([0.5, 0.6])


def test_h_dary():
    for d in (2, 3, 7):
        assert h_dary(1, d) == 0
        assert abs(h_dary(1 / d, d) - np.log2(d)) < 1e-12
    assert abs(h_dary(0.5, 4) - (0.5 + 0.5 * np.log2(6))) < 1e-12
    with pytest.raises(ValueError):
        h_dary(1.2, 3)


def test_dary_symmetric():
    assert np.abs(dary_symmetric(3, 0).matrix - np.eye(3)).max() == 0
    assert np.abs(dary_symmetric(3, 1).matrix - 1 / 3).max() < 1e-16
    bsc = dary_symmetric(2, 0.5).matrix
    assert abs(bsc[0, 1] - 0.25) < 1e-16


def test_classical_erasure():
    ch = classical_erasure(4, 0.0)
    assert ch.outputs == 5
    assert np.abs(ch.matrix[:, :4] - np.eye(4)).max() == 0
    assert np.all(classical_erasure(4, 1.0).matrix[:, 4] == 1)
    assert abs(ba_capacity(classical_erasure(4, 0.3)) - 1.4) < 1e-9


def test_channel_validation():
    with pytest.raises(ValueError):
        DiscreteChannel([[0.5, 0.4]])
    with pytest.raises(ValueError):
        DiscreteChannel([[1.5, -0.5]])


def test_ba_known_values():
    for m in (2, 3, 8):
        assert abs(ba_capacity(noiseless(m)) - np.log2(m)) < 1e-9
    # crossover 1/3 and the 4-ary symmetric channel at x = 2/3
    assert abs(ba_capacity(binary_symmetric(1 / 3)) - 0.0817041659455105) < 1e-9
    assert abs(ba_capacity(dary_symmetric(4, 2 / 3)) - 0.2075187496394219) < 1e-9


def test_ba_matches_brute_force_binary_input():
    rng = np.random.default_rng(3)
    for _ in range(5):
        rows = rng.dirichlet(np.ones(3), size=2)
        ch = DiscreteChannel(rows)
        assert abs(ba_capacity(ch, 1e-10) - brute_force_capacity(ch, 4000)) < 1e-6


def test_ba_bracket_and_result():
    res = blahut_arimoto(DiscreteChannel([[0.9, 0.1, 0.0], [0.2, 0.3, 0.5]]), tol=1e-10)
    assert res.lower <= res.capacity <= res.upper
    assert 0 <= res.bracket <= 1e-10
    assert abs(res.prior.sum() - 1) < 1e-12


def test_ba_nonconvergence():
    ch = DiscreteChannel([[0.9, 0.1, 0.0], [0.2, 0.3, 0.5]])
    with pytest.raises(ConvergenceError):
        blahut_arimoto(ch, tol=1e-15, max_iter=3)
    with pytest.raises(ValueError):
        blahut_arimoto(ch, tol=0)


@pytest.mark.parametrize("d", [2, 3, 4, 9])
def test_ba_matches_closed_form(d):
    for x in np.linspace(0, 1, 11):
        closed = dary_symmetric_capacity(d, x)
        assert abs(ba_capacity(dary_symmetric(d, x)) - closed) < 1e-6
        literal = np.log2(d) - h_dary(1 - x * (d - 1) / d, d)
        assert abs(closed - literal) < 1e-12


def test_closed_form_reference_values():
    assert abs(dary_symmetric_capacity(2, 5 / 6) - 0.02013) < 5e-6
    for d in (2, 5):
        assert dary_symmetric_capacity(d, 0) == pytest.approx(np.log2(d), abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 9])
def test_closed_form_monotone(d):
    vals = [dary_symmetric_capacity(d, x) for x in np.linspace(0, 1, 201)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m,x", list(itertools.product([2, 3, 4, 9], [0, 0.25, 0.5, 0.9, 1])))
def test_erasure_capacity(m, x):
    assert abs(ba_capacity(classical_erasure(m, x)) - (1 - x) * np.log2(m)) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.integers(2, 5), st.integers(2, 5))
def test_data_processing(seed, a, b, c):
    rng = np.random.default_rng(seed)
    first = DiscreteChannel(rng.dirichlet(np.ones(b), size=a))
    second = DiscreteChannel(rng.dirichlet(np.ones(c), size=b))
    ca = ba_capacity(first)
    cab = ba_capacity(first.then(second))
    assert cab <= ca + 2e-9
    assert 0 <= cab <= np.log2(min(a, c)) + 1e-12
