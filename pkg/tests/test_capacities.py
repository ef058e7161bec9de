import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcap import capacities as cap
from qcap import channels as chn
from qcap.qmath import random_density_matrix, von_neumann_entropy
from qcap.shannon import binary_entropy, h_dary, shannon_entropy

GRID = [0.0, 0.25, 0.5, 2 / 3, 0.9]


def test_c1_values():
    assert abs(cap.c1_depolarizing(2, 2 / 3) - 0.0817) < 5e-5
    assert abs(cap.c1_depolarizing(2, 5 / 6) - 0.02013) < 5e-6
    for d in (2, 3, 7):
        assert cap.c1_depolarizing(d, 0) == pytest.approx(np.log2(d), abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5, 16])
def test_closed_forms_match_literal_formulas(d):
    for x in np.linspace(0, 1, 41):
        c1 = np.log2(d) - h_dary(1 - x * (d - 1) / d, d)
        ce = 2 * np.log2(d) - h_dary(1 - x * (d * d - 1) / d**2, d * d)
        assert abs(cap.c1_depolarizing(d, x) - c1) < 1e-12
        assert abs(cap.ce_depolarizing(d, x) - ce) < 1e-12
        if x >= d / (d + 1):
            fccc = np.log2(d) - h_dary(d - x * (d - 1 / d), d)
            assert abs(cap.fccc_mr_depolarizing(d, x) - fccc) < 1e-12


def test_fccc_mr_values():
    assert cap.fccc_mr_depolarizing(2, 2 / 3) == pytest.approx(1.0, abs=1e-12)
    assert abs(cap.fccc_mr_depolarizing(2, 5 / 6) - (1 - 0.8112781244591328)) < 1e-12
    assert cap.fccc_mr_depolarizing(3, 1) == 0
    with pytest.raises(cap.DomainError):
        cap.fccc_mr_depolarizing(2, 0.5)


def test_ce_values():
    assert abs(cap.ce_depolarizing(2, 2 / 3) - 0.2075) < 5e-5
    for d in (2, 3):
        assert cap.ce_depolarizing(d, 0) == pytest.approx(2 * np.log2(d), abs=1e-12)
        assert cap.ce_depolarizing(d, 1) == 0


def test_erasure_capacities():
    for d in (2, 3):
        assert np.allclose(cap.erasure_capacities(d, 0), [np.log2(d), np.log2(d), 2 * np.log2(d)])
        assert cap.erasure_capacities(d, 1) == (0, 0, 0)
    assert cap.erasure_capacities(2, 0.5) == (0.5, 0.0, 1.0)


def test_ce_dephasing():
    assert cap.ce_dephasing(0) == 2
    assert cap.ce_dephasing(1) == pytest.approx(1.0, abs=1e-15)
    assert abs(cap.ce_dephasing(0.5) - 1.188721875540867) < 1e-12


def test_hashing_bound():
    for d in (2, 3):
        assert cap.hashing_bound(chn.identity(d)) == pytest.approx(np.log2(d), abs=1e-12)
    assert abs(cap.hashing_bound(chn.depolarizing(2, 2 / 3)) + 0.7924812503605781) < 1e-12
    # spectrum {0.925, 0.025, 0.025, 0.025}
    want = 1 - shannon_entropy([0.925, 0.025, 0.025, 0.025])
    assert abs(want - 0.4968162683194162) < 1e-12
    assert abs(cap.hashing_bound(chn.depolarizing(2, 0.1)) - want) < 1e-12
    assert cap.hashing_bound(chn.depolarizing(2, 2 / 3), clamp=True) == 0
    with pytest.raises(ValueError):
        cap.hashing_bound(chn.erasure(2, 0.1))


@pytest.mark.parametrize("d,x", list(itertools.product([2, 3, 4], [0, 0.2, 0.5, 0.8, 1])))
def test_hashing_identity(d, x):
    got = cap.hashing_bound(chn.depolarizing(d, x))
    assert abs(got - (cap.ce_depolarizing(d, x) - np.log2(d))) < 1e-9


def test_qe():
    assert cap.qe_from_ce(2) == 1
    assert cap.qe_from_ce(0) == 0
    assert abs(cap.qe_from_ce(cap.ce_depolarizing(2, 2 / 3)) - 0.10375) < 5e-5
    with pytest.raises(ValueError):
        cap.qe_from_ce(-1)


def test_quantum_mutual_information_examples():
    rho = random_density_matrix(3, np.random.default_rng(0))
    qmi = cap.quantum_mutual_information(chn.identity(3), rho)
    assert abs(qmi - 2 * von_neumann_entropy(rho)) < 1e-9
    got = cap.quantum_mutual_information(chn.depolarizing(2, 2 / 3), np.eye(2) / 2)
    assert abs(got - cap.ce_depolarizing(2, 2 / 3)) < 1e-12
    assert abs(got - 0.2075) < 5e-5
    got = cap.quantum_mutual_information(chn.erasure(2, 0.5), np.eye(2) / 2)
    assert abs(got - 1.0) < 1e-12
    with pytest.raises(ValueError):
        cap.quantum_mutual_information(chn.identity(2), np.eye(3) / 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["dep", "era", "amp"]), st.floats(0, 1))
def test_qmi_range(seed, family, x):
    rng = np.random.default_rng(seed)
    ch = {"dep": lambda: chn.depolarizing(3, x), "era": lambda: chn.erasure(2, x),
          "amp": lambda: chn.amplitude_damping(x)}[family]()
    rho = random_density_matrix(ch.din, rng, rank=int(rng.integers(1, ch.din + 1)))
    q = cap.quantum_mutual_information(ch, rho)
    assert -1e-9 <= q <= 2 * np.log2(ch.din) + 1e-9


def test_bell_diagonal_maximally_mixed_equals_formula():
    rng = np.random.default_rng(11)
    for d in (2, 3):
        for _ in range(5):
            p = rng.dirichlet(np.ones(d * d))
            q = cap.quantum_mutual_information(chn.bell_diagonal(d, p), np.eye(d) / d)
            assert abs(q - (2 * np.log2(d) - shannon_entropy(p))) < 1e-9


def test_parametrization_round_trip():
    rng = np.random.default_rng(4)
    rho = random_density_matrix(3, rng)
    back = cap.params_to_rho(cap.rho_to_params(rho), 3)
    assert np.abs(back - rho).max() < 1e-10
    assert np.abs(cap.params_to_rho(np.zeros(9), 3) - np.eye(3) / 3).max() == 0


def test_ce_optimize_examples():
    res = cap.ce_optimize(chn.depolarizing(2, 2 / 3), tol=1e-8, restarts=4, seed=1)
    assert abs(res.value - 0.2075) < 5e-5
    assert abs(res.value - cap.ce_depolarizing(2, 2 / 3)) < 1e-5
    assert np.abs(res.argmax - np.eye(2) / 2).max() < 1e-3
    res = cap.ce_optimize(chn.erasure(3, 0.25), restarts=3)
    assert abs(res.value - 2.3774437510817345) < 1e-5
    res = cap.ce_optimize(chn.dephasing(0.5), restarts=3)
    assert abs(res.value - 1.188721875540867) < 1e-5


def test_ce_optimize_deterministic():
    a = cap.ce_optimize(chn.amplitude_damping(0.3), restarts=3, seed=5)
    b = cap.ce_optimize(chn.amplitude_damping(0.3), restarts=3, seed=5)
    assert a.restart_values == b.restart_values
    assert np.array_equal(a.argmax, b.argmax)


def test_ce_optimize_amplitude_damping_against_scan():
    # oracle: the optimum of a phase-covariant channel lies on diagonal inputs
    ch = chn.amplitude_damping(0.3)
    scan = max(cap.quantum_mutual_information(ch, np.diag([p, 1 - p]))
               for p in np.linspace(0, 1, 20001))
    res = cap.ce_optimize(ch, restarts=4)
    assert abs(res.value - scan) < 1e-6
    assert res.value >= scan - 1e-9


def test_ce_optimize_errors():
    with pytest.raises(ValueError):
        cap.ce_optimize(chn.identity(2), tol=0)
    with pytest.raises(ValueError):
        cap.ce_optimize(chn.identity(2), restarts=0)
    from qcap.shannon import ConvergenceError

    with pytest.raises(ConvergenceError):
        cap.ce_optimize(chn.depolarizing(2, 0.3), restarts=1, max_iter=2)


@pytest.mark.parametrize("d", [2, 3])
def test_inequality_chain(d):
    for x in np.linspace(d / (d + 1), 1, 50):
        c1, ce, fc = cap.c1_depolarizing(d, x), cap.ce_depolarizing(d, x), cap.fccc_mr_depolarizing(d, x)
        assert ce - c1 >= -1e-9
        assert fc - ce >= -1e-9


@pytest.mark.parametrize("d", [2, 3, 4])
def test_enhancement_limit(d):
    x = 1 - 1e-6
    ratio = cap.ce_depolarizing(d, x) / cap.c1_depolarizing(d, x)
    assert abs(ratio - (d + 1)) < 0.01 * (d + 1)


def test_depolarizing_bounds():
    for d in (2, 3):
        lo, hi = cap.depolarizing_bounds(d, 0)
        assert lo == pytest.approx(np.log2(d)) and hi == pytest.approx(np.log2(d))
    lo, hi = cap.depolarizing_bounds(2, 2 / 3)
    assert abs(lo - 0.0817) < 5e-5 and abs(hi - 0.2075) < 5e-5
    lo, hi = cap.depolarizing_bounds(1024, 0.5)
    assert abs((hi - lo) - binary_entropy(0.5)) < 0.01


def test_report():
    rep = cap.CapacityReport("demo")
    rep.add("C1", 0.1, "closed_form")
    rep.add("C_Sd", 0.2, "simulated", 1e-10)
    assert rep.get("C_Sd").bracket == 1e-10
    assert rep.to_dict()["entries"][0]["name"] == "C1"
    with pytest.raises(ValueError):
        rep.add("C9", 0.1, "closed_form")
    with pytest.raises(ValueError):
        rep.add("C1", float("nan"), "closed_form")
    with pytest.raises(ValueError):
        rep.add("C1", 0.1, "guessed")
