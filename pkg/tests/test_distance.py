import numpy as np
import pytest
from scipy.optimize import minimize
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import qubit_pair
from incompat import SearchConfig
from incompat.distance import disturbance, q_alpha_directional, q_alpha_pair, q_alpha_set, qf_qubit_closed, qf_subspace_closed
from incompat.eur import t2_succ_avg
from incompat.exceptions import DimensionMismatch, InvalidSubspaceDim, NonUnitBloch
from incompat.linalg import Observable, commutator_norm, mub_bases, random_observable, subspace_pair


def _fidelity_disturbance(A, B, psi):
    """Hand-rolled 1 - F^2 between B statistics with and without a prior A measurement."""
    p = np.abs(B.basis.conj().T @ psi) ** 2
    pa = np.abs(A.basis.conj().T @ psi) ** 2
    q = (np.abs(A.basis.conj().T @ B.basis) ** 2).T @ pa
    return 1 - np.sum(np.sqrt(p * q)) ** 2


def _sphere_grid_max(A, B, n=2000):
    k = np.arange(n) + 0.5
    theta = np.arccos(1 - 2 * k / n)
    phi = np.pi * (1 + 5**0.5) * k
    ket = lambda t, f: np.array([np.cos(t / 2), np.exp(1j * f) * np.sin(t / 2)])
    vals = [_fidelity_disturbance(A, B, ket(t, f)) for t, f in zip(theta, phi)]
    i = int(np.argmax(vals))
    res = minimize(lambda x: -_fidelity_disturbance(A, B, ket(*x)), [theta[i], phi[i]], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return max(vals[i], -res.fun)


def test_qf_qubit_directional_example():
    A, B = qubit_pair(0.5)
    assert q_alpha_directional(A, B, "F").value == pytest.approx(0.375)
    assert q_alpha_pair(A, B, "F") == pytest.approx(0.1875)


@pytest.mark.parametrize("c", [0.0, 0.2, 0.5, 0.8])
def test_qubit_directional_search_against_grid(c, fast_config):
    A, B = qubit_pair(c)
    search = q_alpha_directional(A, B, "F", fast_config, "search")
    assert search.value == pytest.approx(0.5 - 0.5 * c * c, abs=1e-6)
    assert _sphere_grid_max(A, B) == pytest.approx(search.value, abs=2e-3)
    assert _sphere_grid_max(A, B) <= search.value + 1e-9


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_directional(d, fast_config):
    A, B = mub_bases(d, 2)
    assert q_alpha_directional(A, B, "F").value == pytest.approx(1 - 1 / d)
    assert q_alpha_directional(A, B, "F", fast_config, "search").value == pytest.approx(1 - 1 / d, abs=1e-6)
    assert q_alpha_pair(A, B, "F") == pytest.approx(0.5 * (1 - 1 / d))


def test_maximizer_reproduces_value(rng, fast_config):
    A, B = random_observable(rng, 3), random_observable(rng, 3)
    for alpha in ("1", "F", "inf"):
        res = q_alpha_directional(A, B, alpha, fast_config)
        assert disturbance(A, B, res.maximizer.matrix, alpha) == pytest.approx(res.value, abs=1e-9)
        assert 0 <= res.value <= 1


@pytest.mark.parametrize("alpha", ["1", "F", "inf"])
def test_self_and_commuting_pairs_vanish(alpha, rng, fast_config):
    A = random_observable(rng, 3)
    B = Observable(np.array([0.0, 4.0, 1.0]), A.basis)
    assert q_alpha_directional(A, A, alpha, fast_config, "search").value == pytest.approx(0, abs=1e-6)
    assert q_alpha_directional(A, B, alpha, fast_config, "search").value == pytest.approx(0, abs=1e-6)


@settings(max_examples=6)
@given(st.integers(0, 10_000))
def test_zero_iff_commuting(seed):
    rng = np.random.default_rng(seed)
    A, B = random_observable(rng, 3), random_observable(rng, 3)
    config = SearchConfig(restarts=8, max_iters=200, seed=seed)
    assert commutator_norm(A, B) > 1e-9
    assert q_alpha_directional(A, B, "F", config).value > 1e-6


def test_set_measure_examples(fast_config):
    assert q_alpha_set(mub_bases(2, 3), "F") == pytest.approx(1 / 3)
    A = random_observable(np.random.default_rng(3), 2)
    assert q_alpha_set([A, A, A], "F", fast_config) == pytest.approx(0, abs=1e-6)
    A, B = mub_bases(3, 2)
    assert q_alpha_set([A, B], "F") == pytest.approx(q_alpha_pair(A, B, "F"))


def test_closed_form_examples():
    assert qf_qubit_closed([0, 0, 1], [1, 0, 0]) == pytest.approx(0.25)
    assert qf_qubit_closed([0, 0, 1], [0, 0, -1]) == pytest.approx(0.0)
    assert qf_qubit_closed([0, 0, 1], [0.5, 0, np.sqrt(3) / 2]) == pytest.approx(0.0625)
    assert qf_subspace_closed(20, 10) == pytest.approx(0.45)
    assert qf_subspace_closed(20, 19) == 0.0
    assert qf_subspace_closed(7, 0) == pytest.approx(0.5 * (1 - 1 / 7))


def test_closed_form_errors():
    with pytest.raises(NonUnitBloch):
        qf_qubit_closed([0, 0, 2], [1, 0, 0])
    with pytest.raises(InvalidSubspaceDim):
        qf_subspace_closed(4, 4)
    with pytest.raises(DimensionMismatch):
        q_alpha_pair(mub_bases(2, 2)[0], mub_bases(3, 2)[0])


@pytest.mark.parametrize("d,d_c", [(3, 1), (4, 1), (5, 2)])
def test_subspace_search_matches_closed_form(d, d_c, fast_config):
    A, B = subspace_pair(d, d_c)
    assert q_alpha_pair(A, B, "F", fast_config, "search") == pytest.approx(qf_subspace_closed(d, d_c), abs=5e-3)


@settings(max_examples=6)
@given(st.integers(0, 10_000))
def test_pair_measure_above_successive_bound(seed):
    rng = np.random.default_rng(seed)
    A, B = random_observable(rng, 3), random_observable(rng, 3)
    config = SearchConfig(restarts=8, max_iters=300, seed=seed)
    assert q_alpha_pair(A, B, "F", config) >= t2_succ_avg(A, B) - 1e-9


@given(st.floats(-1, 1))
def test_qubit_fidelity_measure_dominates_q(c):
    qf = 0.25 * (1 - c * c)
    q = 0.25 * (1 - abs(c))
    assert qf >= q - 1e-15
    if 1e-6 < abs(c) < 1 - 1e-6:
        assert qf > q


@pytest.mark.parametrize("d", [3, 6, 20])
def test_subspace_fidelity_measure_dominates_q(d):
    from incompat.fidelity import q_subspace_closed

    for d_c in range(d):
        assert qf_subspace_closed(d, d_c) >= q_subspace_closed(d, d_c) - 1e-15
