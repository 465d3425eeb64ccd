import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from incompat import SearchConfig
from incompat.exceptions import InvalidPovm, InvalidSubspaceDim
from incompat.fidelity import (
    RankOnePovm,
    avg_fidelity_element,
    constant_povm_check,
    fmax_ascent,
    fmax_direct_sum,
    povm_fidelity,
    q_mub_closed,
    q_qubit_closed,
    q_subspace_closed,
    subspace_fmax_composition,
)
from incompat.linalg import eigenstate_ensemble, mub_bases, qubit_observable, random_observable, subspace_pair

CONFIG = SearchConfig(restarts=32, seed=42, tol=1e-7)


def _povm_oracle(S, starts=4, seed=0):
    """Independent estimate: L-BFGS over POVMs C^{-1/2} v_k v_k^dag C^{-1/2} with K = d^2 elements."""
    V, d = S.vectors, S.dim
    K = d * d

    def fidelity(x):
        X = (x[: K * d] + 1j * x[K * d :]).reshape(K, d)
        C = X.T @ X.conj()
        w, U = np.linalg.eigh(C)
        Cm = (U / np.sqrt(w)) @ U.conj().T
        Y = X @ Cm.T  # rows C^{-1/2} v_k
        born = np.abs(V.conj() @ Y.T) ** 2  # (n, K)
        total = 0.0
        for k in range(K):
            M = np.einsum("s,si,sj->ij", born[:, k], V, V.conj())
            total += np.linalg.eigvalsh(M)[-1]
        return total / S.count

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(starts):
        res = minimize(lambda x: -fidelity(x), rng.normal(size=2 * K * d), method="L-BFGS-B")
        best = max(best, -res.fun)
    return best


def test_single_basis_ensemble_has_unit_fidelity():
    S = eigenstate_ensemble(mub_bases(3, 2)[:1])
    assert avg_fidelity_element(S, [1, 0, 0]) == pytest.approx(1.0)
    assert fmax_ascent(S, CONFIG).fmax_lower == pytest.approx(1.0, abs=1e-9)


def test_bb84_element_along_bisector():
    S = eigenstate_ensemble(mub_bases(2, 2))
    chi = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)])  # Bloch direction (1, 0, 1)/sqrt(2)
    assert avg_fidelity_element(S, chi) == pytest.approx(0.75)
    assert povm_fidelity(S, q_qubit_closed([0, 0, 1], [1, 0, 0])[1]) == pytest.approx(0.75)


@pytest.mark.parametrize("N,d", [(2, 2), (3, 2), (2, 3), (2, 5)])
def test_ascent_matches_mub_closed_form(N, d):
    res = fmax_ascent(eigenstate_ensemble(mub_bases(d, N)), CONFIG)
    assert res.q_upper == pytest.approx(q_mub_closed(N, d), abs=1e-3)
    assert res.povm.completeness_residual() <= 1e-8
    assert povm_fidelity(eigenstate_ensemble(mub_bases(d, N)), res.povm) == pytest.approx(res.fmax_lower, abs=1e-9)


def test_closed_form_examples():
    assert q_mub_closed(2, 2) == 0.25
    assert q_mub_closed(1, 5) == 0.0
    assert q_mub_closed(3, 3) == pytest.approx(4 / 9)
    assert q_subspace_closed(20, 0) == pytest.approx(0.475)
    assert q_subspace_closed(20, 19) == 0.0
    assert q_subspace_closed(3, 1) == pytest.approx(1 / 6)
    with pytest.raises(InvalidSubspaceDim):
        q_subspace_closed(3, -1)


@pytest.mark.parametrize("c,expected", [(0.0, 0.25), (1.0, 0.0), (-0.5, 0.125)])
def test_qubit_closed_form(c, expected):
    b = [np.sqrt(1 - c * c), 0, c]
    q, povm = q_qubit_closed([0, 0, 1], b)
    assert q == pytest.approx(expected)
    S = eigenstate_ensemble([qubit_observable([0, 0, 1]), qubit_observable(b)])
    assert 1 - povm_fidelity(S, povm) == pytest.approx(expected, abs=1e-12)


def test_subspace_ascent_and_composition():
    assert subspace_fmax_composition(3, 1) == pytest.approx(5 / 6)
    assert fmax_direct_sum(None, 1.0, 2, None, 0.75, 4) == pytest.approx(5 / 6)
    assert fmax_direct_sum(None, 0.6, 3, None, 0.6, 5) == pytest.approx(0.6)
    for d, d_c in [(3, 1), (5, 1), (5, 2)]:
        res = fmax_ascent(eigenstate_ensemble(subspace_pair(d, d_c)), CONFIG)
        assert res.q_upper == pytest.approx(q_subspace_closed(d, d_c), abs=1e-3)
        assert 1 - subspace_fmax_composition(d, d_c) == pytest.approx(q_subspace_closed(d, d_c), abs=1e-12)


@pytest.mark.parametrize("seed,d", [(0, 2), (1, 2), (2, 3)])
def test_ascent_against_independent_povm_oracle(seed, d):
    rng = np.random.default_rng(seed)
    S = eigenstate_ensemble([random_observable(rng, d), random_observable(rng, d)])
    ascent = fmax_ascent(S, CONFIG).fmax_lower
    oracle = _povm_oracle(S, starts=3, seed=seed)
    assert ascent >= oracle - 1e-6
    assert ascent == pytest.approx(oracle, abs=2e-3)


def test_constant_povm_check():
    S = eigenstate_ensemble(mub_bases(3, 2))
    basis = mub_bases(3, 2)[1].basis.T
    ok, spread = constant_povm_check(S, RankOnePovm(np.ones(3), basis))
    assert ok and spread < 1e-12
    bb84 = eigenstate_ensemble(mub_bases(2, 2))
    assert constant_povm_check(bb84, q_qubit_closed([0, 0, 1], [1, 0, 0])[1])[0]
    # half Z basis, half Y basis: Y elements are blind to the ensemble
    y = np.array([[1, 1j], [1, -1j]]) / np.sqrt(2)
    skew = RankOnePovm(np.full(4, 0.5), np.vstack([np.eye(2), y]))
    ok, spread = constant_povm_check(bb84, skew)
    assert not ok and spread == pytest.approx(0.25)


def test_povm_validation_and_json():
    with pytest.raises(InvalidPovm):
        RankOnePovm(np.ones(2), np.array([[1, 0], [1, 0]]))
    with pytest.raises(InvalidPovm):
        RankOnePovm(np.array([1.0, -1.0]), np.eye(2))
    with pytest.raises(InvalidPovm):
        RankOnePovm(np.full(5, 0.4), np.ones((5, 2)))
    povm = q_qubit_closed([0, 0, 1], [0.6, 0, 0.8])[1]
    back = RankOnePovm.from_json(povm.to_json())
    assert np.allclose(back.directions, povm.directions)


@settings(max_examples=5)
@given(st.integers(0, 10_000))
def test_ascent_fidelity_bounds(seed):
    rng = np.random.default_rng(seed)
    S = eigenstate_ensemble([random_observable(rng, 3), random_observable(rng, 3)])
    res = fmax_ascent(S, SearchConfig(restarts=8, seed=seed, tol=1e-5))
    assert 1 / 3 <= res.fmax_lower <= 1 + 1e-12
    assert povm_fidelity(S, res.povm) == pytest.approx(res.fmax_lower, abs=1e-9)
    assert res.pricing_gap >= -1e-9
