import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from incompat.exceptions import DegenerateSpectrum, InvalidState, InvalidSubspaceDim, NonPrimeDimension, NonUnitBloch, NotHermitian, ParseError, TooManyBases
from incompat.linalg import (
    BlochVector,
    DensityMatrix,
    Ensemble,
    Observable,
    PureState,
    commutator_norm,
    direct_sum_ensemble,
    eigensystem,
    eigenstate_ensemble,
    mub_bases,
    overlap_matrix,
    qubit_observable,
    random_observable,
    subspace_pair,
)

seeds = st.integers(0, 2**32 - 1)


def test_eigensystem_pauli_z():
    obs = eigensystem(np.diag([1.0, -1.0]))
    assert np.allclose(obs.eigenvalues, [-1, 1])
    assert np.allclose(np.abs(obs.basis), [[0, 1], [1, 0]])


def test_eigensystem_rejects_degenerate():
    with pytest.raises(DegenerateSpectrum):
        eigensystem(np.eye(2))


def test_eigensystem_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eigensystem(np.array([[0, 1], [0, 0]]))


@given(seeds)
def test_eigensystem_reconstructs_matrix(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = X + X.conj().T
    assert np.allclose(eigensystem(H).matrix(), H, atol=1e-10)


def test_qubit_overlap_for_diagonal_bloch_vector():
    a = np.ones(3) / np.sqrt(3)
    O = overlap_matrix(qubit_observable([0, 0, 1]), qubit_observable(a))
    assert np.isclose(O.max(), (1 + 1 / np.sqrt(3)) / 2)


def test_bloch_vector_must_be_unit():
    with pytest.raises(NonUnitBloch):
        BlochVector([1.0, 1.0, 0.0])


@given(seeds, st.integers(2, 5))
def test_overlap_matrix_doubly_stochastic(seed, d):
    rng = np.random.default_rng(seed)
    O = overlap_matrix(random_observable(rng, d), random_observable(rng, d))
    assert np.allclose(O.sum(axis=0), 1)
    assert np.allclose(O.sum(axis=1), 1)


@pytest.mark.parametrize("d,N", [(2, 2), (2, 3), (3, 4), (5, 6), (7, 3)])
def test_mub_bases_unbiased(d, N):
    bases = mub_bases(d, N)
    for i in range(N):
        for j in range(i + 1, N):
            assert np.allclose(overlap_matrix(bases[i], bases[j]), 1 / d, atol=1e-12)


def test_mub_bases_errors():
    with pytest.raises(NonPrimeDimension):
        mub_bases(4, 2)
    with pytest.raises(TooManyBases):
        mub_bases(3, 5)


@pytest.mark.parametrize("d,d_c", [(3, 0), (3, 1), (4, 2), (5, 1), (6, 2)])
def test_subspace_pair_pattern(d, d_c):
    O = overlap_matrix(*subspace_pair(d, d_c))
    assert np.allclose(np.diag(O)[:d_c], 1)
    assert np.allclose(O[d_c:, d_c:], 1 / (d - d_c))


def test_subspace_pair_rejects_bad_dim():
    with pytest.raises(InvalidSubspaceDim):
        subspace_pair(3, 3)


def test_commutator_norm_zero_iff_same_basis(rng):
    A = random_observable(rng, 3)
    B = Observable(np.array([5.0, -1.0, 2.0]), A.basis)
    assert commutator_norm(A, B) < 1e-12
    assert commutator_norm(A, random_observable(rng, 3)) > 1e-3


def test_pure_state_phase_is_canonical():
    s = PureState(np.array([1j, 0]))
    assert s == PureState(np.array([1, 0]))
    with pytest.raises(InvalidState):
        PureState(np.array([1.0, 1.0]))


def test_density_matrix_validation():
    assert DensityMatrix.maximally_mixed(3).rank() == 3
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        DensityMatrix.from_bloch([1.0, 1.0, 0.0])


def test_observable_json_round_trip(rng):
    obs = random_observable(rng, 3)
    back = Observable.from_json(obs.to_json())
    assert np.allclose(back.basis, obs.basis)
    assert np.allclose(back.eigenvalues, obs.eigenvalues)


def test_observable_json_shape_errors():
    with pytest.raises(ParseError):
        Observable.from_json({"dim": 2, "eigenvalues": [0, 1], "eigenvectors": [[1, 0]]})
    with pytest.raises(ParseError):
        Observable.from_json({"dim": 2})


def test_ensemble_json_and_direct_sum(rng):
    S = eigenstate_ensemble([random_observable(rng, 2), random_observable(rng, 2)])
    assert S.count == 4 and S.dim == 2
    assert np.allclose(Ensemble.from_json(S.to_json()).vectors, S.vectors)
    T = direct_sum_ensemble(S, S)
    assert T.dim == 4 and T.count == 8
    assert np.allclose(T.vectors[:4, 2:], 0)
