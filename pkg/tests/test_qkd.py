import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incompat import SearchConfig
from incompat.exceptions import DimensionMismatch, InvalidState, MissingReconstruction
from incompat.fidelity import RankOnePovm, fmax_ascent, q_mub_closed
from incompat.linalg import DensityMatrix, eigenstate_ensemble, mub_bases, random_observable
from incompat.qkd import EveStrategy, analytic_error_rate, optimal_strategy, simulate_error_rate

BB84 = mub_bases(2, 2)


def _error_by_traces(S, eve):
    """Independent oracle: explicit trace products over states and outcomes."""
    total = 0.0
    for s in S.vectors:
        psi = np.outer(s, s.conj())
        for M, sigma in zip(eve.povm.elements(), eve.reconstruction):
            total += np.trace(M @ psi).real * np.trace(sigma.matrix @ psi).real
    return 1 - total / S.count


def _z_strategy():
    return EveStrategy.resend_directions(RankOnePovm(np.ones(2), np.eye(2)))


def test_single_basis_perfect_cloning():
    S = eigenstate_ensemble(BB84[:1])
    assert analytic_error_rate(S, _z_strategy()) == pytest.approx(0.0)


def test_bb84_optimal_and_z_strategies():
    S = eigenstate_ensemble(BB84)
    eve = optimal_strategy(S, BB84)
    assert analytic_error_rate(S, eve) == pytest.approx(0.25)
    assert analytic_error_rate(S, _z_strategy()) == pytest.approx(0.25)
    assert analytic_error_rate(S, eve) == pytest.approx(_error_by_traces(S, eve))


def test_bb84_monte_carlo():
    S = eigenstate_ensemble(BB84)
    res = simulate_error_rate(S, optimal_strategy(S, BB84), 100_000, seed=42)
    assert 0.24 <= res.empirical_error <= 0.26
    assert res.analytic_error == pytest.approx(0.25)
    assert res == simulate_error_rate(S, optimal_strategy(S, BB84), 100_000, seed=42)


def test_no_eavesdropper():
    res = simulate_error_rate(eigenstate_ensemble(BB84), None, 100_000)
    assert res.empirical_error == 0.0 and res.analytic_error == 0.0


def test_simulation_depends_on_seed():
    S = eigenstate_ensemble(BB84)
    eve = _z_strategy()
    assert simulate_error_rate(S, eve, 20_000, seed=1) != simulate_error_rate(S, eve, 20_000, seed=2)


def test_optimal_strategy_reaches_one_minus_fidelity():
    rng = np.random.default_rng(11)
    S = eigenstate_ensemble([random_observable(rng, 3), random_observable(rng, 3)])
    config = SearchConfig(restarts=16, tol=1e-6)
    eve = optimal_strategy(S, config=config)
    assert analytic_error_rate(S, eve) == pytest.approx(1 - fmax_ascent(S, config).fmax_lower, abs=1e-9)
    assert analytic_error_rate(S, eve) <= analytic_error_rate(S, EveStrategy.resend_directions(eve.povm)) + 1e-12


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_every_strategy_is_above_q(seed):
    rng = np.random.default_rng(seed)
    S = eigenstate_ensemble(BB84)
    U = random_observable(rng, 2).basis
    sigma = [DensityMatrix.from_pure(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2)]
    eve = EveStrategy(RankOnePovm(np.ones(2), U.T), tuple(sigma))
    err = analytic_error_rate(S, eve)
    assert err >= q_mub_closed(2, 2) - 1e-9
    assert err == pytest.approx(_error_by_traces(S, eve))


def test_strategy_errors_and_json():
    S = eigenstate_ensemble(BB84)
    with pytest.raises(MissingReconstruction):
        analytic_error_rate(S, EveStrategy(RankOnePovm(np.ones(2), np.eye(2)), ()))
    with pytest.raises(DimensionMismatch):
        analytic_error_rate(eigenstate_ensemble(mub_bases(3, 2)), _z_strategy())
    with pytest.raises(InvalidState):
        simulate_error_rate(S, None, 0)
    eve = optimal_strategy(S, BB84)
    back = EveStrategy.from_json(eve.to_json())
    assert analytic_error_rate(S, back) == pytest.approx(analytic_error_rate(S, eve))
