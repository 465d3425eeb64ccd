import numpy as np
import pytest
from sklearn.base import clone

from conftest import qubit_pair
from incompat.estimators import EntropicBound, IncompatibilityMeasure, check_observables
from incompat.exceptions import DimensionMismatch
from incompat.linalg import mub_bases, random_observable


@pytest.mark.parametrize(
    "measure,expected",
    [("Q", 1 / 3), ("Q_F", 1 / 3)],
)
def test_mub_d3(measure, expected):
    est = IncompatibilityMeasure(measure=measure).fit(mub_bases(3, 2))
    assert est.value_ == pytest.approx(expected)
    assert est.method_ == "closed_form"


def test_qubit_pair_values():
    obs = qubit_pair(0.6)
    assert IncompatibilityMeasure().fit(obs).value_ == pytest.approx(0.1)
    assert IncompatibilityMeasure(measure="Q_F").fit(obs).value_ == pytest.approx(0.16)


def test_search_path_and_attributes():
    rng = np.random.default_rng(2)
    obs = [random_observable(rng, 3), random_observable(rng, 3)]
    est = IncompatibilityMeasure(measure="Q_1", restarts=8, max_iters=200).fit(obs)
    assert est.method_ == "restart_search"
    assert est.directional_.shape == (2, 2) and np.all(np.diag(est.directional_) == 0)
    q = IncompatibilityMeasure(restarts=8, tol=1e-6).fit(obs)
    assert q.method_ == "ascent" and 0 < q.value_ < 1


def test_entropic_bound():
    assert EntropicBound().fit(mub_bases(2, 3)).value_ == pytest.approx(1 / 3)
    assert EntropicBound(kind="t2_succ").fit(mub_bases(3, 2)).value_ == pytest.approx(1 / 3)
    assert EntropicBound(kind="h2").fit(mub_bases(2, 2)).value_ == pytest.approx(-np.log2(0.75))


def test_params_and_clone():
    est = IncompatibilityMeasure(measure="Q_F", restarts=5)
    assert clone(est).get_params()["restarts"] == 5
    with pytest.raises(ValueError):
        IncompatibilityMeasure(measure="Q_2").fit(mub_bases(2, 2))


def test_check_observables():
    with pytest.raises(DimensionMismatch):
        check_observables(mub_bases(2, 2)[:1])
    with pytest.raises(DimensionMismatch):
        check_observables([mub_bases(2, 2)[0], mub_bases(3, 2)[0]])
    with pytest.raises(TypeError):
        check_observables([np.eye(2), np.eye(2)])
