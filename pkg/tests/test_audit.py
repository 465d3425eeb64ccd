import pytest

from incompat.audit import GATING, audit_failed, run_audit
from incompat.search import SearchConfig

CONFIG = SearchConfig(restarts=16, tol=1e-6)


@pytest.fixture(scope="module")
def qubit_rows():
    return run_audit("qubit_grid", CONFIG)


def test_qubit_grid_gating_rows_hold(qubit_rows):
    assert not audit_failed(qubit_rows)
    for row in qubit_rows:
        if row.inequality in ("Q>=t2", "QF>=t2succ"):
            assert row.verdict == "tight"


def test_qubit_grid_flags_as_stated_qp(qubit_rows):
    # the as_stated quadratic program gives 1/2 for every qubit pair
    flagged = {r.instance for r in qubit_rows if r.inequality == "QF_dir>=qp_as_stated" and r.verdict == "violated"}
    assert "qubit cos=0.0" not in flagged
    assert "qubit cos=0.5" in flagged


def test_mub_set_entropy_rows_tight():
    rows = run_audit("mub_set", CONFIG)
    assert all(r.verdict == "tight" for r in rows if r.inequality == "Q>=t2")
    assert not audit_failed(rows)


def test_subspace_additivity_rows():
    rows = run_audit("subspace_grid", CONFIG)
    additivity = [r for r in rows if r.inequality == "additivity"]
    assert len(additivity) == 3 + 4 + 5
    assert all(r.verdict == "tight" for r in additivity)
    assert not audit_failed(rows)


def test_rows_serialize():
    row = run_audit("qubit_grid", CONFIG)[0]
    assert set(row.as_dict()) == {"instance", "inequality", "lhs", "rhs", "verdict"}
    assert row.gating == (row.inequality in GATING)


def test_unknown_corpus():
    with pytest.raises(ValueError):
        run_audit("nope")
