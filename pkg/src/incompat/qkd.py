"""Intercept-resend eavesdropping on a prepare-and-measure protocol.

Alice sends a uniformly chosen state from the ensemble, Eve measures a
POVM and re-prepares ``sigma_k`` on outcome ``k``, and Bob measures in
Alice's basis (sifting is assumed). The error rate of any strategy is at
least the incompatibility Q of the ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, InvalidState, MissingReconstruction
from .fidelity import RankOnePovm, fmax_ascent, q_closed_form, reconstruction_states
from .linalg import DensityMatrix, Ensemble
from .search import SearchConfig

BLOCK = 10_000


@dataclass(frozen=True)
class EveStrategy:
    povm: RankOnePovm
    reconstruction: tuple  # DensityMatrix per POVM element

    def __post_init__(self):
        recon = tuple(r if isinstance(r, DensityMatrix) else DensityMatrix(np.asarray(r, dtype=complex)) for r in self.reconstruction)
        object.__setattr__(self, "reconstruction", recon)

    @classmethod
    def resend_directions(cls, povm: RankOnePovm) -> "EveStrategy":
        """Re-prepare the measured direction itself."""
        return cls(povm, tuple(DensityMatrix.from_pure(v) for v in povm.directions))

    def to_json(self) -> dict:
        return {
            "povm": self.povm.to_json(),
            "reconstruction": [[[float(z.real), float(z.imag)] for z in r.matrix.ravel()] for r in self.reconstruction],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EveStrategy":
        povm = RankOnePovm.from_json(data["povm"])
        d = povm.dim
        recon = []
        for r in data.get("reconstruction", []):
            pairs = np.asarray(r, dtype=float)
            recon.append(DensityMatrix((pairs[..., 0] + 1j * pairs[..., 1]).reshape(d, d)))
        return cls(povm, tuple(recon))


@dataclass(frozen=True)
class SimResult:
    trials: int
    empirical_error: float
    std_error: float
    analytic_error: float

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "empirical_error": self.empirical_error,
            "std_error": self.std_error,
            "analytic_error": self.analytic_error,
        }


def _check(S: Ensemble, eve: EveStrategy):
    if eve.povm.dim != S.dim:
        raise DimensionMismatch(f"strategy acts on dimension {eve.povm.dim}, ensemble on {S.dim}")
    if len(eve.reconstruction) != len(eve.povm):
        raise MissingReconstruction(f"{len(eve.povm)} outcomes but {len(eve.reconstruction)} reconstruction states")
    for r in eve.reconstruction:
        if r.dim != S.dim:
            raise DimensionMismatch("reconstruction state dimension differs from the ensemble")


def _tables(S: Ensemble, eve: EveStrategy) -> tuple[np.ndarray, np.ndarray]:
    """Outcome probabilities ``Tr[M_k psi_s]`` and success probabilities ``Tr[sigma_k psi_s]``, both ``(n, K)``."""
    V = S.vectors
    born = eve.povm.weights[None, :] * np.abs(V.conj() @ eve.povm.directions.T) ** 2
    sig = np.stack([r.matrix for r in eve.reconstruction])
    success = np.einsum("si,kij,sj->sk", V.conj(), sig, V).real
    return born, np.clip(success, 0.0, 1.0)


def analytic_error_rate(S: Ensemble, eve: EveStrategy) -> float:
    """``1 - (1/n) sum_{s,k} Tr[M_k psi_s] Tr[sigma_k psi_s]``."""
    _check(S, eve)
    born, success = _tables(S, eve)
    return float(1.0 - np.sum(born * success) / S.count)


def _block_errors(born: np.ndarray, success: np.ndarray, trials: int, rng: np.random.Generator) -> int:
    n = born.shape[0]
    s = rng.integers(n, size=trials)
    cdf = np.cumsum(born, axis=1)
    cdf /= cdf[:, -1:]
    k = (rng.random(trials)[:, None] > cdf[s]).sum(axis=1)
    k = np.minimum(k, born.shape[1] - 1)
    ok = rng.random(trials) < success[s, k]
    return int(trials - ok.sum())


def simulate_error_rate(S: Ensemble, eve: EveStrategy | None, trials: int, seed: int = 42) -> SimResult:
    """Monte Carlo estimate of the error rate.

    ``eve=None`` simulates the undisturbed channel. Trials run in fixed
    blocks, each with its own spawned generator, so the result depends
    only on ``seed`` and ``trials``.
    """
    if trials < 1:
        raise InvalidState("trials must be at least 1")
    if eve is None:
        born = np.eye(S.count)
        success = np.ones((S.count, S.count))
        analytic = 0.0
    else:
        analytic = analytic_error_rate(S, eve)
        born, success = _tables(S, eve)
    sizes = [BLOCK] * (trials // BLOCK) + ([trials % BLOCK] if trials % BLOCK else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    errors = sum(_block_errors(born, success, m, np.random.default_rng(ss)) for m, ss in zip(sizes, streams))
    p = errors / trials
    return SimResult(trials, float(p), float(np.sqrt(p * (1 - p) / trials)), float(analytic))


def optimal_strategy(S: Ensemble, observables=None, config: SearchConfig | None = None) -> EveStrategy:
    """Best known attack: the optimal measurement with the best re-preparation for each outcome.

    A closed-form measurement is used when ``observables`` form a
    recognized family; otherwise the measurement comes from
    :func:`fmax_ascent`. Re-preparing the top eigenvector of the outcome's
    average-projection operator makes the error rate equal ``1 - F``.
    """
    povm = None
    if observables is not None:
        closed = q_closed_form(observables)
        if closed is not None:
            povm = closed[1]
    if povm is None:
        povm = fmax_ascent(S, config).povm
    recon = reconstruction_states(S, povm)
    return EveStrategy(povm, tuple(DensityMatrix.from_pure(v) for v in recon))
