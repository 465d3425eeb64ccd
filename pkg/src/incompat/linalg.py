"""Hermitian linear algebra, state/observable types and special observable families.

All types are immutable after construction: their arrays are copied and
flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidState,
    InvalidSubspaceDim,
    NonPrimeDimension,
    NonUnitBloch,
    NotHermitian,
    ParseError,
    TooManyBases,
)

HERMITIAN_TOL = 1e-10
DEGENERACY_GAP = 1e-9
NORM_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def _frozen(a, dtype=complex) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def canonical_phase(vec: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    vec = np.asarray(vec, dtype=complex)
    idx = np.flatnonzero(np.abs(vec) > tol)
    if idx.size == 0:
        return vec.copy()
    first = vec[idx[0]]
    return vec * (np.abs(first) / first)


def _canonical_columns(basis: np.ndarray) -> np.ndarray:
    return np.column_stack([canonical_phase(basis[:, k]) for k in range(basis.shape[1])])


@dataclass(frozen=True)
class PureState:
    """A normalized ket with its global phase fixed."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if amps.size == 0 or norm == 0:
            raise InvalidState("state vector must be nonzero")
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"state vector has norm {norm!r}; use PureState.from_vector to normalize")
        object.__setattr__(self, "amplitudes", _frozen(canonical_phase(amps)))

    @classmethod
    def from_vector(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise InvalidState("state vector must be nonzero")
        return cls(vec / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dim == other.dim and np.allclose(self.amplitudes, other.amplitudes, atol=1e-10)

    def __hash__(self):
        return hash(np.round(self.amplitudes, 8).tobytes())


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive semidefinite matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidState("density matrix must be square")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise NotHermitian("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise InvalidState(f"density matrix has trace {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise InvalidState("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(0.5 * (rho + rho.conj().T)))

    @classmethod
    def from_pure(cls, state) -> "DensityMatrix":
        vec = np.asarray(state, dtype=complex).ravel()
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def from_bloch(cls, r) -> "DensityMatrix":
        r = np.asarray(r, dtype=float)
        if np.linalg.norm(r) > 1 + 1e-12:
            raise InvalidState("Bloch vector lies outside the unit ball")
        return cls(0.5 * (np.eye(2) + sum(c * s for c, s in zip(r, PAULIS))))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def rank(self, tol: float = 1e-8) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class BlochVector:
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).ravel()
        if c.shape != (3,):
            raise NonUnitBloch("Bloch vector must have three components")
        if abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise NonUnitBloch(f"Bloch vector norm {np.linalg.norm(c)!r} is not 1")
        object.__setattr__(self, "components", _frozen(c / np.linalg.norm(c), dtype=float))

    def dot(self, other: "BlochVector") -> float:
        return float(np.clip(self.components @ as_bloch(other).components, -1.0, 1.0))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


def as_bloch(v) -> BlochVector:
    return v if isinstance(v, BlochVector) else BlochVector(v)


@dataclass(frozen=True)
class Observable:
    """Non-degenerate observable: ascending real spectrum plus orthonormal eigenbasis.

    ``basis[:, k]`` is the eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float).ravel()
        basis = np.asarray(self.basis, dtype=complex)
        d = vals.shape[0]
        if basis.shape != (d, d):
            raise DimensionMismatch(f"basis shape {basis.shape} does not match {d} eigenvalues")
        if d > 1 and np.min(np.diff(np.sort(vals))) <= DEGENERACY_GAP:
            raise DegenerateSpectrum("eigenvalue gap below 1e-9")
        if np.max(np.abs(basis.conj().T @ basis - np.eye(d))) > 1e-10:
            raise InvalidState("eigenbasis is not orthonormal")
        order = np.argsort(vals, kind="stable")
        object.__setattr__(self, "eigenvalues", _frozen(vals[order], dtype=float))
        object.__setattr__(self, "basis", _frozen(_canonical_columns(basis[:, order])))

    @classmethod
    def from_basis(cls, basis, eigenvalues=None) -> "Observable":
        basis = np.asarray(basis, dtype=complex)
        if eigenvalues is None:
            eigenvalues = np.arange(basis.shape[1], dtype=float)
        return cls(eigenvalues, basis)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def states(self) -> list[PureState]:
        return [PureState(self.basis[:, k]) for k in range(self.dim)]

    def projectors(self) -> np.ndarray:
        """Stack of rank-one spectral projectors, shape ``(d, d, d)``."""
        return np.einsum("ik,jk->kij", self.basis, self.basis.conj())

    def matrix(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T

    def to_json(self) -> dict:
        cols = self.basis.T.ravel()  # column-major flattening
        return {
            "dim": self.dim,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "eigenvectors": [[float(z.real), float(z.imag)] for z in cols],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Observable":
        try:
            d = int(data["dim"])
            vals = np.asarray(data["eigenvalues"], dtype=float)
            pairs = np.asarray(data["eigenvectors"], dtype=float)
            if pairs.shape != (d * d, 2) or vals.shape != (d,):
                raise ParseError(f"observable JSON has inconsistent shapes for dim {d}")
            basis = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d, d).T
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed observable JSON: {exc}") from exc
        return cls(vals, basis)


@dataclass(frozen=True)
class Ensemble:
    """Uniformly weighted list of pure states, stored as rows of ``vectors``."""

    vectors: np.ndarray
    weight: float = field(init=False)

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if vecs.shape[0] == 0:
            raise InvalidState("ensemble must contain at least one state")
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise InvalidState("ensemble states must be normalized")
        vecs = np.vstack([canonical_phase(v) for v in vecs])
        object.__setattr__(self, "vectors", _frozen(vecs))
        object.__setattr__(self, "weight", 1.0 / vecs.shape[0])

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def states(self) -> list[PureState]:
        return [PureState(v) for v in self.vectors]

    def __len__(self):
        return self.count

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "states": [[[float(z.real), float(z.imag)] for z in v] for v in self.vectors],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Ensemble":
        try:
            states = np.asarray(data["states"], dtype=float)
            vecs = states[..., 0] + 1j * states[..., 1]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"malformed ensemble JSON: {exc}") from exc
        return cls(vecs)


def eigensystem(H) -> Observable:
    """Diagonalize a Hermitian matrix into an :class:`Observable`.

    Raises:
        NotHermitian: if ``H`` deviates from its adjoint by more than 1e-10.
        DegenerateSpectrum: if two eigenvalues are closer than 1e-9.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian("matrix must be square")
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    vals, vecs = np.linalg.eigh(0.5 * (H + H.conj().T))
    if H.shape[0] > 1 and np.min(np.diff(vals)) < DEGENERACY_GAP:
        raise DegenerateSpectrum("eigenvalue gap below 1e-9")
    return Observable(vals, vecs)


def bloch_operator(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return sum(c * s for c, s in zip(v, PAULIS))


def qubit_observable(a) -> Observable:
    """Observable with projectors (I +/- a.sigma)/2 and eigenvalues (-1, +1)."""
    a = as_bloch(a)
    return eigensystem(bloch_operator(a.components))


def bloch_vector(state) -> np.ndarray:
    """Bloch vector of a qubit pure state."""
    c = np.asarray(state, dtype=complex).ravel()
    if c.shape != (2,):
        raise DimensionMismatch("Bloch vectors are defined for qubits only")
    c = c / np.linalg.norm(c)
    x = 2 * (c[0].conj() * c[1])
    return np.array([x.real, x.imag, abs(c[0]) ** 2 - abs(c[1]) ** 2])


def observable_bloch(obs: Observable) -> np.ndarray:
    """Bloch direction of the +1 (upper) eigenvector of a qubit observable."""
    if obs.dim != 2:
        raise DimensionMismatch("Bloch extraction needs a qubit observable")
    return bloch_vector(obs.basis[:, 1])


def overlap_matrix(A: Observable, B: Observable) -> np.ndarray:
    """Entry (i, j) is |<a_i|b_j>|^2; the result is doubly stochastic."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    return np.abs(A.basis.conj().T @ B.basis) ** 2


def commutator_norm(A: Observable, B: Observable) -> float:
    """Spectral norm of [P, Q] maximized over all pairs of eigenprojectors."""
    PA, PB = A.projectors(), B.projectors()
    best = 0.0
    for P in PA:
        for Q in PB:
            best = max(best, np.linalg.norm(P @ Q - Q @ P, 2))
    return float(best)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def mub_vectors(d: int, n_bases: int) -> list[np.ndarray]:
    """Unitary matrices whose columns form mutually unbiased bases in prime ``d``.

    The first basis is computational; the rest are the quadratic-phase
    Fourier family, ``omega**(k j^2 + m j) / sqrt(d)`` (with ``i**(k j^2)``
    replacing the quadratic phase for ``d = 2``).
    """
    if not _is_prime(d):
        raise NonPrimeDimension(f"MUB construction needs a prime dimension, got {d}")
    if not 1 <= n_bases <= d + 1:
        raise TooManyBases(f"at most {d + 1} MUBs exist in dimension {d}")
    j = np.arange(d)
    out = [np.eye(d, dtype=complex)]
    for k in range(n_bases - 1):
        if d == 2:
            quad = np.exp(0.5j * np.pi * k * j**2)
        else:
            quad = np.exp(2j * np.pi * k * j**2 / d)
        cols = [quad * np.exp(2j * np.pi * m * j / d) / np.sqrt(d) for m in range(d)]
        out.append(np.column_stack(cols))
    return out


def mub_bases(d: int, n_bases: int) -> list[Observable]:
    """``n_bases`` mutually unbiased observables in prime dimension ``d``."""
    if n_bases < 2:
        raise TooManyBases("mub_bases needs at least two bases")
    return [Observable.from_basis(U) for U in mub_vectors(d, n_bases)]


def fourier_matrix(m: int) -> np.ndarray:
    j = np.arange(m)
    return np.exp(2j * np.pi * np.outer(j, j) / m) / np.sqrt(m)


def subspace_pair(d: int, d_c: int) -> tuple[Observable, Observable]:
    """Pair commuting on a ``d_c``-dimensional subspace and unbiased on its complement.

    The unbiased block pairs the computational and Fourier bases, which
    works for every block size.
    """
    if not 0 <= d_c <= d - 1:
        raise InvalidSubspaceDim(f"need 0 <= d_c <= d - 1, got d={d}, d_c={d_c}")
    A = np.eye(d, dtype=complex)
    B = np.eye(d, dtype=complex)
    B[d_c:, d_c:] = fourier_matrix(d - d_c)
    return Observable.from_basis(A), Observable.from_basis(B)


def _stack(observables: Sequence[Observable]) -> np.ndarray:
    if len(observables) == 0:
        raise DimensionMismatch("need at least one observable")
    dims = {o.dim for o in observables}
    if len(dims) != 1:
        raise DimensionMismatch(f"observables have differing dimensions {sorted(dims)}")
    return np.vstack([o.basis.T for o in observables])


def eigenstate_ensemble(observables: Iterable[Observable]) -> Ensemble:
    """Uniform ensemble of all ``N * d`` eigenstates."""
    return Ensemble(_stack(list(observables)))


def direct_sum_ensemble(S1: Ensemble, S2: Ensemble) -> Ensemble:
    d1, d2 = S1.dim, S2.dim
    top = np.hstack([S1.vectors, np.zeros((S1.count, d2))])
    bottom = np.hstack([np.zeros((S2.count, d1)), S2.vectors])
    return Ensemble(np.vstack([top, bottom]))


def random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    Z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_observable(rng: np.random.Generator, d: int) -> Observable:
    return Observable.from_basis(random_unitary(rng, d))


def random_bloch(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
