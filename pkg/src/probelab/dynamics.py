"""Parameter-dependent generators, evolved states, and projective readouts.

The estimated parameter x enters through the probe Hamiltonian x * H, where H
is one of the generators built here.  Under the conventions of
:mod:`probelab.operators`, evolving the optimal single-qubit state gives the
Bloch vector (-sin x, cos x, 0), so the "+" outcome of the per-qubit readout
has probability p(+|x) = (1 - sin x) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import operators as ops
from .errors import DimensionError, ValidationError
from .states import DensityMatrix, density_matrix

NONENTANGLING = "nonentangling"
ENTANGLING = "entangling"
CUSTOM = "custom"


@dataclass(frozen=True)
class Generator:
    """Parameter-independent Hermitian generator H of the probe dynamics."""

    kind: str
    n_qubits: int
    matrix: np.ndarray


def nonentangling_generator(n: int, cap: int = ops.MAX_QUBITS) -> Generator:
    """Sum of single-qubit terms, H = (1/2) sum_j Z_j.

    Cannot create entanglement between the probe qubits; eigenvalues are
    (n - 2k)/2 with binomial multiplicities.
    """
    ops.check_cap(n, cap)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        labels = ["I"] * n
        labels[j] = "Z"
        h += 0.5 * ops.pauli_dense("".join(labels))
    h.setflags(write=False)
    return Generator(kind=NONENTANGLING, n_qubits=n, matrix=h)


def entangling_generator(n: int, cap: int = ops.MAX_QUBITS) -> Generator:
    """Single n-body string, H = (1/2) Z^(tensor n); eigenvalues +/- 1/2."""
    ops.check_cap(n, cap)
    h = 0.5 * ops.pauli_dense("Z" * n)
    h.setflags(write=False)
    return Generator(kind=ENTANGLING, n_qubits=n, matrix=h)


def custom_generator(matrix: np.ndarray, atol: float = 1e-10) -> Generator:
    n = ops.n_qubits_of(matrix)
    if not ops.is_hermitian(matrix, atol):
        raise ValidationError("generator must be Hermitian")
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    return Generator(kind=CUSTOM, n_qubits=n, matrix=matrix)


def state_derivative(generator: Generator, rho: DensityMatrix) -> np.ndarray:
    """d(rho)/dx at x = 0: -i [H, rho].  Hermitian and traceless."""
    if generator.n_qubits != rho.n_qubits:
        raise DimensionError(
            f"generator acts on {generator.n_qubits} qubits, state on {rho.n_qubits}"
        )
    return -1j * ops.commutator(generator.matrix, rho.matrix)


def evolve(rho: DensityMatrix, generator: Generator, x: float) -> DensityMatrix:
    """U rho U^dagger with U = exp(-i x H)."""
    if generator.n_qubits != rho.n_qubits:
        raise DimensionError(
            f"generator acts on {generator.n_qubits} qubits, state on {rho.n_qubits}"
        )
    u = ops.unitary_evolution(generator.matrix, x)
    return density_matrix(u @ rho.matrix @ u.conj().T)


@dataclass(frozen=True)
class ReadoutBasis:
    """Complete orthonormal family of rank-1 projectors with outcome labels.

    ``kets[:, k]`` is the state projected onto by outcome ``labels[k]``.
    """

    labels: tuple[str, ...]
    kets: np.ndarray

    @property
    def dim(self) -> int:
        return self.kets.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.kets.shape[1]

    @property
    def n_qubits(self) -> int:
        return ops.n_qubits_of(self.kets)

    def projector(self, label: str) -> np.ndarray:
        k = self.labels.index(label)
        ket = self.kets[:, k]
        return np.outer(ket, ket.conj())

    def projectors(self) -> list[np.ndarray]:
        return [self.projector(label) for label in self.labels]

    def index(self, label: str) -> int:
        return self.labels.index(label)


def readout_from_kets(
    kets: np.ndarray, labels: tuple[str, ...] | None = None, atol: float = 1e-10
) -> ReadoutBasis:
    """Wrap a unitary matrix of column kets as a readout basis.

    Checks completeness (sum of projectors is the identity) and orthogonality.
    """
    kets = np.array(kets, dtype=complex)
    ops.n_qubits_of(kets)  # validates the square power-of-two shape
    gram = kets.conj().T @ kets
    if np.linalg.norm(gram - np.eye(kets.shape[1])) > atol:
        raise ValidationError("readout kets are not orthonormal within tolerance")
    if np.linalg.norm(kets @ kets.conj().T - np.eye(kets.shape[0])) > atol:
        raise ValidationError("readout projectors do not sum to the identity")
    if labels is None:
        labels = tuple(str(k) for k in range(kets.shape[1]))
    if len(labels) != kets.shape[1]:
        raise ValidationError("one label per outcome is required")
    kets.setflags(write=False)
    return ReadoutBasis(labels=tuple(labels), kets=kets)


def product_pm_readout(n: int, cap: int = ops.MAX_QUBITS) -> ReadoutBasis:
    """Per-qubit projective readout along |+> and |->.

    |+/-> = (|0> +/- |1>)/sqrt(2); the 2**n outcomes are labeled by strings
    over {+,-} in lexicographic order with '+' < '-' (so "++", "+-", "-+",
    "--" for two qubits), qubit 1 leftmost.
    """
    ops.check_cap(n, cap)
    plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
    single = {"+": plus, "-": minus}
    labels = ["".join(s) for s in product("+-", repeat=n)]
    kets = np.zeros((2**n, 2**n), dtype=complex)
    for k, label in enumerate(labels):
        kets[:, k] = ops.kron_all(single[c] for c in label)
    kets.setflags(write=False)
    return ReadoutBasis(labels=tuple(labels), kets=kets)


def random_projective_readout(
    n: int, seed: int | np.random.Generator, cap: int = ops.MAX_QUBITS
) -> ReadoutBasis:
    """Haar-random complete projective readout (for property sweeps)."""
    ops.check_cap(n, cap)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dim = 2**n
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return readout_from_kets(q)


def outcome_probabilities(
    basis: ReadoutBasis, rho: DensityMatrix, *, clip_floor: float = -1e-12
) -> dict[str, float]:
    """p(outcome) = tr(E rho), clipped to [0, 1].

    Values below ``clip_floor`` or a total off from 1 by more than 1e-9 signal
    an invalid state/basis pairing and raise.
    """
    if basis.dim != rho.dim:
        raise DimensionError(
            f"readout dimension {basis.dim} does not match state dimension {rho.dim}"
        )
    raw = np.real(np.einsum("ik,ij,jk->k", basis.kets.conj(), rho.matrix, basis.kets))
    if np.min(raw) < clip_floor:
        raise ValidationError(
            f"outcome probability {np.min(raw):.3e} below clipping floor"
        )
    if abs(np.sum(raw) - 1.0) > 1e-9:
        raise ValidationError(f"outcome probabilities sum to {np.sum(raw):.12g}")
    clipped = np.clip(raw, 0.0, 1.0)
    return {label: float(p) for label, p in zip(basis.labels, clipped)}


def probability_vector(basis: ReadoutBasis, rho: DensityMatrix) -> np.ndarray:
    """Outcome probabilities as an array aligned with ``basis.labels``."""
    probs = outcome_probabilities(basis, rho)
    return np.array([probs[label] for label in basis.labels])
