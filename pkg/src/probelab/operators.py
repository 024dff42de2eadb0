"""Dense complex-matrix and Pauli-string algebra for N-qubit Hermitian operators.

Conventions fixed here and relied on everywhere else:

* sigma_1 = [[0,1],[1,0]], sigma_2 = [[0,-i],[i,0]], sigma_3 = [[1,0],[0,-1]],
  with |0> = (1, 0).
* Qubit 1 is the leftmost (most significant) tensor factor: the
  computational-basis index of |j1 ... jN> is the binary number j1...jN.
* Pauli strings are written as label strings over {I, X, Y, Z}, e.g. "XY".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, ValidationError

#: Largest probe size handled by dense constructors (2**10 = 1024 dims).
MAX_QUBITS = 10

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI_MATRICES.values():
    _m.setflags(write=False)

PAULI_LABELS = ("I", "X", "Y", "Z")


def pauli_matrix(label: str) -> np.ndarray:
    """Single-qubit Pauli matrix for one of the labels I, X, Y, Z."""
    try:
        return _PAULI_MATRICES[label]
    except KeyError:
        raise ValidationError(f"unknown Pauli label {label!r}") from None


def pauli_labels(n_qubits: int) -> list[str]:
    """All 4**n Pauli strings of length ``n_qubits`` in lexicographic order."""
    return ["".join(p) for p in product(PAULI_LABELS, repeat=n_qubits)]


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Ordered Kronecker product; the first factor is the most significant."""
    return reduce(np.kron, factors)


def n_qubits_of(matrix: np.ndarray) -> int:
    """Number of qubits for a square matrix of dimension 2**n."""
    dim = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    n = dim.bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def check_cap(n_qubits: int, cap: int = MAX_QUBITS) -> None:
    if n_qubits > cap:
        raise DimensionError(f"{n_qubits} qubits exceeds the cap of {cap}")
    if n_qubits < 1:
        raise DimensionError(f"need at least one qubit, got {n_qubits}")


def pauli_dense(labels: str | Sequence[str], cap: int = MAX_QUBITS) -> np.ndarray:
    """Dense matrix of a Pauli string, e.g. ``pauli_dense("XY")``."""
    labels = "".join(labels)
    check_cap(len(labels), cap)
    return kron_all(pauli_matrix(c) for c in labels)


def is_hermitian(matrix: np.ndarray, atol: float = 1e-10) -> bool:
    return bool(
        np.linalg.norm(matrix - matrix.conj().T)
        <= atol * max(1.0, np.linalg.norm(matrix))
    )


def pauli_expand(
    matrix: np.ndarray, atol: float = 1e-10, drop_tol: float = 1e-12
) -> dict[str, float]:
    """Expand a Hermitian matrix over Pauli strings.

    Returns the real coefficients {string: tr(P A) / 2**n}, dropping entries
    with magnitude at most ``drop_tol``.  Raises if the input is not Hermitian
    within ``atol`` (relative to its Frobenius norm).
    """
    matrix = np.asarray(matrix, dtype=complex)
    n = n_qubits_of(matrix)
    if not is_hermitian(matrix, atol):
        raise ValidationError("cannot expand a non-Hermitian matrix over Pauli strings")
    dim = 2**n
    terms: dict[str, float] = {}
    for label in pauli_labels(n):
        p = pauli_dense(label)
        coeff = float(np.real(np.sum(p.T * matrix)) / dim)
        if abs(coeff) > drop_tol:
            terms[label] = coeff
    return terms


def pauli_terms_dense(terms: Mapping[str, float]) -> np.ndarray:
    """Dense matrix of a real-coefficient Pauli-string expansion."""
    if not terms:
        raise ValidationError("cannot build a dense matrix from an empty term map")
    lengths = {len(label) for label in terms}
    if len(lengths) != 1:
        raise DimensionError(f"inconsistent Pauli string lengths: {sorted(lengths)}")
    n = lengths.pop()
    out = np.zeros((2**n, 2**n), dtype=complex)
    for label, coeff in terms.items():
        out += coeff * pauli_dense(label)
    return out


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a b - b a."""
    _check_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a b + b a."""
    _check_same_dim(a, b)
    return a @ b + b @ a


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    ``values`` are sorted in descending order; ``vectors[:, k]`` is the
    orthonormal eigenvector for ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def hermitian_eigen(matrix: np.ndarray, atol: float = 1e-10) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    matrix = np.asarray(matrix, dtype=complex)
    n_qubits_of(matrix)
    if not is_hermitian(matrix, atol):
        raise ValidationError("matrix is not Hermitian within tolerance")
    values, vectors = np.linalg.eigh(matrix)
    order = np.argsort(values)[::-1]
    values = np.ascontiguousarray(values[order])
    vectors = np.ascontiguousarray(vectors[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return HermitianEigen(values=values, vectors=vectors)


def unitary_evolution(generator: np.ndarray, x: float) -> np.ndarray:
    """exp(-i * x * generator) for a Hermitian generator, via eigendecomposition."""
    eig = hermitian_eigen(generator)
    phases = np.exp(-1j * x * eig.values)
    return (eig.vectors * phases) @ eig.vectors.conj().T
