"""Dense complex linear algebra for small Hilbert spaces.

Vectors and matrices are thin immutable wrappers around numpy arrays. The
tensor product uses the left-factor-most-significant index convention:
``tensor(u, v)[i * v.dim + j] == u[i] * v[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

EPS_EQ = 1e-12
EPS_NORM = 1e-12


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """A finite complex amplitude vector with optional basis labels."""

    amplitudes: np.ndarray
    basis_labels: Optional[tuple[str, ...]] = field(default=None)

    # make numpy scalars defer to __rmul__ instead of broadcasting over the sequence
    __array_ufunc__ = None

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise DimensionError(f"state vector must be 1-d and non-empty, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state vector has non-finite amplitudes")
        object.__setattr__(self, "amplitudes", amps)
        if self.basis_labels is not None:
            labels = tuple(self.basis_labels)
            if len(labels) != amps.size:
                raise DimensionError(f"{len(labels)} basis labels for dimension {amps.size}")
            object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = EPS_NORM) -> bool:
        return abs(self.norm2 - 1.0) <= tol

    def normalized(self) -> "StateVector":
        n2 = self.norm2
        if n2 <= 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / np.sqrt(n2), self.basis_labels)

    def __getitem__(self, i):
        return self.amplitudes[i]

    def __len__(self) -> int:
        return self.dim

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_dim(self.dim, other.dim)
        return StateVector(self.amplitudes + other.amplitudes, self.basis_labels)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_dim(self.dim, other.dim)
        return StateVector(self.amplitudes - other.amplitudes, self.basis_labels)

    def __neg__(self) -> "StateVector":
        return StateVector(-self.amplitudes, self.basis_labels)

    def __mul__(self, scalar: complex) -> "StateVector":
        return StateVector(complex(scalar) * self.amplitudes, self.basis_labels)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "StateVector":
        return StateVector(self.amplitudes / complex(scalar), self.basis_labels)

    def allclose(self, other: "StateVector", tol: float = EPS_EQ) -> bool:
        """Entrywise comparison with an absolute tolerance."""
        return self.dim == other.dim and bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= tol)

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    """A square complex matrix."""

    entries: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"operator must be a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, MatrixOperator):
            return matmul(self, other)
        if isinstance(other, StateVector):
            return apply(self, other)
        return NotImplemented

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        _check_same_dim(self.dim, other.dim)
        return MatrixOperator(self.entries + other.entries)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        _check_same_dim(self.dim, other.dim)
        return MatrixOperator(self.entries - other.entries)

    def __neg__(self) -> "MatrixOperator":
        return MatrixOperator(-self.entries)

    def __mul__(self, scalar: complex) -> "MatrixOperator":
        return MatrixOperator(complex(scalar) * self.entries)

    __rmul__ = __mul__

    def allclose(self, other: "MatrixOperator", tol: float = EPS_EQ) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.entries - other.entries)) <= tol)

    def is_hermitian(self, tol: float = EPS_EQ) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def is_unitary(self, tol: float = EPS_EQ) -> bool:
        prod = self.entries.conj().T @ self.entries
        return bool(np.max(np.abs(prod - np.eye(self.dim))) <= tol)

    def __repr__(self) -> str:
        return f"MatrixOperator(\n{np.array2string(self.entries, precision=6)})"


def _check_same_dim(d1: int, d2: int) -> None:
    if d1 != d2:
        raise DimensionError(f"dimension mismatch: {d1} != {d2}")


def ket(*amplitudes: complex, labels: Optional[Sequence[str]] = None) -> StateVector:
    return StateVector(np.array(amplitudes, dtype=np.complex128), None if labels is None else tuple(labels))


def basis_state(dim: int, index: int) -> StateVector:
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def identity(dim: int) -> MatrixOperator:
    return MatrixOperator(np.eye(dim, dtype=np.complex128))


def tensor(*vectors: StateVector) -> StateVector:
    """Tensor product of state vectors, leftmost factor most significant."""
    if not vectors:
        raise ValueError("tensor needs at least one factor")
    out = vectors[0].amplitudes
    for v in vectors[1:]:
        out = np.kron(out, v.amplitudes)
    return StateVector(out)


def inner(u: StateVector, v: StateVector) -> complex:
    """Return <u|v>, conjugating the left argument."""
    _check_same_dim(u.dim, v.dim)
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def apply(m: MatrixOperator, v: StateVector) -> StateVector:
    _check_same_dim(m.dim, v.dim)
    return StateVector(m.entries @ v.amplitudes, v.basis_labels)


def matmul(m: MatrixOperator, n: MatrixOperator) -> MatrixOperator:
    _check_same_dim(m.dim, n.dim)
    return MatrixOperator(m.entries @ n.entries)


def commutator(m: MatrixOperator, n: MatrixOperator) -> MatrixOperator:
    """Return MN - NM."""
    _check_same_dim(m.dim, n.dim)
    return MatrixOperator(m.entries @ n.entries - n.entries @ m.entries)


def adjoint(m: MatrixOperator) -> MatrixOperator:
    return MatrixOperator(m.entries.conj().T)


def trace(m: MatrixOperator) -> complex:
    return complex(np.trace(m.entries))


def tensor_op(*ops: MatrixOperator) -> MatrixOperator:
    """Kronecker product of operators; same index convention as :func:`tensor`."""
    if not ops:
        raise ValueError("tensor_op needs at least one factor")
    out = ops[0].entries
    for op in ops[1:]:
        out = np.kron(out, op.entries)
    return MatrixOperator(out)


def outer(u: StateVector, v: StateVector) -> MatrixOperator:
    """Return |u><v|."""
    return MatrixOperator(np.outer(u.amplitudes, v.amplitudes.conj()))


def embed(op: MatrixOperator, position: int, factor_dims: Sequence[int]) -> MatrixOperator:
    """Place ``op`` on consecutive factors starting at ``position``.

    The operator's dimension must equal the product of the factor dimensions
    it covers; identities fill the rest.
    """
    dims = list(factor_dims)
    if not 0 <= position < len(dims):
        raise IndexError(f"position {position} outside {len(dims)} factors")
    covered, end = 1, position
    while covered < op.dim and end < len(dims):
        covered *= dims[end]
        end += 1
    if covered != op.dim:
        raise DimensionError(f"operator of dimension {op.dim} does not fit factors {dims[position:]}")
    left = int(np.prod(dims[:position], dtype=int))
    right = int(np.prod(dims[end:], dtype=int))
    return MatrixOperator(np.kron(np.kron(np.eye(left), op.entries), np.eye(right)))


# Pauli matrices; sigma_1..3 in the usual (x, y, z) order.
SIGMA_X = MatrixOperator(np.array([[0, 1], [1, 0]], dtype=np.complex128))
SIGMA_Y = MatrixOperator(np.array([[0, -1j], [1j, 0]], dtype=np.complex128))
SIGMA_Z = MatrixOperator(np.array([[1, 0], [0, -1]], dtype=np.complex128))
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# Spin-1/2 operators S_k = sigma_k / 2 (hbar = 1).
S_X = 0.5 * SIGMA_X
S_Y = 0.5 * SIGMA_Y
S_Z = 0.5 * SIGMA_Z


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random unit vector from a complex Gaussian draw."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(z / np.linalg.norm(z))


def random_unitary(dim: int, rng: np.random.Generator) -> MatrixOperator:
    """Seeded random unitary from a Gaussian matrix, orthonormalized column by column.

    Modified Gram-Schmidt on a complex Ginibre matrix.
    """
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q = np.zeros_like(z)
    for k in range(dim):
        col = z[:, k].copy()
        for j in range(k):
            col -= np.vdot(q[:, j], col) * q[:, j]
        q[:, k] = col / np.linalg.norm(col)
    return MatrixOperator(q)


def random_operator(dim: int, rng: np.random.Generator) -> MatrixOperator:
    return MatrixOperator(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def random_hermitian(dim: int, rng: np.random.Generator) -> MatrixOperator:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return MatrixOperator(0.5 * (m + m.conj().T))


def same_ray(u: StateVector, v: StateVector, tol: float = EPS_EQ) -> bool:
    """True when two normalized vectors differ only by a global phase."""
    return abs(abs(inner(u, v)) - 1.0) <= tol
