"""Density operators, partial traces and the ensemble-level no-signaling check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    EPS_EQ,
    PAULIS,
    SIGMA_Z,
    DimensionError,
    MatrixOperator,
    StateVector,
    adjoint,
    commutator,
    embed,
    identity,
    matmul,
    outer,
    random_unitary,
    tensor_op,
)
from .states import singlet

N_POSITIVITY_PROBES = 100
_PROBE_SEED = 20050519


def _probe_vectors(dim: int) -> np.ndarray:
    rng = np.random.default_rng(_PROBE_SEED + dim)
    z = rng.standard_normal((N_POSITIVITY_PROBES, dim)) + 1j * rng.standard_normal((N_POSITIVITY_PROBES, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A hermitian, unit-trace, non-negative matrix with a declared factorization.

    Positivity is probed with a fixed set of random unit vectors rather than
    an eigen-decomposition.
    """

    matrix: MatrixOperator
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        m = self.matrix if isinstance(self.matrix, MatrixOperator) else MatrixOperator(self.matrix)
        object.__setattr__(self, "matrix", m)
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != m.dim:
            raise DimensionError(f"factor dims {dims} do not multiply to {m.dim}")
        object.__setattr__(self, "factor_dims", dims)
        if not m.is_hermitian(EPS_EQ):
            raise ValueError("density operator is not hermitian")
        tr = np.trace(m.entries)
        if abs(tr - 1.0) > EPS_EQ:
            raise ValueError(f"density operator trace is {tr!r}, expected 1")
        probes = _probe_vectors(m.dim)
        vals = np.einsum("ki,ij,kj->k", probes.conj(), m.entries, probes).real
        if vals.min() < -EPS_EQ:
            raise ValueError("density operator failed the positivity probe")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries


@dataclass(frozen=True)
class Mixture:
    """Classical mixture of normalized pure states."""

    weights: tuple[float, ...]
    states: tuple[StateVector, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        s = tuple(self.states)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)
        if len(w) != len(s) or not w:
            raise ValueError("mixture needs equally many weights and states")
        if any(not 0.0 < x < 1.0 for x in w) and len(w) > 1:
            raise ValueError("mixture weights must lie in (0, 1)")
        if abs(sum(w) - 1.0) > EPS_EQ:
            raise ValueError(f"mixture weights sum to {sum(w)!r}")
        for v in s:
            if not v.is_normalized():
                raise ValueError("mixture states must be normalized")
        if len({v.dim for v in s}) != 1:
            raise DimensionError("mixture states have different dimensions")


def _default_dims(dim: int, factor_dims: Optional[Sequence[int]]) -> tuple[int, ...]:
    return (dim,) if factor_dims is None else tuple(factor_dims)


def from_pure(v: StateVector, factor_dims: Optional[Sequence[int]] = None) -> DensityOperator:
    """|psi><psi| for a normalized ket."""
    if not v.is_normalized():
        raise ValueError(f"pure state must be normalized, norm^2 = {v.norm2!r}")
    return DensityOperator(outer(v, v), _default_dims(v.dim, factor_dims))


def from_mixture(m: Mixture, factor_dims: Optional[Sequence[int]] = None) -> DensityOperator:
    rho = sum(w * np.outer(v.amplitudes, v.amplitudes.conj()) for w, v in zip(m.weights, m.states))
    return DensityOperator(MatrixOperator(rho), _default_dims(m.states[0].dim, factor_dims))


def purity(r: DensityOperator) -> float:
    """tr(rho^2); equal to 1 exactly for pure states."""
    return float(np.real(np.trace(r.entries @ r.entries)))


def expectation(r: DensityOperator, a: MatrixOperator) -> float:
    """tr(rho A) for a hermitian observable A."""
    if a.dim != r.dim:
        raise DimensionError(f"observable dimension {a.dim} != state dimension {r.dim}")
    if not a.is_hermitian():
        raise ValueError("observable must be hermitian")
    val = np.trace(r.entries @ a.entries)
    # tr(rho A) is real for hermitian rho, A up to rounding
    if abs(val.imag) > EPS_EQ * max(1.0, float(np.abs(a.entries).max())):
        raise ValueError(f"expectation has imaginary part {val.imag!r}")
    return float(val.real)


def born_probability(r: DensityOperator, a: StateVector) -> float:
    """<a|rho|a>, clamped to [0, 1]."""
    if a.dim != r.dim:
        raise DimensionError(f"ket dimension {a.dim} != state dimension {r.dim}")
    if not a.is_normalized():
        raise ValueError("outcome ket must be normalized")
    p = float(np.real(np.vdot(a.amplitudes, r.entries @ a.amplitudes)))
    return min(1.0, max(0.0, p))


def partial_trace(r: DensityOperator, keep: int) -> DensityOperator:
    """Trace out every factor except ``keep``."""
    dims = r.factor_dims
    if len(dims) < 2:
        raise ValueError("partial trace needs a state with at least two declared factors")
    if not 0 <= keep < len(dims):
        raise IndexError(f"subsystem index {keep} outside 0..{len(dims) - 1}")
    n = len(dims)
    t = r.entries.reshape(dims + dims)
    # contract each traced factor's row index with its column index
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = [letters[k] for k in range(n)]
    cols = [letters[k] if k != keep else letters[n + k] for k in range(n)]
    spec = "".join(rows) + "".join(cols) + "->" + letters[keep] + letters[n + keep]
    reduced = np.einsum(spec, t)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityOperator(MatrixOperator(reduced), (dims[keep],))


def liouville_rhs(r: DensityOperator, h: MatrixOperator) -> MatrixOperator:
    """Instantaneous d(rho)/dt = i[rho, H]."""
    if h.dim != r.dim:
        raise DimensionError(f"hamiltonian dimension {h.dim} != state dimension {r.dim}")
    if not h.is_hermitian():
        raise ValueError("hamiltonian must be hermitian")
    return 1j * commutator(r.matrix, h)


# Factor order of the no-signaling setup: apparatus A, subsystems U, V, apparatus B.
NS_FACTORS = ("A", "U", "V", "B")
NS_DIMS = (2, 2, 2, 2)


def local_paulis(factors: Sequence[int], dims: Sequence[int] = NS_DIMS) -> list[MatrixOperator]:
    """Pauli matrices embedded on each listed factor."""
    return [embed(p, k, dims) for k in factors for p in PAULIS]


def _zeros(dim: int) -> MatrixOperator:
    return MatrixOperator(np.zeros((dim, dim)))


def _acts_trivially_on(op: MatrixOperator, factors: Sequence[int]) -> bool:
    scale = max(1.0, float(np.abs(op.entries).max()))
    return all(commutator(op, p).allclose(_zeros(op.dim), EPS_EQ * scale) for p in local_paulis(factors))


def no_signaling_experiment(
    rho_a: DensityOperator,
    rho_uv: DensityOperator,
    rho_b: DensityOperator,
    u_ua: MatrixOperator,
    u_vb: MatrixOperator,
    theta_v: MatrixOperator,
) -> tuple[float, float]:
    """Expectation of an observable on V with and without the measurement at A.

    The total state is rho_A (x) rho_UV (x) rho_B on A, U, V, B (one qubit
    each). ``u_ua`` and ``u_vb`` are full 16-dimensional unitaries that must
    act as the identity on (V, B) and (A, U) respectively. ``theta_v`` is a
    2x2 observable on V, or a 16x16 operator supported on V alone.

    Returns ``(with_a, without_a)``: tr(theta_V rho_BA) where
    rho_BA = U_VB U_UA rho0 U_UA^dag U_VB^dag, and the same with U_UA
    replaced by the identity.
    """
    if rho_a.dim != 2 or rho_b.dim != 2 or rho_uv.dim != 4:
        raise DimensionError("no-signaling setup expects qubit apparatuses and a two-qubit U+V state")
    for name, u in (("U_UA", u_ua), ("U_VB", u_vb)):
        if u.dim != 16:
            raise DimensionError(f"{name} must be 16-dimensional, got {u.dim}")
        if not u.is_unitary():
            raise ValueError(f"{name} is not unitary")
    if not commutator(u_ua, u_vb).allclose(_zeros(16)):
        raise ValueError("U_UA and U_VB do not commute")
    if not _acts_trivially_on(u_ua, (2, 3)):
        raise ValueError("U_UA acts on V or B")
    if not _acts_trivially_on(u_vb, (0, 1)):
        raise ValueError("U_VB acts on A or U")
    if theta_v.dim == 2:
        theta = embed(theta_v, 2, NS_DIMS)
    elif theta_v.dim == 16:
        if not _acts_trivially_on(theta_v, (0, 1, 3)):
            raise ValueError("observable is not supported on V alone")
        theta = theta_v
    else:
        raise DimensionError(f"observable on V must be 2- or 16-dimensional, got {theta_v.dim}")

    rho0 = DensityOperator(tensor_op(rho_a.matrix, rho_uv.matrix, rho_b.matrix), NS_DIMS)

    def evolve(u: MatrixOperator) -> DensityOperator:
        m = matmul(matmul(u, rho0.matrix), adjoint(u))
        return DensityOperator(MatrixOperator(0.5 * (m.entries + m.entries.conj().T)), NS_DIMS)

    with_a = expectation(evolve(matmul(u_vb, u_ua)), theta)
    without_a = expectation(evolve(u_vb), theta)
    return with_a, without_a


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None,
                   factor_dims: Optional[Sequence[int]] = None) -> DensityOperator:
    """Random mixed state W W^dag / tr, W a dim x rank complex Gaussian matrix."""
    k = dim if rank is None else rank
    w = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = w @ w.conj().T
    rho /= np.trace(rho).real
    return DensityOperator(MatrixOperator(0.5 * (rho + rho.conj().T)), _default_dims(dim, factor_dims))


def no_signaling_sweep(n_seeds: int, observable: MatrixOperator | None = None) -> list[float]:
    """|with - without| for ``n_seeds`` seeded random local unitary pairs.

    Seed ``s`` draws random apparatus states, two-qubit unitaries on (A, U)
    and (V, B), and uses the singlet for U+V. Default observable is sigma_z
    on V.
    """
    obs = SIGMA_Z if observable is None else observable
    rho_uv = from_pure(singlet(), (2, 2))
    diffs = []
    for seed in range(n_seeds):
        rng = np.random.default_rng(seed)
        rho_a = random_density(2, rng)
        rho_b = random_density(2, rng)
        u_ua = tensor_op(random_unitary(4, rng), identity(4))
        u_vb = tensor_op(identity(4), random_unitary(4, rng))
        with_a, without_a = no_signaling_experiment(rho_a, rho_uv, rho_b, u_ua, u_vb, obs)
        diffs.append(abs(with_a - without_a))
    return diffs
