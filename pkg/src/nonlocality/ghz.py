"""Three-spin GHZ operator algebra and the Einstein-boxes calculation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .correlations import conditional_probability
from .density import born_probability, from_pure, purity
from .linalg import (
    EPS_EQ,
    SIGMA_X,
    SIGMA_Y,
    MatrixOperator,
    StateVector,
    apply,
    commutator,
    identity,
    ket,
    matmul,
    tensor_op,
)
from .states import box_state, ghz_state

_PAULI_BY_AXIS = {"x": SIGMA_X, "y": SIGMA_Y}

PATTERNS = {
    "A": ("x", "y", "y"),
    "B": ("y", "x", "y"),
    "C": ("y", "y", "x"),
    "D": ("x", "x", "x"),
}


@dataclass(frozen=True)
class GhzOperator:
    name: str
    pattern: tuple[str, str, str]
    matrix: MatrixOperator

    @classmethod
    def from_pattern(cls, name: str, pattern: tuple[str, str, str]) -> "GhzOperator":
        return cls(name, pattern, tensor_op(*(_PAULI_BY_AXIS[p] for p in pattern)))


def build_operators() -> tuple[GhzOperator, GhzOperator, GhzOperator, GhzOperator]:
    """A = x y y, B = y x y, C = y y x, D = x x x (particle 1 leftmost)."""
    a, b, c, d = (GhzOperator.from_pattern(n, PATTERNS[n]) for n in "ABCD")
    return a, b, c, d


@dataclass
class AlgebraReport:
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())


def verify_algebra() -> AlgebraReport:
    """Hermiticity, pairwise commutation, involution, and D + ABC = 0."""
    ops = build_operators()
    zero = MatrixOperator(np.zeros((8, 8)))
    rep = AlgebraReport()
    for op in ops:
        rep.checks[f"{op.name}_hermitian"] = op.matrix.is_hermitian()
    for p, q in itertools.combinations(ops, 2):
        rep.checks[f"[{p.name},{q.name}]=0"] = commutator(p.matrix, q.matrix).allclose(zero)
    for op in ops:
        rep.checks[f"{op.name}^2=I"] = matmul(op.matrix, op.matrix).allclose(identity(8))
    a, b, c, d = ops
    abc = matmul(matmul(a.matrix, b.matrix), c.matrix)
    rep.checks["D=-ABC"] = (d.matrix + abc).allclose(zero)
    return rep


def eigenvalue_check(op: GhzOperator, psi: StateVector) -> Optional[int]:
    """Return c in {+1, -1} if op|psi> = c|psi>, else None."""
    if psi.dim != 8 or not psi.is_normalized():
        raise ValueError("expected a normalized three-spin state")
    out = apply(op.matrix, psi)
    for c in (+1, -1):
        if out.allclose(c * psi, EPS_EQ):
            return c
    return None


@dataclass(frozen=True)
class RealismAssignment:
    """Pre-assigned +/-1 values of sigma_x and sigma_y on each of the three spins."""

    m_x: tuple[int, int, int]
    m_y: tuple[int, int, int]

    def product(self, pattern: tuple[str, str, str]) -> int:
        vals = {"x": self.m_x, "y": self.m_y}
        return vals[pattern[0]][0] * vals[pattern[1]][1] * vals[pattern[2]][2]


def all_assignments() -> list[RealismAssignment]:
    return [
        RealismAssignment(bits[:3], bits[3:])
        for bits in itertools.product((1, -1), repeat=6)
    ]


@dataclass(frozen=True)
class RealismReport:
    n_assignments: int
    surviving: tuple[RealismAssignment, ...]
    realist_d_values: frozenset[int]
    quantum_d_value: int
    n_matching_quantum: int

    @property
    def contradiction(self) -> bool:
        return self.quantum_d_value not in self.realist_d_values and self.n_matching_quantum == 0

    @property
    def pair(self) -> tuple[int, int]:
        (realist,) = self.realist_d_values
        return realist, self.quantum_d_value


def realism_contradiction_report() -> RealismReport:
    """Enumerate all 64 value assignments against the A = B = C = +1 constraints.

    Every survivor has m_x1 m_x2 m_x3 = +1, while D has eigenvalue -1 on the
    GHZ state; no assignment reproduces all four quantum values.
    """
    assignments = all_assignments()
    surviving = tuple(
        r for r in assignments if all(r.product(PATTERNS[n]) == 1 for n in "ABC")
    )
    _, _, _, d = build_operators()
    quantum_d = eigenvalue_check(d, ghz_state())
    if quantum_d is None:
        raise RuntimeError("GHZ state is not an eigenstate of D")
    quantum_values = {"A": 1, "B": 1, "C": 1, "D": quantum_d}
    matching = sum(
        all(r.product(PATTERNS[n]) == v for n, v in quantum_values.items()) for r in assignments
    )
    return RealismReport(
        n_assignments=len(assignments),
        surviving=surviving,
        realist_d_values=frozenset(r.product(PATTERNS["D"]) for r in surviving),
        quantum_d_value=quantum_d,
        n_matching_quantum=matching,
    )


@dataclass(frozen=True)
class BoxesReport:
    p_a: float
    p_b: float
    p_not_a_given_b: float
    p_a_given_not_b: float
    purity: float
    decohered_purity: float


def boxes_analysis() -> BoxesReport:
    """Born probabilities and perfect conditional certainties for the split-box particle.

    The particle is in exactly one box, so p(-A, B) = p(B) and p(A, -B) = p(A).
    """
    psi = box_state()
    rho = from_pure(psi)
    box_a, box_b = ket(1, 0), ket(0, 1)
    p_a = born_probability(rho, box_a)
    p_b = born_probability(rho, box_b)
    # diagonal part: the box populations seen by an observer at either box
    decohered = np.diag(np.diag(rho.entries)).real
    return BoxesReport(
        p_a=p_a,
        p_b=p_b,
        p_not_a_given_b=conditional_probability(p_b, p_b),
        p_a_given_not_b=conditional_probability(p_a, p_a),
        purity=purity(rho),
        decohered_purity=float(np.trace(decohered @ decohered)),
    )
