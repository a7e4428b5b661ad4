"""Named states: spin kets along a direction, the singlet, photon pairs, GHZ, boxes.

Basis orderings: spin (up, down); photon (H, V); multi-particle kets list
particle 1 first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import EPS_NORM, StateVector, ket, tensor

TWO_PI = 2.0 * math.pi
INV_SQRT2 = 1.0 / math.sqrt(2.0)

UP = ket(1, 0, labels=("up", "down"))
DOWN = ket(0, 1, labels=("up", "down"))
H = ket(1, 0, labels=("H", "V"))
V = ket(0, 1, labels=("H", "V"))


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere given by polar angle ``theta`` and azimuth ``phi``.

    ``phi`` is wrapped into [0, 2*pi); ``theta`` must lie in [0, pi].
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValueError("direction angles must be finite")
        if theta < 0.0 or theta > math.pi:
            raise ValueError(f"theta={theta} outside [0, pi]")
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)

    def dot(self, other: "Direction") -> float:
        return float(self.vector @ other.vector)

    @classmethod
    def in_xz_plane(cls, angle: float) -> "Direction":
        """Direction at ``angle`` from +z towards +x, for any real angle.

        Used for coplanar setting fans; angles outside [0, pi] fold onto
        the phi = pi half-plane.
        """
        a = math.fmod(angle, TWO_PI)
        if a < 0.0:
            a += TWO_PI
        if a <= math.pi:
            return cls(a, 0.0)
        return cls(TWO_PI - a, math.pi)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Direction":
        """Uniformly distributed direction on the sphere."""
        return cls(math.acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, TWO_PI))


Z_AXIS = Direction(0.0, 0.0)
X_AXIS = Direction(math.pi / 2, 0.0)
Y_AXIS = Direction(math.pi / 2, math.pi / 2)


def spin_state(d: Direction, sign: int = +1) -> StateVector:
    """Spin-1/2 ket with projection ``sign`` along ``d``.

    Phase convention: |+n> = cos(t/2)|up> + e^{i phi} sin(t/2)|down> and
    |-n> = sin(t/2)|up> - e^{i phi} cos(t/2)|down>.
    """
    c, s = math.cos(d.theta / 2), math.sin(d.theta / 2)
    phase = complex(math.cos(d.phi), math.sin(d.phi))
    if sign == +1:
        return ket(c, phase * s, labels=("up", "down"))
    if sign == -1:
        return ket(s, -phase * c, labels=("up", "down"))
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def singlet() -> StateVector:
    """(|up,down> - |down,up>)/sqrt(2) in the (uu, ud, du, dd) basis."""
    psi = INV_SQRT2 * (tensor(UP, DOWN) - tensor(DOWN, UP))
    return StateVector(psi.amplitudes, ("uu", "ud", "du", "dd"))


def singlet_along(d: Direction) -> StateVector:
    """The singlet assembled from |n> and |-n> along an arbitrary axis.

    Equal to :func:`singlet` up to a global phase for every ``d``.
    """
    plus, minus = spin_state(d, +1), spin_state(d, -1)
    return INV_SQRT2 * (tensor(plus, minus) - tensor(minus, plus))


def photon_basis(theta: float) -> tuple[StateVector, StateVector]:
    """Ordinary and extraordinary polarization kets for an analyzer at ``theta``.

    |theta> = cos|H> + sin|V>, |theta_perp> = -sin|H> + cos|V>.
    """
    c, s = math.cos(theta), math.sin(theta)
    return ket(c, s, labels=("H", "V")), ket(-s, c, labels=("H", "V"))


def psi_photon(kind: str) -> StateVector:
    """Two-photon polarization states in the (HH, HV, VH, VV) basis.

    ``"I"``: (|V H> - |H V>)/sqrt(2), the positronium decay pair.
    ``"II"``: (|H H> + |V V>)/sqrt(2), the calcium cascade pair.
    """
    if kind == "I":
        psi = INV_SQRT2 * (tensor(V, H) - tensor(H, V))
    elif kind == "II":
        psi = INV_SQRT2 * (tensor(H, H) + tensor(V, V))
    else:
        raise ValueError(f"photon pair kind must be 'I' or 'II', got {kind!r}")
    return StateVector(psi.amplitudes, ("HH", "HV", "VH", "VV"))


def ghz_state() -> StateVector:
    """(|up up up> - |down down down>)/sqrt(2) on three spins."""
    psi = INV_SQRT2 * (tensor(UP, UP, UP) - tensor(DOWN, DOWN, DOWN))
    labels = tuple("".join("ud"[int(b)] for b in format(i, "03b")) for i in range(8))
    return StateVector(psi.amplitudes, labels)


def box_state() -> StateVector:
    """A particle split between two boxes: (|A> + |B>)/sqrt(2)."""
    return ket(INV_SQRT2, INV_SQRT2, labels=("A", "B"))


def permute_factors(v: StateVector, perm: tuple[int, ...], dims: tuple[int, ...]) -> StateVector:
    """Reorder tensor factors: output factor k is input factor ``perm[k]``."""
    if int(np.prod(dims)) != v.dim:
        raise ValueError(f"factor dims {dims} do not multiply to {v.dim}")
    arr = v.amplitudes.reshape(dims).transpose(perm).reshape(-1)
    return StateVector(arr)


def assert_normalized(v: StateVector, what: str = "state") -> None:
    if not v.is_normalized(EPS_NORM):
        raise ValueError(f"{what} is not normalized (norm^2 = {v.norm2!r})")
