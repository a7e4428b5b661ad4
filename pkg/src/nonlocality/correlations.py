"""Joint probabilities, collapse and correlation functions for EPR pairs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .density import from_pure, partial_trace
from .linalg import EPS_EQ, MatrixOperator, StateVector, apply, identity, inner, outer, tensor, tensor_op
from .states import INV_SQRT2, Direction, photon_basis, psi_photon, singlet, spin_state


@dataclass(frozen=True)
class JointOutcome:
    sign1: int
    sign2: int
    probability: float


def singlet_joint_probability(a: Direction, b: Direction) -> float:
    """Closed-form probability of finding spin 1 up along ``a`` and spin 2 up along ``b``."""
    sa, ca = math.sin(a.theta / 2), math.cos(a.theta / 2)
    sb, cb = math.sin(b.theta / 2), math.cos(b.theta / 2)
    return 0.5 * (
        sa * sa * cb * cb
        + sb * sb * ca * ca
        - 0.5 * math.sin(a.theta) * math.sin(b.theta) * math.cos(a.phi - b.phi)
    )


def singlet_joint_amplitude(a: Direction, b: Direction, sign1: int = +1, sign2: int = +1) -> complex:
    """(<sign1 a| (x) <sign2 b|) singlet, by direct contraction."""
    return inner(tensor(spin_state(a, sign1), spin_state(b, sign2)), singlet())


def singlet_joint_probability_direct(a: Direction, b: Direction, sign1: int = +1, sign2: int = +1) -> float:
    return abs(singlet_joint_amplitude(a, b, sign1, sign2)) ** 2


def singlet_outcomes(a: Direction, b: Direction) -> list[JointOutcome]:
    """All four (sign1, sign2) outcome probabilities for settings ``a``, ``b``."""
    return [
        JointOutcome(s1, s2, singlet_joint_probability_direct(a, b, s1, s2))
        for s1 in (+1, -1)
        for s2 in (+1, -1)
    ]


def collapse_singlet(outcome1: int, axis: Direction) -> StateVector:
    """Post-measurement two-spin state after spin 1 is found with ``outcome1`` along ``axis``.

    Projects the singlet with |s a><s a| (x) I and renormalizes. Outcome +1
    leaves |a> (x) |-a>, outcome -1 leaves |-a> (x) |a>, each up to phase.
    """
    if outcome1 not in (+1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome1!r}")
    k = spin_state(axis, outcome1)
    projector = tensor_op(outer(k, k), identity(2))
    return apply(projector, singlet()).normalized()


def conditional_probability(joint: float, marginal: float) -> float:
    """p(X | Y) = p(X, Y) / p(Y)."""
    if marginal <= EPS_EQ:
        raise ValueError(f"conditioning on an event of probability {marginal!r}")
    if joint < -EPS_EQ or joint > marginal + EPS_EQ:
        raise ValueError(f"joint probability {joint!r} inconsistent with marginal {marginal!r}")
    return min(1.0, max(0.0, joint / marginal))


class Channel(enum.Enum):
    ORDINARY = "o"
    EXTRAORDINARY = "e"

    @classmethod
    def parse(cls, text: str) -> "Channel":
        key = text.strip().lower()
        aliases = {"o": cls.ORDINARY, "1": cls.ORDINARY, "ordinary": cls.ORDINARY,
                   "e": cls.EXTRAORDINARY, "perp": cls.EXTRAORDINARY, "extraordinary": cls.EXTRAORDINARY}
        if key not in aliases:
            raise ValueError(f"unknown photon channel {text!r}")
        return aliases[key]


@dataclass(frozen=True)
class PhotonChannel:
    channel1: Channel
    channel2: Channel

    @property
    def label(self) -> str:
        return self.channel1.value + self.channel2.value


PHOTON_CHANNELS = tuple(PhotonChannel(c1, c2) for c1 in Channel for c2 in Channel)


def photon_amplitude(kind: str, ch: PhotonChannel, t1: float, t2: float) -> complex:
    """Coefficient of |t1^a> (x) |t2^b> in the pair state, from the closed-form table."""
    d = t1 - t2
    same = ch.channel1 is ch.channel2
    if kind == "I":
        if same:
            return INV_SQRT2 * math.sin(d)
        sign = 1.0 if ch.channel1 is Channel.EXTRAORDINARY else -1.0
        return sign * INV_SQRT2 * math.cos(d)
    if kind == "II":
        if same:
            return INV_SQRT2 * math.cos(d)
        sign = -1.0 if ch.channel1 is Channel.EXTRAORDINARY else 1.0
        return sign * INV_SQRT2 * math.sin(d)
    raise ValueError(f"photon pair kind must be 'I' or 'II', got {kind!r}")


def photon_amplitude_direct(kind: str, ch: PhotonChannel, t1: float, t2: float) -> complex:
    """Same coefficient by projecting the pair state onto the rotated analyzer bases."""
    k1 = photon_basis(t1)[0 if ch.channel1 is Channel.ORDINARY else 1]
    k2 = photon_basis(t2)[0 if ch.channel2 is Channel.ORDINARY else 1]
    return inner(tensor(k1, k2), psi_photon(kind))


def photon_joint_probability(kind: str, ch: PhotonChannel, t1: float, t2: float) -> float:
    return abs(photon_amplitude(kind, ch, t1, t2)) ** 2


def quantum_correlation_closed_form(a: Direction, b: Direction) -> float:
    """-a.b for the singlet."""
    return -a.dot(b)


def quantum_correlation(a: Direction, b: Direction) -> float:
    """Singlet correlation <A B> as P(++) + P(--) - P(+-) - P(-+).

    Each P is a squared amplitude from direct contraction; this never calls
    the -a.b closed form, so comparing the two is a real check.
    """
    return float(sum(o.sign1 * o.sign2 * o.probability for o in singlet_outcomes(a, b)))


def reduced_singlet(keep: int) -> MatrixOperator:
    return partial_trace(from_pure(singlet(), (2, 2)), keep).matrix


def max_closed_vs_direct(pairs: list[tuple[Direction, Direction]]) -> float:
    """Largest |closed form - direct| joint probability over the given pairs."""
    diffs = [abs(singlet_joint_probability(a, b) - singlet_joint_probability_direct(a, b)) for a, b in pairs]
    return float(np.max(diffs)) if diffs else 0.0
