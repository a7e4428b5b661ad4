import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocality.correlations import (
    PHOTON_CHANNELS,
    Channel,
    PhotonChannel,
    collapse_singlet,
    conditional_probability,
    max_closed_vs_direct,
    photon_amplitude,
    photon_amplitude_direct,
    photon_joint_probability,
    quantum_correlation,
    quantum_correlation_closed_form,
    reduced_singlet,
    singlet_joint_probability,
    singlet_joint_probability_direct,
    singlet_outcomes,
)
from nonlocality.linalg import EPS_EQ, same_ray, tensor
from nonlocality.states import DOWN, UP, Direction, Z_AXIS

from conftest import directions

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
OO = PhotonChannel(Channel.ORDINARY, Channel.ORDINARY)
EO = PhotonChannel(Channel.EXTRAORDINARY, Channel.ORDINARY)
OE = PhotonChannel(Channel.ORDINARY, Channel.EXTRAORDINARY)


@given(directions)
def test_opposite_and_equal_axes(a):
    assert abs(singlet_joint_probability(a, a.antipode()) - 0.5) <= EPS_EQ
    assert abs(singlet_joint_probability(a, a)) <= EPS_EQ


def test_x_versus_minus_x():
    a, b = Direction(math.pi / 2, 0.0), Direction(math.pi / 2, math.pi)
    assert singlet_joint_probability(a, b) == pytest.approx(0.5, abs=EPS_EQ)


def test_closed_form_matches_direct_1000_pairs():
    rng = np.random.default_rng(2)
    pairs = [(Direction.random(rng), Direction.random(rng)) for _ in range(1000)]
    assert max_closed_vs_direct(pairs) <= 1e-12


@given(directions, directions)
def test_outcomes_form_a_distribution(a, b):
    outs = singlet_outcomes(a, b)
    assert abs(sum(o.probability for o in outs) - 1) <= 1e-12
    assert all(-EPS_EQ <= o.probability <= 1 + EPS_EQ for o in outs)


@given(directions, directions)
def test_joint_probability_symmetric(a, b):
    assert abs(singlet_joint_probability_direct(a, b) - singlet_joint_probability_direct(b, a)) <= 1e-12


def test_collapse_along_z():
    assert collapse_singlet(+1, Z_AXIS).allclose(tensor(UP, DOWN))
    assert same_ray(collapse_singlet(-1, Z_AXIS), tensor(DOWN, UP))
    with pytest.raises(ValueError):
        collapse_singlet(0, Z_AXIS)


def test_conditional_probability():
    assert conditional_probability(0.5, 0.5) == 1.0
    with pytest.raises(ValueError):
        conditional_probability(0.0, 0.0)


@pytest.mark.parametrize("kind", ["I", "II"])
@given(t1=angles, t2=angles)
def test_photon_table_matches_projection(kind, t1, t2):
    for ch in PHOTON_CHANNELS:
        assert abs(photon_amplitude(kind, ch, t1, t2) - photon_amplitude_direct(kind, ch, t1, t2)) <= 1e-12


def test_photon_examples():
    t1, t2 = 0.9, 0.2
    assert photon_amplitude("I", OO, t1, t2) == pytest.approx(math.sin(0.7) / math.sqrt(2))
    assert photon_amplitude("II", OO, t1, t2) == pytest.approx(math.cos(0.7) / math.sqrt(2))
    assert photon_amplitude("I", EO, 0.4, 0.4) == pytest.approx(1 / math.sqrt(2))
    assert photon_amplitude("I", OE, 0.4, 0.4) == pytest.approx(-1 / math.sqrt(2))
    assert photon_joint_probability("I", OO, math.pi / 2, 0.0) == pytest.approx(0.5, abs=EPS_EQ)
    assert photon_joint_probability("II", OO, 0.3, 0.3) == pytest.approx(0.5, abs=EPS_EQ)


def test_photon_sum_100_random():
    rng = np.random.default_rng(3)
    for t1, t2 in rng.uniform(0, math.pi, (100, 2)):
        for kind in ("I", "II"):
            assert abs(sum(photon_joint_probability(kind, ch, t1, t2) for ch in PHOTON_CHANNELS) - 1) <= 1e-12


def test_photon_kind_and_channel_parsing():
    with pytest.raises(ValueError):
        photon_amplitude("III", OO, 0, 0)
    assert Channel.parse("perp") is Channel.EXTRAORDINARY
    with pytest.raises(ValueError):
        Channel.parse("x")


def test_correlation_examples():
    a = Direction(0.7, 1.2)
    assert quantum_correlation(a, a) == pytest.approx(-1.0, abs=EPS_EQ)
    b, c = Direction.in_xz_plane(0.0), Direction.in_xz_plane(math.pi / 3)
    assert quantum_correlation(b, c) == pytest.approx(-0.5, abs=EPS_EQ)


@given(directions, directions)
@settings(max_examples=200)
def test_outcome_sum_equals_minus_dot(a, b):
    assert abs(quantum_correlation(a, b) - quantum_correlation_closed_form(a, b)) <= 1e-12
    assert -1 - EPS_EQ <= quantum_correlation(a, b) <= 1 + EPS_EQ


def test_reduced_singlet_is_maximally_mixed():
    for keep in (0, 1):
        assert np.allclose(reduced_singlet(keep).entries, np.eye(2) / 2, atol=EPS_EQ)
