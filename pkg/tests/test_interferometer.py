import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonlocality.interferometer import (
    ALL_CONFIGS,
    BS2,
    BS2_REMOVED,
    GAMMA,
    ExperimentFileError,
    HardyConfig,
    ModeLabel,
    ModeState,
    annihilate,
    apply_element,
    collapse_after_detection,
    detection_probability,
    equivalent_up_to_phase,
    format_experiment,
    frame_intermediate,
    frame_reality_report,
    from_named,
    label,
    local_realism_table,
    parse_experiment,
    parse_term,
    projector_E_expectation,
    propagate_hardy,
    propagate_single_mz,
    propagate_to_psi,
    read_experiment,
    term,
)

Q = 1 / (2 * math.sqrt(2))
PP, RR = HardyConfig(True, True), HardyConfig(False, False)
PLUS_ONLY, MINUS_ONLY = HardyConfig(True, False), HardyConfig(False, True)

# hand-typed golden coefficients, compared up to a global phase
GOLDEN = {
    PP: {"gamma": -2 / 4, "f+f-": 3 / 4, "f+g-": -0.25j, "g+f-": -0.25j, "g+g-": 1 / 4},
    MINUS_ONLY: {"gamma": -math.sqrt(2) * Q, "f+f-": Q, "g+f-": -2j * Q, "f+g-": -1j * Q},
    PLUS_ONLY: {"gamma": -math.sqrt(2) * Q, "f+f-": Q, "f+g-": -2j * Q, "g+f-": -1j * Q},
    RR: {"gamma": 0.5, "g+g-": 0.5, "g+f-": 0.5j, "f+g-": 0.5j},
}
GOLDEN_PSI = {"gamma": -0.5, "d+d-": -0.5, "d+e-": -0.5j, "e+d-": -0.5j}
GOLDEN_K_PLUS = {"gamma": -math.sqrt(2) * Q, "f+d-": -2j * Q, "f+e-": Q, "g+e-": -1j * Q}
GOLDEN_K_MINUS = {"gamma": -math.sqrt(2) * Q, "d+f-": -2j * Q, "e+f-": Q, "e+g-": -1j * Q}


def test_single_mz_with_bs2():
    s = propagate_single_mz(True)
    assert abs(abs(s.amplitude(term("f"))) - 1) <= 1e-12
    assert detection_probability(s, "g") <= 1e-12
    assert s.amplitude(term("f")) == pytest.approx(-1)


def test_single_mz_without_bs2():
    s = propagate_single_mz(False)
    assert detection_probability(s, "f") == pytest.approx(0.5, abs=1e-12)
    assert detection_probability(s, "g") == pytest.approx(0.5, abs=1e-12)


def test_psi_before_second_splitters():
    assert equivalent_up_to_phase(propagate_to_psi(), from_named(GOLDEN_PSI))


@pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.label)
def test_hardy_golden(config):
    s = propagate_hardy(config)
    assert equivalent_up_to_phase(s, from_named(GOLDEN[config]))
    assert abs(s.norm2 - 1) <= 1e-12


def test_both_present_exact_phase():
    s = propagate_hardy(PP)
    for name, amp in GOLDEN[PP].items():
        assert s.amplitude(parse_term(name)) == pytest.approx(amp, abs=1e-12)


def test_hardy_probabilities():
    assert detection_probability(propagate_hardy(PP), "g+g-") == pytest.approx(1 / 16, abs=1e-12)
    assert detection_probability(propagate_hardy(RR), "f+f-") == 0
    assert parse_term("f+f-") not in propagate_hardy(RR)
    assert detection_probability(propagate_hardy(MINUS_ONLY), "gamma") == pytest.approx(0.25, abs=1e-12)


def test_one_splitter_configs():
    # BS2- in place, BS2+ removed: g+f- carries (2/(2 sqrt 2))^2 = 1/2
    s = propagate_hardy(MINUS_ONLY)
    assert detection_probability(s, "g+f-") == pytest.approx(0.5, abs=1e-12)
    assert detection_probability(s, "f+g-") == pytest.approx(1 / 8, abs=1e-12)
    s = propagate_hardy(PLUS_ONLY)
    assert detection_probability(s, "f+g-") == pytest.approx(0.5, abs=1e-12)
    assert detection_probability(s, "g+f-") == pytest.approx(1 / 8, abs=1e-12)
    assert sum(s.probabilities().values()) == pytest.approx(1.0, abs=1e-12)


def _swap_tags(s: ModeState) -> ModeState:
    flip = {"+": "-", "-": "+"}
    out = {}
    for key, amp in s.terms.items():
        swapped = tuple(ModeLabel(flip.get(l.particle, l.particle), l.arm) for l in key)
        out[tuple(sorted(swapped, key=lambda l: l.particle != "+"))] = amp
    return ModeState(out)


def test_one_splitter_configs_mirror_each_other():
    assert _swap_tags(propagate_hardy(PLUS_ONLY)) == propagate_hardy(MINUS_ONLY)


def test_both_present_equals_bs2_on_psi():
    s = apply_element(apply_element(propagate_to_psi(), "+", BS2), "-", BS2)
    assert s == propagate_hardy(PP)


def test_norm_preserved_at_each_stage():
    s = ModeState({term("a+", "a-"): 1.0})
    for particle in ("+", "-"):
        s = apply_element(s, particle, {"a": {"b": 1 / math.sqrt(2), "c": 1j / math.sqrt(2)}})
        assert s.norm2 == pytest.approx(1.0, abs=1e-12)
    s = annihilate(s)
    assert s.norm2 == pytest.approx(1.0, abs=1e-12)
    assert (GAMMA,) in s
    s = apply_element(propagate_to_psi(), "+", BS2_REMOVED)
    assert s.norm2 == pytest.approx(1.0, abs=1e-12)


def test_frames_golden():
    assert equivalent_up_to_phase(frame_intermediate("K+"), from_named(GOLDEN_K_PLUS))
    assert equivalent_up_to_phase(frame_intermediate("K-"), from_named(GOLDEN_K_MINUS))
    for f in ("K+", "K-"):
        assert frame_intermediate(f).norm2 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        frame_intermediate("K0")


def test_collapse_after_detection():
    s = collapse_after_detection(frame_intermediate("K+"), "g+")
    assert list(s.terms) == [(label("e-"),)] and abs(abs(s.amplitude(term("e-"))) - 1) <= 1e-12
    s = collapse_after_detection(frame_intermediate("K-"), "g-")
    assert list(s.terms) == [(label("e+"),)]
    with pytest.raises(ValueError):
        collapse_after_detection(frame_intermediate("K+"), "g-")


def test_projector_e_expectation():
    assert projector_E_expectation(propagate_to_psi()) <= 1e-12
    assert projector_E_expectation(from_named({"e+e-": 1})) == pytest.approx(1)
    assert projector_E_expectation(from_named({"d+e-": 0.6, "e+d-": 0.8})) == 0


def test_local_realism_table():
    t = local_realism_table()
    f = {x.key: x for x in t.facts}
    assert f["no_ff"].fraction == 0
    assert f["gplus_implies_fminus"].fraction == pytest.approx(1 / 8, abs=1e-12)
    assert f["gminus_implies_fplus"].fraction == pytest.approx(1 / 8, abs=1e-12)
    assert f["gg_both_present"].fraction == pytest.approx(1 / 16, abs=1e-12)
    assert f["gplus_implies_fminus"].conditional == pytest.approx(1, abs=1e-12)
    assert t.inconsistent and "inconsistent" in t.verdict


def test_frame_reality_report():
    r = frame_reality_report()
    vals = {v.frame: v.value for v in r.values}
    assert vals == {"K+": 1, "K-": 1, "K0": 0}
    assert r.inferred_product == 1 and r.inconsistent


def test_equivalence_relation():
    a = from_named(GOLDEN[PP])
    assert equivalent_up_to_phase(a, from_named({k: 1j * v for k, v in GOLDEN[PP].items()}))
    flipped = dict(GOLDEN[PP], **{"g+g-": -0.25})
    assert not equivalent_up_to_phase(a, from_named(flipped))
    assert not equivalent_up_to_phase(a, from_named(GOLDEN[RR]))


def test_mode_state_drops_zero_terms():
    s = ModeState({term("f+", "f-"): 0.0, term("g+", "g-"): 1.0})
    assert len(s) == 1


def test_label_validation():
    with pytest.raises(ValueError):
        label("h+")
    with pytest.raises(ValueError):
        ModeLabel("+", "gamma")


@given(st.sampled_from(ALL_CONFIGS))
def test_experiment_round_trip(config):
    assert parse_experiment(format_experiment(config)) == config


def test_experiment_file(tmp_path):
    p = tmp_path / "exp.txt"
    p.write_text("# both in place\nbs2_plus = present\n\nbs2_minus = removed\n")
    assert read_experiment(p) == PLUS_ONLY


@pytest.mark.parametrize("text,line", [
    ("bs2_plus = present\nbs2_minus = maybe\n", ":2:"),
    ("bs2_plus = present\nbs2_plus = removed\n", ":2:"),
    ("frobnicate\n", ":1:"),
])
def test_experiment_errors_name_the_line(text, line):
    with pytest.raises(ExperimentFileError, match=line):
        parse_experiment(text, "exp.txt")


def test_experiment_missing_setting():
    with pytest.raises(ExperimentFileError, match="bs2_minus"):
        parse_experiment("bs2_plus = present\n")
    with pytest.raises(ExperimentFileError):
        read_experiment("/nonexistent/file.txt")
