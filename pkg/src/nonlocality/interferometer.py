"""Mode-labelled amplitude propagation through Mach-Zehnder interferometers.

Conventions: a splitter sends ``in`` to (transmitted + i reflected)/sqrt(2);
a mirror multiplies by i. Two-particle terms are keyed (positron, electron).
When the positron and electron both take their inner arms (c+ c-) they
annihilate into a photon pair, modelled as the single absorbing mode
``gamma`` which keeps the amplitude of the c+ c- term.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Union

from .linalg import EPS_EQ, EPS_NORM

R2 = 1.0 / math.sqrt(2.0)

ARMS = ("a", "b", "c", "d", "e", "f", "g", "gamma")
PARTICLES = ("+", "-", "pair", "")


@dataclass(frozen=True, order=True)
class ModeLabel:
    """Arm ``arm`` occupied by ``particle``: '+' positron, '-' electron, '' a lone particle."""

    particle: str
    arm: str

    def __post_init__(self):
        if self.particle not in PARTICLES:
            raise ValueError(f"unknown particle tag {self.particle!r}")
        if self.arm not in ARMS:
            raise ValueError(f"unknown arm {self.arm!r}")
        if (self.particle == "pair") != (self.arm == "gamma"):
            raise ValueError("only the annihilation photon pair occupies 'gamma'")

    def __str__(self) -> str:
        return "gamma" if self.arm == "gamma" else self.arm + self.particle


GAMMA = ModeLabel("pair", "gamma")

Key = tuple[ModeLabel, ...]
_LABEL_RE = re.compile(r"^([a-g])([+-]?)$")


def label(text: str) -> ModeLabel:
    """Parse 'g+', 'e-', 'f' or 'gamma'."""
    text = text.strip()
    if text in ("gamma", "γ"):
        return GAMMA
    m = _LABEL_RE.match(text)
    if not m:
        raise ValueError(f"bad mode label {text!r}")
    return ModeLabel(m.group(2), m.group(1))


def term(*names: Union[str, ModeLabel]) -> Key:
    """Build a term key: ``term('g+', 'f-')``, ``term('gamma')``, ``term('f')``."""
    key = tuple(n if isinstance(n, ModeLabel) else label(n) for n in names)
    _check_key(key)
    return key


def parse_term(text: str) -> Key:
    """'g+g-' -> term('g+', 'g-'); 'gamma' and single labels pass through."""
    text = text.strip()
    if text in ("gamma", "γ"):
        return (GAMMA,)
    parts = re.findall(r"[a-g][+-]?", text)
    if "".join(parts) != text:
        raise ValueError(f"bad term {text!r}")
    return term(*parts)


def _check_key(key: Key) -> None:
    if len(key) == 2 and (key[0].particle, key[1].particle) != ("+", "-"):
        raise ValueError(f"two-particle terms are ordered (positron, electron), got {key}")
    if not 1 <= len(key) <= 2:
        raise ValueError(f"terms hold one or two labels, got {key}")


def term_name(key: Key) -> str:
    return "".join(str(l) for l in key)


_ARM_ORDER = {a: i for i, a in enumerate(ARMS)}


def _sort_key(key: Key):
    return (key != (GAMMA,), len(key), [(_ARM_ORDER[l.arm], l.particle) for l in key])


class ModeState:
    """Immutable sparse superposition over mode terms.

    Terms with negligible amplitude are dropped on construction.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, complex]):
        clean = {}
        for key, amp in terms.items():
            key = tuple(key)
            _check_key(key)
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude for {term_name(key)}")
            if abs(amp) > 1e-15:
                clean[key] = amp
        ordered = dict(sorted(clean.items(), key=lambda kv: _sort_key(kv[0])))
        self._terms = MappingProxyType(ordered)

    @property
    def terms(self) -> Mapping[Key, complex]:
        return self._terms

    def amplitude(self, key: Key) -> complex:
        return self._terms.get(tuple(key), 0j)

    @property
    def norm2(self) -> float:
        return sum(abs(a) ** 2 for a in self._terms.values())

    def probabilities(self) -> dict[str, float]:
        return {term_name(k): abs(a) ** 2 for k, a in self._terms.items()}

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, key) -> bool:
        return tuple(key) in self._terms

    def __eq__(self, other) -> bool:
        return isinstance(other, ModeState) and dict(self._terms) == dict(other._terms)

    def __repr__(self) -> str:
        body = ", ".join(f"{term_name(k)}: {a:.6g}" for k, a in self._terms.items())
        return f"ModeState({{{body}}})"


def from_named(coefficients: Mapping[str, complex]) -> ModeState:
    """ModeState from ``{'g+g-': 0.25, 'gamma': -0.5, ...}``."""
    return ModeState({parse_term(k): v for k, v in coefficients.items()})


# --- optical elements -------------------------------------------------------

Rule = Mapping[str, Mapping[str, complex]]

BS1 = {"a": {"b": R2, "c": 1j * R2}}
MIRRORS = {"b": {"d": 1j}, "c": {"e": 1j}}
BS2 = {"d": {"g": R2, "f": 1j * R2}, "e": {"f": R2, "g": 1j * R2}}
BS2_REMOVED = {"d": {"g": 1.0}, "e": {"f": 1.0}}


def apply_element(s: ModeState, particle: str, rule: Rule) -> ModeState:
    """Map arms of ``particle`` through ``rule``; arms not in ``rule`` pass unchanged."""
    out: dict[Key, complex] = {}
    for key, amp in s.terms.items():
        slot = next((i for i, l in enumerate(key) if l.particle == particle), None)
        if slot is None or key[slot].arm not in rule:
            out[key] = out.get(key, 0j) + amp
            continue
        for arm, coeff in rule[key[slot].arm].items():
            new = key[:slot] + (ModeLabel(particle, arm),) + key[slot + 1:]
            out[new] = out.get(new, 0j) + amp * coeff
    return ModeState(out)


def annihilate(s: ModeState) -> ModeState:
    """c+ c- -> gamma with the amplitude carried over."""
    meet = (ModeLabel("+", "c"), ModeLabel("-", "c"))
    out = {k: a for k, a in s.terms.items() if k != meet}
    if meet in s.terms:
        out[(GAMMA,)] = out.get((GAMMA,), 0j) + s.terms[meet]
    return ModeState(out)


def _checked(s: ModeState, stage: str) -> ModeState:
    if abs(s.norm2 - 1.0) > EPS_NORM:
        raise RuntimeError(f"norm {s.norm2!r} after {stage}")
    return s


def propagate_single_mz(bs2_present: bool = True) -> ModeState:
    """One particle entering arm ``a``; output on detector arms f (F) and g (G)."""
    s = ModeState({term("a"): 1.0})
    s = _checked(apply_element(s, "", BS1), "BS1")
    s = _checked(apply_element(s, "", MIRRORS), "mirrors")
    return _checked(apply_element(s, "", BS2 if bs2_present else BS2_REMOVED), "BS2")


@dataclass(frozen=True)
class HardyConfig:
    bs2_plus: bool = True
    bs2_minus: bool = True

    @property
    def label(self) -> str:
        return f"bs2_plus={_word(self.bs2_plus)}, bs2_minus={_word(self.bs2_minus)}"


def _word(present: bool) -> str:
    return "present" if present else "removed"


ALL_CONFIGS = tuple(HardyConfig(p, m) for p in (True, False) for m in (True, False))


def propagate_to_psi() -> ModeState:
    """Both particles through their first splitters, annihilation, and mirrors."""
    s = ModeState({term("a+", "a-"): 1.0})
    s = _checked(apply_element(s, "+", BS1), "BS1+")
    s = _checked(apply_element(s, "-", BS1), "BS1-")
    s = _checked(annihilate(s), "annihilation")
    s = _checked(apply_element(s, "+", MIRRORS), "mirrors+")
    return _checked(apply_element(s, "-", MIRRORS), "mirrors-")


def propagate_hardy(config: HardyConfig) -> ModeState:
    s = propagate_to_psi()
    s = _checked(apply_element(s, "+", BS2 if config.bs2_plus else BS2_REMOVED), "BS2+")
    return _checked(apply_element(s, "-", BS2 if config.bs2_minus else BS2_REMOVED), "BS2-")


def detection_probability(s: ModeState, target: Union[Key, str]) -> float:
    key = parse_term(target) if isinstance(target, str) else tuple(target)
    return abs(s.amplitude(key)) ** 2


def marginal_probability(s: ModeState, detected: ModeLabel) -> float:
    return sum(abs(a) ** 2 for k, a in s.terms.items() if detected in k)


def frame_intermediate(frame: str) -> ModeState:
    """State when only one particle has crossed its second splitter.

    ``"K+"``: the positron has passed BS2+, the electron has not yet reached BS2-.
    ``"K-"``: the mirror image.
    """
    s = propagate_to_psi()
    if frame == "K+":
        return _checked(apply_element(s, "+", BS2), "BS2+")
    if frame == "K-":
        return _checked(apply_element(s, "-", BS2), "BS2-")
    raise ValueError(f"frame must be 'K+' or 'K-', got {frame!r}")


def collapse_after_detection(s: ModeState, detected: Union[ModeLabel, str]) -> ModeState:
    """Partner-particle state once ``detected`` has clicked, renormalized."""
    det = label(detected) if isinstance(detected, str) else detected
    if det.particle not in ("+", "-"):
        raise ValueError("can only condition on a positron or electron detection")
    partner: dict[Key, complex] = {}
    for key, amp in s.terms.items():
        if len(key) == 2 and det in key:
            other = key[1] if key[0] == det else key[0]
            partner[(other,)] = partner.get((other,), 0j) + amp
    p = sum(abs(a) ** 2 for a in partner.values())
    if p <= EPS_EQ:
        raise ValueError(f"detection at {det} has zero probability in this state")
    scale = 1.0 / math.sqrt(p)
    return ModeState({k: a * scale for k, a in partner.items()})


def projector_expectation(s: ModeState, key: Key) -> float:
    """<s|P|s> for the projector onto the single term ``key``."""
    return abs(s.amplitude(key)) ** 2


def projector_E_expectation(s: ModeState) -> float:
    """Expectation of E+E- = |e+ e-><e+ e-|."""
    return projector_expectation(s, term("e+", "e-"))


def equivalent_up_to_phase(u: ModeState, v: ModeState, tol: float = 1e-12) -> bool:
    """Same support, same moduli, and a single common phase ratio."""
    if set(u.terms) != set(v.terms):
        return False
    ratio = None
    for key, a in u.terms.items():
        b = v.terms[key]
        if abs(abs(a) - abs(b)) > tol:
            return False
        r = b / a
        r /= abs(r)
        if ratio is None:
            ratio = r
        elif abs(r - ratio) > tol:
            return False
    return True


# --- experiment files -------------------------------------------------------

class ExperimentFileError(ValueError):
    pass


_SETTING_RE = re.compile(r"^\s*(bs2_plus|bs2_minus)\s*=\s*(present|removed)\s*$")


def parse_experiment(text: str, source: str = "<experiment>") -> HardyConfig:
    """Parse ``bs2_plus = present|removed`` / ``bs2_minus = ...`` lines.

    Blank lines and ``#`` comments are ignored. Errors name the offending line.
    """
    values: dict[str, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _SETTING_RE.match(line)
        if not m:
            raise ExperimentFileError(f"{source}:{lineno}: cannot parse {raw.strip()!r}; "
                                      "expected 'bs2_plus = present|removed' or 'bs2_minus = present|removed'")
        key, val = m.groups()
        if key in values:
            raise ExperimentFileError(f"{source}:{lineno}: {key} given twice")
        values[key] = val == "present"
    missing = [k for k in ("bs2_plus", "bs2_minus") if k not in values]
    if missing:
        raise ExperimentFileError(f"{source}: missing setting(s) {', '.join(missing)}")
    return HardyConfig(values["bs2_plus"], values["bs2_minus"])


def read_experiment(path: Union[str, Path]) -> HardyConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ExperimentFileError(f"{p}: {exc.strerror or exc}") from exc
    return parse_experiment(text, str(p))


def format_experiment(config: HardyConfig) -> str:
    return f"bs2_plus = {_word(config.bs2_plus)}\nbs2_minus = {_word(config.bs2_minus)}\n"


# --- local realism bookkeeping ----------------------------------------------

@dataclass(frozen=True)
class RealismFact:
    key: str
    statement: str
    config: HardyConfig
    fraction: float
    conditional: float = 1.0


@dataclass(frozen=True)
class LocalRealismTable:
    facts: tuple[RealismFact, ...]
    n_consistent_assignments: int

    @property
    def inconsistent(self) -> bool:
        return self.n_consistent_assignments == 0

    @property
    def verdict(self) -> str:
        if self.inconsistent:
            return ("inconsistent: runs with G+(0) G-(0) = 1 force F+(inf) = F-(inf) = 1 "
                    "through the two one-splitter implications, contradicting F+(inf) F-(inf) = 0")
        return "consistent"


def _conditional(s: ModeState, given: ModeLabel, partner: ModeLabel) -> float:
    joint = sum(abs(a) ** 2 for k, a in s.terms.items() if given in k and partner in k)
    return joint / marginal_probability(s, given)


def _count_realist_assignments() -> int:
    """Count 0/1 assignments of G+(0), G-(0), F+(inf), F-(inf) meeting all four constraints."""
    n = 0
    for gp0, gm0, fpi, fmi in ((a, b, c, d) for a in (0, 1) for b in (0, 1) for c in (0, 1) for d in (0, 1)):
        ok_58 = fpi * fmi == 0
        ok_59 = (not gp0) or fmi == 1
        ok_510 = (not gm0) or fpi == 1
        ok_511 = gp0 * gm0 == 1
        n += ok_58 and ok_59 and ok_510 and ok_511
    return n


def local_realism_table() -> LocalRealismTable:
    """The four Hardy facts, with run fractions read off the propagated states.

    Assumes hidden-variable functions F(0), G(0) (splitter in place) and
    F(inf), G(inf) (splitter removed) per particle, each depending only on the
    local splitter.
    """
    both_removed = propagate_hardy(HardyConfig(False, False))
    plus_only = propagate_hardy(HardyConfig(True, False))
    minus_only = propagate_hardy(HardyConfig(False, True))
    both_present = propagate_hardy(HardyConfig(True, True))
    gp, gm, fp, fm = label("g+"), label("g-"), label("f+"), label("f-")

    facts = (
        RealismFact("no_ff", "F+(inf) F-(inf) = 0", HardyConfig(False, False),
                    detection_probability(both_removed, "f+f-"), 0.0),
        RealismFact("gplus_implies_fminus", "G+(0) = 1 implies F-(inf) = 1", HardyConfig(True, False),
                    detection_probability(plus_only, "g+f-"), _conditional(plus_only, gp, fm)),
        RealismFact("gminus_implies_fplus", "G-(0) = 1 implies F+(inf) = 1", HardyConfig(False, True),
                    detection_probability(minus_only, "f+g-"), _conditional(minus_only, gm, fp)),
        RealismFact("gg_both_present", "G+(0) G-(0) = 1 in some runs", HardyConfig(True, True),
                    detection_probability(both_present, "g+g-"), 1.0),
    )
    return LocalRealismTable(facts, _count_realist_assignments())


@dataclass(frozen=True)
class RealityValue:
    observable: str
    value: int
    frame: str


@dataclass(frozen=True)
class FrameRealityReport:
    values: tuple[RealityValue, ...]
    inferred_product: int

    @property
    def inconsistent(self) -> bool:
        product = next(v.value for v in self.values if v.observable == "E+E-")
        return product != self.inferred_product


def _certain_value(p: float, what: str) -> int:
    if abs(p - 1.0) <= EPS_EQ:
        return 1
    if abs(p) <= EPS_EQ:
        return 0
    raise ValueError(f"{what} is not predictable with certainty (p = {p!r})")


def frame_reality_report() -> FrameRealityReport:
    """Element-of-reality values assigned in frames K+, K- and the lab frame K0.

    In K+, a click at g+ leaves the electron on e- with certainty, so
    [E-] = 1; K- gives [E+] = 1 symmetrically. In K0 the state before the
    second splitters has no e+e- component, so [E+E-] = 0. Lorentz-invariant
    values would force [E+E-] = [E+][E-] = 1.
    """
    k_plus = collapse_after_detection(frame_intermediate("K+"), "g+")
    k_minus = collapse_after_detection(frame_intermediate("K-"), "g-")
    e_minus = _certain_value(projector_expectation(k_plus, term("e-")), "[E-] in K+")
    e_plus = _certain_value(projector_expectation(k_minus, term("e+")), "[E+] in K-")
    e_both = _certain_value(projector_E_expectation(propagate_to_psi()), "[E+E-] in K0")
    values = (
        RealityValue("E-", e_minus, "K+"),
        RealityValue("E+", e_plus, "K-"),
        RealityValue("E+E-", e_both, "K0"),
    )
    return FrameRealityReport(values, e_plus * e_minus)


# --- reference coefficients ---------------------------------------------------

_Q = 1 / (2 * math.sqrt(2))

# Expected output states; compare with equivalent_up_to_phase.
REFERENCE_STATES = {
    HardyConfig(True, True): from_named(
        {"gamma": -0.5, "f+f-": 0.75, "f+g-": -0.25j, "g+f-": -0.25j, "g+g-": 0.25}),
    HardyConfig(False, True): from_named(
        {"gamma": -0.5, "f+f-": _Q, "g+f-": -2j * _Q, "f+g-": -1j * _Q}),
    HardyConfig(True, False): from_named(
        {"gamma": -0.5, "f+f-": _Q, "f+g-": -2j * _Q, "g+f-": -1j * _Q}),
    HardyConfig(False, False): from_named(
        {"gamma": 0.5, "g+g-": 0.5, "g+f-": 0.5j, "f+g-": 0.5j}),
}

REFERENCE_FRAME_STATES = {
    "K+": from_named({"gamma": -0.5, "f+d-": -2j * _Q, "f+e-": _Q, "g+e-": -1j * _Q}),
    "K-": from_named({"gamma": -0.5, "d+f-": -2j * _Q, "e+f-": _Q, "e+g-": -1j * _Q}),
}
