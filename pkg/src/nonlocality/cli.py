"""Command-line front end: every verification as a subcommand.

Each subcommand builds a :class:`CommandResult` of ``(name, value,
paper_anchor)`` rows and emits it as an aligned table, CSV, or JSON. Exit
status is 0 when the command's checks pass, 1 when a check fails or the
output cannot be written, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import bell, correlations, density, ghz, interferometer
from .correlations import PHOTON_CHANNELS
from .interferometer import HardyConfig
from .linalg import EPS_EQ
from .states import Direction

FORMATS = ("table", "csv", "json")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Row:
    name: str
    value: float
    paper_anchor: str
    note: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"row {self.name!r} has non-finite value {self.value!r}")


@dataclass(frozen=True)
class CommandResult:
    command: str
    rows: tuple[Row, ...]
    passed: Optional[bool] = None
    summary: str = ""

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "rows": [
                {"name": r.name, "value": r.value, "paper_anchor": r.paper_anchor, "note": r.note}
                for r in self.rows
            ],
            "pass": self.passed,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CommandResult":
        return cls(
            command=data["command"],
            rows=tuple(Row(r["name"], r["value"], r["paper_anchor"], r.get("note", "")) for r in data["rows"]),
            passed=data.get("pass"),
            summary=data.get("summary", ""),
        )

    @property
    def exit_status(self) -> int:
        return 1 if self.passed is False else 0


def format_value(value: float, digits: Optional[int] = None) -> str:
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return str(value)
    return "%.*g" % (17 if digits is None else digits, value)


def render(result: CommandResult, fmt: str, digits: Optional[int] = None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value", "paper_anchor"])
        for r in result.rows:
            writer.writerow([r.name, format_value(r.value, digits), r.paper_anchor])
        return buf.getvalue()
    if fmt == "json":
        data = result.to_dict()
        if digits is not None:
            for r in data["rows"]:
                r["value"] = float(format_value(r["value"], digits))
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if fmt == "table":
        header = ("name", "value", "paper_anchor", "note")
        body = [(r.name, format_value(r.value, digits), r.paper_anchor, r.note) for r in result.rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(header)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(header, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        for b in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)).rstrip())
        status = {True: "PASS", False: "FAIL", None: "-"}[result.passed]
        lines.append(f"[{result.command}] {status}" + (f": {result.summary}" if result.summary else ""))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(result: CommandResult, fmt: str = "table", destination: Optional[str | Path | TextIO] = None,
         digits: Optional[int] = None) -> None:
    """Write ``result`` to a stream, a file path, or stdout."""
    text = render(result, fmt, digits)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def parse_json(text: str) -> CommandResult:
    return CommandResult.from_dict(json.loads(text))


# --- subcommands --------------------------------------------------------------

def _angle(args, value: float) -> float:
    return math.radians(value) if args.degrees else value


def _direction(args, theta: float, phi: float) -> Direction:
    try:
        return Direction(_angle(args, theta), _angle(args, phi))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _flag(ok: bool) -> int:
    return 1 if ok else 0


def cmd_singlet_prob(args) -> CommandResult:
    a = _direction(args, args.theta_a, args.phi_a)
    b = _direction(args, args.theta_b, args.phi_b)
    closed = correlations.singlet_joint_probability(a, b)
    outcomes = correlations.singlet_outcomes(a, b)
    direct = outcomes[0].probability
    rows = [Row("p(+a,+b)", closed, "Eq 2.7", "closed form")]
    names = {(1, 1): "p(+a,+b)_direct", (1, -1): "p(+a,-b)", (-1, 1): "p(-a,+b)", (-1, -1): "p(-a,-b)"}
    rows += [Row(names[o.sign1, o.sign2], o.probability, "Eq 2.6", "direct contraction") for o in outcomes]
    total = sum(o.probability for o in outcomes)
    rows.append(Row("sum", total, "Eq 2.7", "four outcomes"))
    ok = abs(closed - direct) <= EPS_EQ and abs(total - 1.0) <= EPS_EQ
    return CommandResult("singlet-prob", tuple(rows), ok, "closed form and direct contraction agree" if ok else
                         "closed form and direct contraction disagree")


def cmd_photon_prob(args) -> CommandResult:
    t1, t2 = _angle(args, args.theta1), _angle(args, args.theta2)
    rows, ok, total = [], True, 0.0
    for ch in PHOTON_CHANNELS:
        p = correlations.photon_joint_probability(args.kind, ch, t1, t2)
        direct = abs(correlations.photon_amplitude_direct(args.kind, ch, t1, t2)) ** 2
        ok &= abs(p - direct) <= EPS_EQ
        total += p
        sine_like = (ch.channel1 is ch.channel2) == (args.kind == "I")
        rows.append(Row(f"p({ch.label})", p, "Eq 2.35a" if sine_like else "Eq 2.35b",
                        "channels o=ordinary e=extraordinary"))
    rows.append(Row("sum", total, "Eq 2.36'"))
    ok &= abs(total - 1.0) <= EPS_EQ
    return CommandResult("photon-prob", tuple(rows), ok)


def cmd_correlation(args) -> CommandResult:
    a = _direction(args, args.theta_a, args.phi_a)
    b = _direction(args, args.theta_b, args.phi_b)
    p = correlations.quantum_correlation(a, b)
    closed = correlations.quantum_correlation_closed_form(a, b)
    rows = [Row("P(a,b)", p, "Eq 3.3", "outcome sum P++ + P-- - P+- - P-+"),
            Row("-a.b", closed, "Eq 3.3", "closed form")]
    for o in correlations.singlet_outcomes(a, b):
        rows.append(Row(f"P{'+' if o.sign1 > 0 else '-'}{'+' if o.sign2 > 0 else '-'}", o.probability, "Appendix"))
    ok = abs(p - closed) <= EPS_EQ
    return CommandResult("correlation", tuple(rows), ok)


def cmd_bell_scan(args) -> CommandResult:
    steps = 181 if args.config == "paper" else args.steps
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    grid = bell.scan_grid(steps)
    rows, ok = [], True
    for r in bell.bell_scan(grid):
        interior = EPS_EQ < r.theta < math.pi / 2 - EPS_EQ
        ok &= r.violated == interior
        note = (f"{'violated' if r.violated else 'satisfied'}; lhs={r.lhs:.6f} rhs={r.rhs:.6f}; "
                f"P_quantum={r.p_quantum:.6f} P_sign_model={r.p_sign_model:.6f}")
        rows.append(Row(f"theta={r.theta:.17g}", r.rhs - r.lhs, "Eq 3.4", note))
    n_viol = sum("violated" in r.note.split(";")[0] for r in rows)
    return CommandResult("bell-scan", tuple(rows), ok,
                         f"{n_viol} of {len(rows)} angles violate the Bell inequality (margin = rhs - lhs)")


def cmd_chsh(args) -> CommandResult:
    if args.angles is not None:
        settings = bell.chsh_settings_from_angles(*(_angle(args, t) for t in args.angles))
        expect_violation = None
    else:
        settings = bell.fan_chsh_settings()
        expect_violation = True
    s, ps = bell.quantum_chsh(settings)
    violates = abs(s) > 2.0 + EPS_EQ
    identity = bell.chsh_identity_check()
    rows = [
        Row("P(a,b)", ps[0], "Eq 3.3"),
        Row("P(a,b')", ps[1], "Eq 3.3"),
        Row("P(a',b)", ps[2], "Eq 3.3"),
        Row("P(a',b')", ps[3], "Eq 3.3"),
        Row("S", s, "Eq 3.7", "violates |S| <= 2" if violates else "within |S| <= 2"),
        Row("violates_chsh_bound", _flag(violates), "Eq 3.7"),
        Row("identity_cases_equal_pm2", sum(abs(bell.chsh_combination(*c)) == 2 for c in _sign_quads()), "Eq 3.6"),
    ]
    ok = identity and (expect_violation is None or violates == expect_violation)
    summary = f"S = {s:.17g}, " + ("violates |S| <= 2" if violates else "satisfies |S| <= 2")
    return CommandResult("chsh", tuple(rows), ok, summary)


def _sign_quads():
    return list(itertools.product((1, -1), repeat=4))


def cmd_lhv_sim(args) -> CommandResult:
    if args.n < 1:
        raise UsageError("--n must be positive")
    model = bell.MODELS[args.model]()
    theta = _angle(args, args.theta)
    if not 0.0 <= theta <= math.pi / 2:
        raise UsageError("--theta must lie in [0, pi/2]")
    a, b, _ = bell.coplanar_settings(theta)
    est = bell.lhv_correlation(model, a, b, args.n, args.seed, args.workers)
    bell_res = bell.lhv_bell(model, theta, args.n, args.seed, args.workers)
    chsh_res = bell.lhv_chsh(model, bell.fan_chsh_settings(), args.n, args.seed, args.workers)
    rows = [
        Row("P_lhv(theta)", est.mean, "Eq 3.1", f"n={args.n} seed={args.seed}"),
        Row("standard_error", est.standard_error, "Eq 3.1"),
        Row("P_sign_closed_form", bell.sign_model_correlation(theta), "Eq 3.1", "-1 + 2 theta/pi"),
        Row("P_quantum", correlations.quantum_correlation(a, b), "Eq 3.3"),
        Row("bell_margin", bell_res.report.margin, "Eq 3.2", "rhs - lhs on coplanar a, b, c"),
        Row("bell_standard_error", bell_res.standard_error, "Eq 3.2"),
        Row("chsh_S", chsh_res.value, "Eq 3.7", "pi/4 fan"),
        Row("chsh_standard_error", chsh_res.standard_error, "Eq 3.7"),
    ]
    ok = bell_res.within(4.0) and chsh_res.within(4.0)
    return CommandResult("lhv-sim", tuple(rows), ok,
                         "local model satisfies Bell and CHSH within 4 standard errors" if ok else
                         "local model outside the classical bounds")


def cmd_no_signaling(args) -> CommandResult:
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    diffs = density.no_signaling_sweep(args.seeds)
    worst = max(diffs)
    rows = [Row("n_seeds", args.seeds, "Eq 2.25"), Row("max_abs_difference", worst, "Eq 2.27"),
            Row("mean_abs_difference", sum(diffs) / len(diffs), "Eq 2.27")]
    ok = worst <= 1e-12
    return CommandResult("no-signaling", tuple(rows), ok,
                         "remote expectation unchanged by the measurement at A" if ok else "signaling detected")


_ALGEBRA_ANCHORS = {"hermitian": "Eq 4.3", "]=0": "Eq 4.4", "^2=I": "Eq 4.5", "D=-ABC": "Eq 4.10"}


def cmd_ghz_verify(args) -> CommandResult:
    rows = []
    alg = ghz.verify_algebra()
    for name, ok in alg.checks.items():
        anchor = next(v for k, v in _ALGEBRA_ANCHORS.items() if k in name)
        rows.append(Row(name, _flag(ok), anchor))
    psi = ghz.ghz_state()
    eig_ok = True
    for op, want, anchor in zip(ghz.build_operators(), (1, 1, 1, -1), ("Eq 4.7",) * 3 + ("Eq 4.11",)):
        c = ghz.eigenvalue_check(op, psi)
        eig_ok &= c == want
        rows.append(Row(f"{op.name}_eigenvalue", c if c is not None else 0, anchor))
    rep = ghz.realism_contradiction_report()
    rows += [
        Row("assignments_total", rep.n_assignments, "Eq 4.8"),
        Row("assignments_satisfying_ABC", len(rep.surviving), "Eq 4.8"),
        Row("realist_D_product", min(rep.realist_d_values), "Eq 4.8",
            "same value for every surviving assignment" if len(rep.realist_d_values) == 1 else "varies"),
        Row("quantum_D_eigenvalue", rep.quantum_d_value, "Eq 4.11"),
        Row("assignments_matching_quantum", rep.n_matching_quantum, "Eq 4.11"),
    ]
    ok = alg.all_pass and eig_ok and rep.contradiction and len(rep.surviving) == 8
    return CommandResult("ghz-verify", tuple(rows), ok,
                         "local realism predicts D = +1, quantum mechanics gives -1" if ok else "check failed")


def cmd_boxes(args) -> CommandResult:
    r = ghz.boxes_analysis()
    anchor = "Sec 4 Einstein boxes"
    rows = [Row("p(A)", r.p_a, anchor), Row("p(B)", r.p_b, anchor),
            Row("p(-A|B)", r.p_not_a_given_b, anchor), Row("p(A|-B)", r.p_a_given_not_b, anchor),
            Row("purity", r.purity, anchor), Row("decohered_purity", r.decohered_purity, anchor)]
    ok = (abs(r.p_a - 0.5) <= EPS_EQ and abs(r.p_b - 0.5) <= EPS_EQ
          and abs(r.p_not_a_given_b - 1) <= EPS_EQ and abs(r.p_a_given_not_b - 1) <= EPS_EQ)
    return CommandResult("boxes", tuple(rows), ok)


_HARDY_ANCHORS = {
    HardyConfig(True, True): "Eq 5.4",
    HardyConfig(False, True): "Eq 5.5",
    HardyConfig(True, False): "Eq 5.6",
    HardyConfig(False, False): "Eq 5.7",
}
_FACT_ANCHORS = {"no_ff": "Eq 5.8", "gplus_implies_fminus": "Eq 5.9",
                 "gminus_implies_fplus": "Eq 5.10", "gg_both_present": "Eq 5.11"}


def _presence(text: str) -> bool:
    return text == "present"


def cmd_hardy(args) -> CommandResult:
    if args.experiment is not None:
        if args.bs2_plus is not None or args.bs2_minus is not None:
            raise UsageError("--experiment cannot be combined with --bs2-plus/--bs2-minus")
        try:
            config = interferometer.read_experiment(args.experiment)
        except interferometer.ExperimentFileError as exc:
            raise UsageError(str(exc)) from exc
    else:
        config = HardyConfig(_presence(args.bs2_plus or "present"), _presence(args.bs2_minus or "present"))
    s = interferometer.propagate_hardy(config)
    anchor = _HARDY_ANCHORS[config]
    rows = [Row(interferometer.term_name(k), abs(a) ** 2, anchor, f"amplitude {a.real:+.6f}{a.imag:+.6f}i")
            for k, a in s.terms.items()]
    norm_ok = abs(s.norm2 - 1.0) <= EPS_EQ
    matches = interferometer.equivalent_up_to_phase(s, interferometer.REFERENCE_STATES[config])
    rows += [Row("norm", s.norm2, anchor), Row("matches_reference_up_to_phase", _flag(matches), anchor)]
    table = interferometer.local_realism_table()
    for fact in table.facts:
        rows.append(Row(f"fraction[{fact.key}]", fact.fraction, _FACT_ANCHORS[fact.key],
                        f"{fact.statement} ({fact.config.label})"))
    rows.append(Row("local_realism_inconsistent", _flag(table.inconsistent), "Sec 5.2.2", table.verdict))
    ok = norm_ok and matches and table.inconsistent
    return CommandResult("hardy", tuple(rows), ok, config.label)


def cmd_hardy_frames(args) -> CommandResult:
    k_plus = interferometer.frame_intermediate("K+")
    k_minus = interferometer.frame_intermediate("K-")
    ref = interferometer.REFERENCE_FRAME_STATES
    m_plus = interferometer.equivalent_up_to_phase(k_plus, ref["K+"])
    m_minus = interferometer.equivalent_up_to_phase(k_minus, ref["K-"])
    rep = interferometer.frame_reality_report()
    anchors = {"K+": "Eq 5.19", "K-": "Eq 5.20", "K0": "Eq 5.22"}
    rows = [Row("K+_state_matches_reference", _flag(m_plus), "Eq 5.17"),
            Row("K-_state_matches_reference", _flag(m_minus), "Eq 5.18")]
    rows += [Row(f"[{v.observable}]_{v.frame}", v.value, anchors[v.frame]) for v in rep.values]
    rows += [
        Row("<E+E->_psi", interferometer.projector_E_expectation(interferometer.propagate_to_psi()), "Eq 5.21"),
        Row("[E+][E-]_inferred", rep.inferred_product, "Eq 5.16"),
        Row("frames_inconsistent", _flag(rep.inconsistent), "Eq 5.16"),
    ]
    ok = m_plus and m_minus and rep.inconsistent
    return CommandResult("hardy-frames", tuple(rows), ok,
                         "element-of-reality values disagree across frames" if rep.inconsistent else "consistent")


def cmd_mz(args) -> CommandResult:
    present = _presence(args.bs2)
    s = interferometer.propagate_single_mz(present)
    anchor = "Eq 5.1" if present else "Eq 5.2"
    pf = interferometer.detection_probability(s, "f")
    pg = interferometer.detection_probability(s, "g")
    rows = [Row("P(F)", pf, anchor), Row("P(G)", pg, anchor)]
    want = (1.0, 0.0) if present else (0.5, 0.5)
    ok = abs(pf - want[0]) <= EPS_EQ and abs(pg - want[1]) <= EPS_EQ
    return CommandResult("mz", tuple(rows), ok, f"BS2 {args.bs2}")


# --- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table", help="output format (default: table)")
    common.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    common.add_argument("--digits", type=int, metavar="N", help="significant digits for values (default: 17)")
    common.add_argument("--degrees", action="store_true", help="read angles in degrees instead of radians")

    parser = _Parser(prog="nonlocality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def two_directions(p):
        for flag in ("--theta-a", "--phi-a", "--theta-b", "--phi-b"):
            p.add_argument(flag, type=float, default=0.0)

    two_directions(add("singlet-prob", cmd_singlet_prob, "singlet joint probability for two spin settings"))

    p = add("photon-prob", cmd_photon_prob, "photon-pair channel probabilities")
    p.add_argument("--kind", choices=("I", "II"), required=True)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)

    two_directions(add("correlation", cmd_correlation, "singlet spin correlation P(a, b)"))

    p = add("bell-scan", cmd_bell_scan, "quantum Bell check over coplanar angles in [0, pi/2]")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--steps", type=int, default=181)
    g.add_argument("--config", choices=("paper",))

    p = add("chsh", cmd_chsh, "quantum CHSH value")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config", choices=("paper",), default="paper")
    g.add_argument("--angles", type=float, nargs=4, metavar=("A", "A2", "B", "B2"),
                   help="in-plane angles of a, a', b, b'")

    p = add("lhv-sim", cmd_lhv_sim, "Monte Carlo local-hidden-variable correlations")
    p.add_argument("--model", choices=sorted(bell.MODELS), default="sign")
    p.add_argument("--n", type=int, default=bell.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--workers", type=int, default=1)

    p = add("no-signaling", cmd_no_signaling, "remote expectation with and without a local measurement")
    p.add_argument("--seeds", type=int, default=100)

    add("ghz-verify", cmd_ghz_verify, "GHZ operator algebra and the realism contradiction")
    add("boxes", cmd_boxes, "Einstein boxes probabilities")

    p = add("hardy", cmd_hardy, "Hardy double interferometer in one splitter configuration")
    p.add_argument("--experiment", metavar="FILE", help="file with bs2_plus/bs2_minus lines")
    p.add_argument("--bs2-plus", choices=("present", "removed"))
    p.add_argument("--bs2-minus", choices=("present", "removed"))

    add("hardy-frames", cmd_hardy_frames, "frame-ordered states and element-of-reality values")

    p = add("mz", cmd_mz, "single Mach-Zehnder interferometer")
    p.add_argument("--bs2", choices=("present", "removed"), default="present")
    return parser


def run(argv: Sequence[str]) -> tuple[CommandResult, argparse.Namespace]:
    """Parse ``argv`` and run the subcommand; argparse exits with 2 on bad usage."""
    args = build_parser().parse_args(list(argv))
    return args.func(args), args


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        result, args = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"nonlocality: error: {exc}", file=sys.stderr)
        return 2
    try:
        emit(result, args.format, args.output, args.digits)
    except OSError as exc:
        print(f"nonlocality: cannot write output: {exc}", file=sys.stderr)
        return 1
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
