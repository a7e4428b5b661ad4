"""Bell and CHSH inequalities, and a Monte Carlo local-hidden-variable harness.

An :class:`LHVModel` draws hidden variables and maps (setting, lambda) to a
deterministic +/-1 outcome on each side. Sampling runs in fixed-size chunks;
chunk ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))``, so the result
is identical whether chunks run serially or across workers.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .correlations import quantum_correlation
from .linalg import EPS_EQ
from .states import Direction

DEFAULT_SAMPLES = 1_000_000
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    satisfied: bool
    margin: float

    @classmethod
    def from_sides(cls, lhs: float, rhs: float) -> "InequalityReport":
        margin = rhs - lhs
        return cls(lhs, rhs, margin >= -EPS_EQ, margin)


def _check_correlation(value: float, name: str) -> None:
    if not -1.0 - EPS_EQ <= value <= 1.0 + EPS_EQ:
        raise ValueError(f"{name}={value!r} is not a correlation in [-1, 1]")


def bell_check(p_ab: float, p_ac: float, p_bc: float) -> InequalityReport:
    """|P(a,b) - P(a,c)| <= 1 + P(b,c)."""
    for v, name in ((p_ab, "P_ab"), (p_ac, "P_ac"), (p_bc, "P_bc")):
        _check_correlation(v, name)
    return InequalityReport.from_sides(abs(p_ab - p_ac), 1.0 + p_bc)


def coplanar_settings(theta: float) -> tuple[Direction, Direction, Direction]:
    """Settings a, b, c in the xz-plane with angle(a,b) = angle(b,c) = theta."""
    return Direction.in_xz_plane(0.0), Direction.in_xz_plane(theta), Direction.in_xz_plane(2 * theta)


def sign_model_correlation(theta: float) -> float:
    """Exact correlation of :func:`builtin_sign_model` at angle ``theta`` between settings.

    For lambda uniform on the sphere, sign(a.l) and sign(b.l) disagree on a
    fraction theta/pi of the sphere (two lunes of dihedral angle theta), so
    E[sign(a.l) sign(b.l)] = 1 - 2 theta/pi and B = -sign flips the sign.
    """
    return -1.0 + 2.0 * theta / math.pi


@dataclass(frozen=True)
class ScanRow:
    theta: float
    lhs: float
    rhs: float
    violated: bool
    p_quantum: float
    p_sign_model: float


def bell_scan(theta_grid: Sequence[float]) -> list[ScanRow]:
    """Quantum Bell check on coplanar settings for each angle in [0, pi/2].

    Rows also carry the quantum correlation at ``theta`` and the sign-model
    value there, to expose the quantum/LHV gap.
    """
    rows = []
    for theta in theta_grid:
        if not -EPS_EQ <= theta <= math.pi / 2 + EPS_EQ:
            raise ValueError(f"scan angle {theta!r} outside [0, pi/2]")
        a, b, c = coplanar_settings(theta)
        p_ab, p_ac, p_bc = quantum_correlation(a, b), quantum_correlation(a, c), quantum_correlation(b, c)
        rep = bell_check(p_ab, p_ac, p_bc)
        rows.append(ScanRow(theta, rep.lhs, rep.rhs, not rep.satisfied, p_ab, sign_model_correlation(theta)))
    return rows


def scan_grid(steps: int = 181) -> list[float]:
    """Evenly spaced angles covering [0, pi/2] inclusive."""
    if steps < 1:
        raise ValueError("need at least one grid point")
    if steps == 1:
        return [0.0]
    return [k * (math.pi / 2) / (steps - 1) for k in range(steps)]


def chsh_value(p_ab: float, p_ab2: float, p_a2b: float, p_a2b2: float) -> float:
    """S = P(a,b) - P(a,b') + P(a',b) + P(a',b')."""
    for v, name in ((p_ab, "P_ab"), (p_ab2, "P_ab'"), (p_a2b, "P_a'b"), (p_a2b2, "P_a'b'")):
        _check_correlation(v, name)
    return p_ab - p_ab2 + p_a2b + p_a2b2


def chsh_combination(x: int, y: int, x2: int, y2: int) -> int:
    return x * y - x * y2 + x2 * y + x2 * y2


def chsh_identity_check() -> bool:
    """True iff xy - xy' + x'y + x'y' is +/-2 for all 16 sign assignments."""
    return all(abs(chsh_combination(*signs)) == 2 for signs in itertools.product((1, -1), repeat=4))


@dataclass(frozen=True)
class ChshSettings:
    a: Direction
    a2: Direction
    b: Direction
    b2: Direction


def chsh_settings_from_angles(a: float, a2: float, b: float, b2: float) -> ChshSettings:
    """Coplanar settings from in-plane angles (radians)."""
    return ChshSettings(*(Direction.in_xz_plane(t) for t in (a, a2, b, b2)))


def fan_chsh_settings() -> ChshSettings:
    """b', a', b, a fanned counterclockwise at successive pi/4 steps."""
    q = math.pi / 4
    return chsh_settings_from_angles(3 * q, q, 2 * q, 0.0)


def quantum_chsh(settings: ChshSettings) -> tuple[float, tuple[float, float, float, float]]:
    s = settings
    ps = (
        quantum_correlation(s.a, s.b),
        quantum_correlation(s.a, s.b2),
        quantum_correlation(s.a2, s.b),
        quantum_correlation(s.a2, s.b2),
    )
    return chsh_value(*ps), ps


# --- local hidden variables -------------------------------------------------

Sampler = Callable[[np.random.Generator, int], np.ndarray]
Response = Callable[[Direction, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LHVModel:
    """Hidden-variable sampler plus deterministic +/-1 responses.

    ``sample_lambda(rng, n)`` returns ``n`` hidden-variable values stacked on
    axis 0; ``response_a(direction, lambdas)`` and ``response_b`` map them to
    arrays of +/-1. The harness never inspects lambda itself.
    """

    name: str
    sample_lambda: Sampler
    response_a: Response
    response_b: Response


def _uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _sign(x: np.ndarray) -> np.ndarray:
    # ties (measure zero) go to +1
    return np.where(x >= 0.0, 1, -1).astype(np.int8)


def builtin_sign_model() -> LHVModel:
    """lambda uniform on the sphere, A = sign(a.l), B = -sign(b.l)."""
    return LHVModel(
        name="sign",
        sample_lambda=_uniform_sphere,
        response_a=lambda d, lam: _sign(lam @ d.vector),
        response_b=lambda d, lam: -_sign(lam @ d.vector),
    )


MODELS = {"sign": builtin_sign_model}


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    standard_error: float
    n_samples: int
    seed: int


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _chunk_sizes(n: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _product_sums(model: LHVModel, pairs: Sequence[tuple[Direction, Direction]], n: int, seed: int,
                  workers: int, chunk_size: int) -> np.ndarray:
    """Integer sums of A(a; l) B(b; l) per setting pair, same lambdas for every pair."""
    sizes = _chunk_sizes(n, chunk_size)

    def run(index: int) -> np.ndarray:
        lam = model.sample_lambda(_chunk_rng(seed, index), sizes[index])
        out = np.empty(len(pairs), dtype=np.int64)
        for k, (a, b) in enumerate(pairs):
            out[k] = int(np.sum(model.response_a(a, lam).astype(np.int64) * model.response_b(b, lam)))
        return out

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    # integer sums merge exactly in any order
    return np.sum(parts, axis=0)


def _estimate(total: int, n: int, seed: int) -> CorrelationEstimate:
    mean = total / n
    if n > 1:
        # products are +/-1, so the sample variance is n/(n-1) (1 - mean^2)
        var = max(0.0, (1.0 - mean * mean) * n / (n - 1))
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return CorrelationEstimate(mean, se, n, seed)


def lhv_correlations(model: LHVModel, pairs: Sequence[tuple[Direction, Direction]], n: int = DEFAULT_SAMPLES,
                     seed: int = 0, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> list[CorrelationEstimate]:
    """Estimate several correlations from one shared draw of ``n`` hidden variables."""
    if n < 1:
        raise ValueError("need at least one sample")
    sums = _product_sums(model, pairs, n, seed, workers, chunk_size)
    return [_estimate(int(s), n, seed) for s in sums]


def lhv_correlation(model: LHVModel, a: Direction, b: Direction, n: int = DEFAULT_SAMPLES, seed: int = 0,
                    workers: int = 1, chunk_size: int = CHUNK_SIZE) -> CorrelationEstimate:
    """Monte Carlo estimate of the model's correlation (1/n) sum A(a; l_i) B(b; l_i)."""
    return lhv_correlations(model, [(a, b)], n, seed, workers, chunk_size)[0]


def combined_error(*errors: float) -> float:
    return math.sqrt(sum(e * e for e in errors))


@dataclass(frozen=True)
class LhvInequalityResult:
    report: InequalityReport
    estimates: tuple[CorrelationEstimate, ...]
    standard_error: float
    value: float = float("nan")

    def within(self, n_sigma: float = 4.0) -> bool:
        return self.report.margin >= -n_sigma * self.standard_error - EPS_EQ


def lhv_bell(model: LHVModel, theta: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
             workers: int = 1) -> LhvInequalityResult:
    """Bell check of the model on the coplanar settings at ``theta``."""
    a, b, c = coplanar_settings(theta)
    est = lhv_correlations(model, [(a, b), (a, c), (b, c)], n, seed, workers)
    rep = bell_check(est[0].mean, est[1].mean, est[2].mean)
    return LhvInequalityResult(rep, tuple(est), combined_error(*(e.standard_error for e in est)))


def lhv_chsh(model: LHVModel, settings: ChshSettings, n: int = DEFAULT_SAMPLES, seed: int = 0,
             workers: int = 1) -> LhvInequalityResult:
    """CHSH value of the model; the report encodes |S| <= 2."""
    s = settings
    est = lhv_correlations(model, [(s.a, s.b), (s.a, s.b2), (s.a2, s.b), (s.a2, s.b2)], n, seed, workers)
    value = chsh_value(*(e.mean for e in est))
    rep = InequalityReport.from_sides(abs(value), 2.0)
    return LhvInequalityResult(rep, tuple(est), combined_error(*(e.standard_error for e in est)), value)
