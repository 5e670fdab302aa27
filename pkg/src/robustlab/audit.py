"""Empirical audits: Lipschitz ratios, faithfulness, monotonicity, convexity.

Each audit draws a deterministic batch of states from a seeded generator,
evaluates a measure on them, and returns a small report object with a
``passed`` flag plus enough detail to localize the first failure.  All
distances are trace norms of differences.  Measures returning infinity
are skipped and counted, never treated as violations.

Set ROBUSTLAB_THREADS=N to evaluate batches on a thread pool; results are
order-preserving, so reports are identical to the serial run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .config import TOLS, resolve
from .errors import ConfigurationError
from .engines import robustness_along_ray
from .free_sets import FreeSetOracle, sample_trace_ball
from .qstates import (
    BellDiagonalParams,
    DensityMatrix,
    bell_diagonal,
    bloch_decompose,
    random_density,
    random_unitary,
    trace_distance,
)

__all__ = [
    "AuditConfig",
    "LipschitzReport",
    "FaithfulnessReport",
    "MonotonicityReport",
    "ConvexityReport",
    "audit_lipschitz",
    "audit_faithfulness",
    "audit_monotonicity",
    "audit_convexity",
    "lipschitz_pairs",
    "ray_measure",
    "discord_filtered_measure",
    "discord_axis_endpoint_pairs",
    "channel_local_unitary",
    "channel_depolarizing",
    "channel_measure_prepare_b",
    "default_channels",
]

Measure = Callable[[DensityMatrix], float]
Channel = Callable[[DensityMatrix], DensityMatrix]


def _threads() -> int:
    try:
        return max(0, int(os.environ.get("ROBUSTLAB_THREADS", "0")))
    except ValueError:
        return 0


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class AuditConfig:
    """Batch size, seed and an optional override of the audit tolerance."""

    samples: int = 100
    seed: int = 0
    tolerance: Optional[float] = None
    dims: tuple[int, int] = (2, 2)
    sampler: str = "gaussian-purification"

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


# --- Lipschitz ---------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzReport:
    L_claimed: float
    pairs_tested: int
    max_ratio: float
    worst_pair: Optional[tuple]  # (regime, rho1, rho2, m1, m2, dist)
    violations: int
    infinite_skipped: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.pairs_tested > 0


def lipschitz_pairs(cfg: AuditConfig) -> list[tuple[str, DensityMatrix, DensityMatrix]]:
    """Deterministic pair batch in three regimes: independent draws,
    trace-ball neighbors at two scales, and boundary-straddling pairs
    (a rank-deficient state against its slightly smoothed version)."""
    rng = np.random.default_rng(cfg.seed)
    d = cfg.dim
    pairs: list[tuple[str, DensityMatrix, DensityMatrix]] = []
    for _ in range(cfg.samples):
        pairs.append(
            ("independent", random_density(d, seed=rng), random_density(d, seed=rng))
        )
    for eps in (1e-2, 1e-3):
        for _ in range(cfg.samples):
            center = random_density(d, seed=rng)
            pairs.append(
                (f"nearby[{eps:g}]", center, sample_trace_ball(center, eps, rng))
            )
    smooth = 5e-3
    for _ in range(cfg.samples):
        edge = random_density(d, rank=d - 1, seed=rng)
        inner = DensityMatrix(
            (1.0 - smooth) * edge.mat + smooth * np.eye(d) / d,
            edge.dims,
            validate=False,
        )
        pairs.append(("boundary-straddle", edge, inner))
    return pairs


def audit_lipschitz(
    measure: Measure,
    L: float,
    cfg: AuditConfig,
    pairs: Optional[Sequence[tuple[str, DensityMatrix, DensityMatrix]]] = None,
    distance: Callable[[DensityMatrix, DensityMatrix], float] = trace_distance,
) -> LipschitzReport:
    """Check |m(rho1) - m(rho2)| <= L * dist(rho1, rho2) over a pair batch.

    A pair counts as a violation when the ratio exceeds L by more than the
    relative slack; pairs with an infinite value on either side, or with
    negligible distance, are skipped and counted separately.
    """
    if pairs is None:
        pairs = lipschitz_pairs(cfg)
    slack = resolve(cfg.tolerance, TOLS.lipschitz_violation_slack)

    def one(item):
        _, r1, r2 = item
        return measure(r1), measure(r2), distance(r1, r2)

    rows = _pmap(one, pairs)
    tested = violations = skipped = 0
    max_ratio = 0.0
    worst = None
    for (regime, r1, r2), (m1, m2, dist) in zip(pairs, rows):
        if not (math.isfinite(m1) and math.isfinite(m2)) or dist <= TOLS.audit_zero:
            skipped += 1
            continue
        tested += 1
        ratio = abs(m1 - m2) / dist
        if ratio > max_ratio:
            max_ratio = ratio
            worst = (regime, r1, r2, m1, m2, dist)
        if ratio > L * (1.0 + slack):
            violations += 1
    return LipschitzReport(
        L_claimed=L,
        pairs_tested=tested,
        max_ratio=max_ratio,
        worst_pair=worst,
        violations=violations,
        infinite_skipped=skipped,
    )


def ray_measure(
    sigma: DensityMatrix,
    oracle: FreeSetOracle,
    s_max: float | None = None,
    tol: float | None = None,
) -> Measure:
    """Measure adapter: robustness along the ray toward a fixed noise state."""

    def m(rho: DensityMatrix) -> float:
        return robustness_along_ray(rho, sigma, oracle, s_max=s_max, tol=tol).value

    return m


def discord_filtered_measure(rho: DensityMatrix) -> float:
    """Middle singular value of the two-qubit correlation matrix.

    On Bell-diagonal states this is the exact discord robustness; on
    general states it is the value of the locally filtered state.
    """
    sv = np.linalg.svd(bloch_decompose(rho).T, compute_uv=False)
    return float(np.sort(sv)[1])


# --- faithfulness ------------------------------------------------------------


@dataclass(frozen=True)
class FaithfulnessReport:
    free_checked: int
    nonfree_checked: int
    free_nonzero: int  # free states with measure above the zero threshold
    nonfree_zero: int  # non-free states with measure at or below it
    worst_free_value: float

    @property
    def passed(self) -> bool:
        return self.free_nonzero == 0 and self.nonfree_zero == 0


def audit_faithfulness(
    measure: Measure, oracle: FreeSetOracle, cfg: AuditConfig
) -> FaithfulnessReport:
    """Check measure = 0 exactly on free samples and > 0 off the set."""
    if oracle.sampler is None:
        raise ConfigurationError(f"oracle {oracle.name!r} has no sampler to audit with")
    zero = resolve(cfg.tolerance, TOLS.audit_zero)
    rng = np.random.default_rng(cfg.seed)
    free = [oracle.sampler(rng) for _ in range(cfg.samples)]
    nonfree = []
    attempts = 0
    while len(nonfree) < cfg.samples and attempts < 100 * cfg.samples:
        attempts += 1
        rho = random_density(cfg.dim, seed=rng)
        if not oracle.member(rho):
            nonfree.append(rho)
    free_vals = _pmap(measure, free)
    nonfree_vals = _pmap(measure, nonfree)
    free_nonzero = sum(1 for v in free_vals if v > zero)
    nonfree_zero = sum(1 for v in nonfree_vals if v <= zero)
    return FaithfulnessReport(
        free_checked=len(free),
        nonfree_checked=len(nonfree),
        free_nonzero=free_nonzero,
        nonfree_zero=nonfree_zero,
        worst_free_value=max(free_vals, default=0.0),
    )


# --- monotonicity ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MonotonicityReport:
    channels: tuple[str, ...]
    checked: int
    violations: int
    per_channel: dict[str, int]
    worst_increase: float = 0.0
    infinite_skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.checked > 0


def channel_local_unitary(u_a: np.ndarray, u_b: np.ndarray) -> Channel:
    u = np.kron(u_a, u_b)

    def ch(rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(u @ rho.mat @ u.conj().T, rho.dims, validate=False)

    return ch


def channel_depolarizing(q: float) -> Channel:
    if not 0.0 <= q <= 1.0:
        raise ConfigurationError(f"depolarizing weight must be in [0, 1], got {q!r}")

    def ch(rho: DensityMatrix) -> DensityMatrix:
        d = rho.dim
        return DensityMatrix(
            (1.0 - q) * rho.mat + q * np.eye(d) / d, rho.dims, validate=False
        )

    return ch


def channel_measure_prepare_b(basis: Optional[np.ndarray] = None) -> Channel:
    """Projective measurement on side B followed by re-preparation in the
    same basis (columns of ``basis``; computational basis by default)."""

    def ch(rho: DensityMatrix) -> DensityMatrix:
        d_a, d_b = rho.dims
        v = np.eye(d_b, dtype=complex) if basis is None else np.asarray(basis)
        out = np.zeros_like(rho.mat)
        for j in range(d_b):
            proj = np.kron(np.eye(d_a), np.outer(v[:, j], v[:, j].conj()))
            out += proj @ rho.mat @ proj
        return DensityMatrix(out, rho.dims, validate=False)

    return ch


def default_channels(seed: int = 0) -> list[tuple[str, Channel]]:
    return [
        (
            "local-unitary",
            channel_local_unitary(random_unitary(2, seed), random_unitary(2, seed + 1)),
        ),
        ("depolarizing[0.3]", channel_depolarizing(0.3)),
        ("measure-prepare-B", channel_measure_prepare_b()),
    ]


def audit_monotonicity(
    measure: Measure,
    channels: Sequence[tuple[str, Channel]],
    oracle: FreeSetOracle,
    cfg: AuditConfig,
) -> MonotonicityReport:
    """Check measure(channel(rho)) <= measure(rho) for free-set-preserving
    channels.

    Each channel is first probed on free samples; one that maps a free
    state out of the set cannot certify anything about the measure and
    raises ConfigurationError instead of producing misleading counts.
    """
    if oracle.sampler is None:
        raise ConfigurationError(f"oracle {oracle.name!r} has no sampler to audit with")
    tol = resolve(cfg.tolerance, 2.0 * TOLS.ray_bisection)
    rng = np.random.default_rng(cfg.seed)
    probes = [oracle.sampler(rng) for _ in range(min(cfg.samples, 16))]
    for name, ch in channels:
        for p in probes:
            if not oracle.member(ch(p)):
                raise ConfigurationError(
                    f"channel {name!r} maps a free state out of {oracle.name!r}; "
                    f"monotonicity against it is not meaningful"
                )
    states = [random_density(cfg.dim, seed=rng) for _ in range(cfg.samples)]
    base_vals = _pmap(measure, states)
    checked = violations = skipped = 0
    worst = 0.0
    per_channel = {name: 0 for name, _ in channels}
    for name, ch in channels:
        out_vals = _pmap(measure, [ch(s) for s in states])
        for v0, v1 in zip(base_vals, out_vals):
            if not (math.isfinite(v0) and math.isfinite(v1)):
                skipped += 1
                continue
            checked += 1
            inc = v1 - v0
            worst = max(worst, inc)
            if inc > tol:
                violations += 1
                per_channel[name] += 1
    return MonotonicityReport(
        channels=tuple(name for name, _ in channels),
        checked=checked,
        violations=violations,
        per_channel=per_channel,
        worst_increase=worst,
        infinite_skipped=skipped,
    )


# --- convexity ---------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    checked: int
    violations: int
    worst_gap: float
    first_violation: Optional[tuple]  # (rho1, rho2, lam, lhs, rhs)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.checked > 0


def discord_axis_endpoint_pairs() -> list[tuple[DensityMatrix, DensityMatrix]]:
    """Pairs of zero-discord single-axis states whose mixtures carry two
    nonzero correlations; any faithful discord measure is non-convex here."""
    pairs = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        ci, cj = [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]
        ci[i] = 1.0
        cj[j] = 1.0
        pairs.append(
            (bell_diagonal(BellDiagonalParams(*ci)), bell_diagonal(BellDiagonalParams(*cj)))
        )
    return pairs


def audit_convexity(
    measure: Measure,
    cfg: AuditConfig,
    sampler: Optional[Callable[[np.random.Generator], DensityMatrix]] = None,
    extra_pairs: Sequence[tuple[DensityMatrix, DensityMatrix]] = (),
    lambdas: Sequence[float] = (0.25, 0.5, 0.75),
) -> ConvexityReport:
    """Check measure(lam*rho1 + (1-lam)*rho2) <= lam*m1 + (1-lam)*m2.

    ``extra_pairs`` are checked ahead of the random batch, so deliberate
    counterexample constructions appear in the report deterministically.
    """
    tol = resolve(cfg.tolerance, 2.0 * TOLS.ray_bisection)
    rng = np.random.default_rng(cfg.seed)
    draw = sampler if sampler is not None else (
        lambda g: random_density(cfg.dim, seed=g)
    )
    pairs = list(extra_pairs) + [
        (draw(rng), draw(rng)) for _ in range(cfg.samples)
    ]
    ends = _pmap(lambda p: (measure(p[0]), measure(p[1])), pairs)
    checked = violations = 0
    worst = -math.inf
    first = None
    for (r1, r2), (m1, m2) in zip(pairs, ends):
        if not (math.isfinite(m1) and math.isfinite(m2)):
            continue
        for lam in lambdas:
            mix = DensityMatrix(
                lam * r1.mat + (1.0 - lam) * r2.mat, r1.dims, validate=False
            )
            lhs = measure(mix)
            if not math.isfinite(lhs):
                continue
            checked += 1
            rhs = lam * m1 + (1.0 - lam) * m2
            gap = lhs - rhs
            worst = max(worst, gap)
            if gap > tol:
                violations += 1
                if first is None:
                    first = (r1, r2, lam, lhs, rhs)
    return ConvexityReport(
        checked=checked,
        violations=violations,
        worst_gap=worst,
        first_violation=first,
    )
