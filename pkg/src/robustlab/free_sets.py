"""Membership oracles for the free sets the robustness engines run against.

Each oracle bundles a name, a boolean membership test, an optional star
center (a state from which mixing toward any member stays in the set), the
radius ``kappa`` of a known free ball around that center when one exists,
and a sampler of members used by probes and audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import TOLS, resolve
from .errors import ConfigurationError, ValidationError
from .operator_core import partial_transpose, trace_norm
from .qstates import (
    BellDiagonalParams,
    DensityMatrix,
    bell_diagonal,
    bell_state_vectors,
    bloch_decompose,
    maximally_mixed,
    random_density,
    random_unitary,
    trace_distance,
)

__all__ = [
    "FreeSetOracle",
    "StarConvexityReport",
    "is_ppt",
    "discord_defect",
    "has_zero_discord",
    "separable_ball_radius",
    "gurvits_ball_contains",
    "teleportation_ball_radius",
    "singlet_fraction",
    "is_unfaithful",
    "bds_params_of",
    "ppt_oracle",
    "zero_discord_oracle",
    "unfaithful_oracle",
    "bds_axes_oracle",
    "oracle_by_name",
    "star_convexity_probe",
    "sample_trace_ball",
    "random_quantum_classical",
]


@dataclass(frozen=True)
class FreeSetOracle:
    """A named free set: membership test plus optional geometry metadata."""

    name: str
    member: Callable[[DensityMatrix], bool]
    star_center: Optional[DensityMatrix] = None
    kappa: Optional[float] = None
    sampler: Optional[Callable[[np.random.Generator], DensityMatrix]] = None

    def __post_init__(self):
        if self.star_center is not None and not self.member(self.star_center):
            raise ConfigurationError(
                f"star center of oracle {self.name!r} is not a member of the set"
            )


def is_ppt(rho: DensityMatrix, tol: float | None = None) -> bool:
    """Positive partial transpose test (separability for two qubits)."""
    if len(rho.dims) != 2:
        raise ValidationError(f"PPT needs a bipartite state, got dims {rho.dims}")
    tol = resolve(tol, TOLS.ppt)
    pt = partial_transpose(rho.mat, rho.dims, 1)
    return float(np.linalg.eigvalsh(pt)[0]) >= -tol


def discord_defect(rho: DensityMatrix) -> float:
    """Zero-discord defect |y|^2 + |T|_F^2 - lambda_max(y y^T + T^T T).

    Vanishes exactly on the quantum-classical states
    sum_i p_i rho_i x |psi_i><psi_i| (orthonormal psi_i on side B, where
    the measurement acts) and is strictly positive otherwise.  Structurally
    >= 0 up to rounding, and invariant under local unitaries on either side.
    """
    b = bloch_decompose(rho)
    gram = np.outer(b.y, b.y) + b.T.T @ b.T
    k_max = float(np.linalg.eigvalsh(gram)[-1])
    return float(b.y @ b.y + np.sum(b.T * b.T) - k_max)


def has_zero_discord(rho: DensityMatrix, tol: float | None = None) -> bool:
    return discord_defect(rho) <= resolve(tol, TOLS.discord_membership)


def separable_ball_radius(d_a: int = 2, d_b: int = 2) -> float:
    """Trace-norm radius of the Gurvits ball of separable states around 1/D."""
    d = int(d_a) * int(d_b)
    return 1.0 / math.sqrt(d * (d - 1))


def gurvits_ball_contains(rho: DensityMatrix) -> bool:
    """Whether rho lies in the separable ball around the maximally mixed state."""
    if len(rho.dims) != 2:
        raise ValidationError(f"need a bipartite state, got dims {rho.dims}")
    center = maximally_mixed(rho.dims)
    return trace_distance(rho, center) <= separable_ball_radius(*rho.dims)


def teleportation_ball_radius(d: int = 2) -> float:
    """Trace-norm radius (d-1)/d^2 of the teleportation-unfaithful ball around 1/d^2."""
    d = int(d)
    return (d - 1) / float(d * d)


def bds_params_of(
    rho: DensityMatrix, tol: float | None = None
) -> BellDiagonalParams | None:
    """Return the (c1, c2, c3) triple if rho is Bell diagonal, else None."""
    if rho.dims != (2, 2):
        return None
    tol = resolve(tol, TOLS.bds_detect)
    b = bloch_decompose(rho)
    off = b.T - np.diag(np.diagonal(b.T))
    if max(np.max(np.abs(b.x)), np.max(np.abs(b.y)), np.max(np.abs(off))) > tol:
        return None
    return BellDiagonalParams(b.T[0, 0], b.T[1, 1], b.T[2, 2])


# --- maximal Bell-state overlap ---------------------------------------------

_PHI_PLUS = bell_state_vectors()[0]


def _overlap(rho_mat: np.ndarray, angles: np.ndarray) -> float:
    """<phi+| (U x V)^dag rho (U x V) |phi+> for ZYZ Euler angles (3 + 3)."""
    ua, ub, uc, va, vb, vc = angles
    u = _euler(ua, ub, uc)
    v = _euler(va, vb, vc)
    # (U x V)|phi+> = vec(U V^T)/sqrt2 in row-major ordering
    w = (u @ v.T).reshape(4) / math.sqrt(2.0)
    return float(np.real(w.conj() @ rho_mat @ w))


def _euler(a: float, b: float, c: float) -> np.ndarray:
    cb, sb = math.cos(b / 2.0), math.sin(b / 2.0)
    rz1 = np.array([np.exp(-0.5j * a), np.exp(0.5j * a)])
    rz2 = np.array([np.exp(-0.5j * c), np.exp(0.5j * c)])
    ry = np.array([[cb, -sb], [sb, cb]], dtype=complex)
    return (rz1[:, None] * ry) * rz2[None, :]


# Euler triples whose single-qubit unitaries are 1, sx, sy, sz (up to phase);
# applied on side A they map |phi+> onto each Bell state, so for Bell-diagonal
# inputs the structured starts already sit on the exact optima.
_STRUCTURED_STARTS = (
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    (-math.pi / 2, math.pi, math.pi / 2, 0.0, 0.0, 0.0),
    (0.0, math.pi, 0.0, 0.0, 0.0, 0.0),
    (math.pi, 0.0, 0.0, 0.0, 0.0, 0.0),
)


def singlet_fraction(
    rho: DensityMatrix, restarts: int = 12, seed: int = 0
) -> float:
    """Maximal overlap with a maximally entangled state, by local rotations.

    Multi-start local optimization over the 3 + 3 Euler angles of U x V.
    The result is a certified lower bound on the true maximum that is
    monotone in ``restarts`` (random starts are drawn as a deterministic
    stream, and four structured starts covering the Bell basis are always
    included).  Exact for Bell-diagonal inputs up to optimizer precision.
    """
    from scipy.optimize import minimize

    if rho.dims != (2, 2):
        raise ValidationError(f"singlet fraction implemented for dims (2, 2) only")
    m = rho.mat
    rng = np.random.default_rng(seed)
    starts = [np.array(s) for s in _STRUCTURED_STARTS]
    starts += [rng.uniform(0.0, 2.0 * math.pi, size=6) for _ in range(max(0, restarts))]
    best = -np.inf
    for s0 in starts:
        res = minimize(
            lambda ang: -_overlap(m, ang),
            s0,
            method="L-BFGS-B",
            options={"maxiter": 120},
        )
        best = max(best, -float(res.fun), _overlap(m, s0))
    return best


def is_unfaithful(
    rho: DensityMatrix,
    restarts: int = 12,
    seed: int = 0,
    margin: float | None = None,
) -> bool:
    """Whether no local strategy pushes the Bell overlap above 1/d.

    For Bell-diagonal inputs the overlap maximum is the largest Bell weight
    and the test is exact.  Otherwise it relies on the numeric lower bound
    from :func:`singlet_fraction`, so a one-sided caveat applies: a True
    answer could in principle be overturned by a better optimization.
    The comparison uses a one-sided slack ``margin`` above 1/d.
    """
    margin = resolve(margin, TOLS.unfaithful_margin)
    params = bds_params_of(rho)
    if params is not None:
        f_max = float(np.max(params.weights()))
    else:
        f_max = singlet_fraction(rho, restarts=restarts, seed=seed)
    return f_max <= 0.5 + margin


# --- member samplers ---------------------------------------------------------


def sample_trace_ball(
    center: DensityMatrix, radius: float, rng: np.random.Generator
) -> DensityMatrix:
    """Random state in the trace-norm ball of given radius around ``center``.

    Draws a random traceless Hermitian direction, normalizes it to unit
    trace norm, and scales by a radius biased toward the ball surface
    (where membership claims are hardest).  Rejects the rare draws that
    leave the positive cone.
    """
    d = center.dim
    n_dof = d * d - 1
    for _ in range(1000):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = (g + g.conj().T) / 2.0
        h -= np.eye(d) * (h.trace().real / d)
        h /= trace_norm(h)
        r = radius * rng.uniform() ** (1.0 / n_dof)
        mat = center.mat + r * h
        if float(np.linalg.eigvalsh(mat)[0]) >= 0.0:
            return DensityMatrix(mat, center.dims, validate=False)
    raise ConfigurationError("ball sampler failed to find a positive state")


def random_quantum_classical(rng: np.random.Generator) -> DensityMatrix:
    """Random zero-discord state sum_i p_i rho_i x |psi_i><psi_i|.

    Random weights, random single-qubit states on A, random orthonormal
    measurement basis on B.
    """
    p = rng.dirichlet((1.0, 1.0))
    v = random_unitary(2, rng)
    mat = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        rho_a = random_density(2, rank=2, seed=rng)
        ket = v[:, i]
        mat += p[i] * np.kron(rho_a.mat, np.outer(ket, ket.conj()))
    return DensityMatrix(mat, (2, 2), validate=False)


def _sample_ppt(rng: np.random.Generator) -> DensityMatrix:
    for _ in range(10000):
        rho = random_density(4, rank=4, seed=rng)
        if is_ppt(rho):
            return rho
    raise ConfigurationError("rejection sampler found no PPT state")


def _sample_axis_state(rng: np.random.Generator) -> DensityMatrix:
    axis = int(rng.integers(0, 3))
    k = float(rng.uniform(-1.0, 1.0))
    c = [0.0, 0.0, 0.0]
    c[axis] = k
    return bell_diagonal(BellDiagonalParams(*c))


# --- oracle constructors -----------------------------------------------------


def ppt_oracle() -> FreeSetOracle:
    """States with positive partial transpose; star center 1/4 with the
    separable-ball radius attached."""
    return FreeSetOracle(
        name="ppt",
        member=is_ppt,
        star_center=maximally_mixed(),
        kappa=separable_ball_radius(2, 2),
        sampler=_sample_ppt,
    )


def zero_discord_oracle() -> FreeSetOracle:
    """Quantum-classical states (measurement side B).  Star-convex with
    respect to 1/4 but contains no ball around it, hence kappa is None."""
    return FreeSetOracle(
        name="zero-discord",
        member=has_zero_discord,
        star_center=maximally_mixed(),
        kappa=None,
        sampler=random_quantum_classical,
    )


def unfaithful_oracle(restarts: int = 12, seed: int = 0) -> FreeSetOracle:
    """Teleportation-unfaithful states (maximal Bell overlap <= 1/2).

    Membership is exact on Bell-diagonal inputs and numeric,
    lower-bound-based otherwise; see :func:`is_unfaithful`.
    """
    center = maximally_mixed()
    kappa = teleportation_ball_radius(2)
    return FreeSetOracle(
        name="unfaithful",
        member=lambda rho: is_unfaithful(rho, restarts=restarts, seed=seed),
        star_center=center,
        kappa=kappa,
        sampler=lambda rng: sample_trace_ball(center, kappa, rng),
    )


def bds_axes_oracle(tol: float | None = None) -> FreeSetOracle:
    """Bell-diagonal states on a coordinate axis of the tetrahedron
    (at most one nonzero c_i); the zero-discord states within that family."""
    tol = resolve(tol, TOLS.discord_membership)

    def member(rho: DensityMatrix) -> bool:
        params = bds_params_of(rho)
        if params is None:
            return False
        middle = sorted(abs(v) for v in params.as_tuple())[1]
        return middle <= tol

    return FreeSetOracle(
        name="bds-axes",
        member=member,
        star_center=maximally_mixed(),
        kappa=None,
        sampler=_sample_axis_state,
    )


_ORACLES = {
    "ppt": ppt_oracle,
    "zero-discord": zero_discord_oracle,
    "unfaithful": unfaithful_oracle,
    "bds-axes": bds_axes_oracle,
}


def oracle_by_name(name: str) -> FreeSetOracle:
    try:
        factory = _ORACLES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown free set {name!r}; choose from {sorted(_ORACLES)}"
        ) from None
    return factory()


# --- star-convexity probe ----------------------------------------------------


@dataclass(frozen=True)
class StarConvexityReport:
    oracle_name: str
    samples: int
    mix_points: int
    checked: int
    violations: int
    first_violation: Optional[str]

    @property
    def passed(self) -> bool:
        return self.violations == 0


def star_convexity_probe(
    oracle: FreeSetOracle,
    samples: int = 200,
    mix_points: int = 10,
    seed: int = 0,
) -> StarConvexityReport:
    """Empirically probe star-convexity of an oracle about its star center.

    Draws members via the oracle's sampler and checks that every mixture
    (1 - delta) * member + delta * center stays in the set, on a fixed
    grid of mixing weights.  Reports violations rather than raising.
    """
    if oracle.star_center is None:
        raise ConfigurationError(f"oracle {oracle.name!r} has no star center")
    if oracle.sampler is None:
        raise ConfigurationError(f"oracle {oracle.name!r} has no member sampler")
    rng = np.random.default_rng(seed)
    center = oracle.star_center
    deltas = [(j + 1) / (mix_points + 1) for j in range(mix_points)]
    checked = 0
    violations = 0
    first: Optional[str] = None
    for i in range(samples):
        member = oracle.sampler(rng)
        if not oracle.member(member):
            violations += 1
            if first is None:
                first = f"sample {i}: sampler output is not a member"
            continue
        for delta in deltas:
            mix = DensityMatrix(
                (1.0 - delta) * member.mat + delta * center.mat,
                member.dims,
                validate=False,
            )
            checked += 1
            if not oracle.member(mix):
                violations += 1
                if first is None:
                    first = f"sample {i}, delta {delta:.3f}: mixture left the set"
    return StarConvexityReport(
        oracle_name=oracle.name,
        samples=samples,
        mix_points=mix_points,
        checked=checked,
        violations=violations,
        first_violation=first,
    )
