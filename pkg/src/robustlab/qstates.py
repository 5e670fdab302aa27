"""Density matrices of one and two qubits (and up to dimension 8).

Conventions pinned here and relied on everywhere else:

* Pauli order is (x, y, z), i.e. sigma_1, sigma_2, sigma_3.
* ``bell_states()`` returns (phi_plus, phi_minus, psi_plus, psi_minus) with
  phi_pm = (|00> pm |11>)/sqrt2 and psi_pm = (|01> pm |10>)/sqrt2.  Their
  correlation matrices are diag(1,-1,1), diag(-1,1,1), diag(1,1,-1) and
  diag(-1,-1,-1) in that order.
* Two-qubit Bloch form: rho = (1/4)(1x1 + sum_i x_i s_i x 1
  + sum_j y_j 1 x s_j + sum_ij T_ij s_i x s_j), with x_i = tr(rho s_i x 1),
  y_j = tr(rho 1 x s_j), T_ij = tr(rho s_i x s_j).
* ``bell_diagonal(c)`` = (1/4)(1x1 + sum_i c_i s_i x s_i); its Bell-basis
  weights in the order above are (1+c1-c2+c3)/4, (1-c1+c2+c3)/4,
  (1+c1+c2-c3)/4, (1-c1-c2-c3)/4.
* ``werner(p)`` = (1-p)|psi_minus><psi_minus| + (p/4) 1x1, so p = 1 is the
  maximally mixed state and p = 0 the singlet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import TOLS
from .errors import PositivityError, ValidationError
from .operator_core import as_complex_matrix, kron, require_hermitian, trace_norm

__all__ = [
    "PAULI",
    "DensityMatrix",
    "BlochTwoQubit",
    "BellDiagonalParams",
    "bell_state_vectors",
    "bell_states",
    "bell_diagonal",
    "werner",
    "maximally_mixed",
    "bloch_decompose",
    "bloch_compose",
    "state_inversion",
    "random_density",
    "random_unitary",
    "random_bell_diagonal",
    "trace_distance",
    "state_to_json",
    "state_from_json",
]

_I2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# precomputed tensor-product Pauli bases for fast Bloch (de)composition
_PA = np.stack([kron(s, _I2) for s in PAULI])            # (3, 4, 4)
_PB = np.stack([kron(_I2, s) for s in PAULI])            # (3, 4, 4)
_PAB = np.stack([
    np.stack([kron(si, sj) for sj in PAULI]) for si in PAULI
])                                                       # (3, 3, 4, 4)
_PAA = np.stack([kron(s, s) for s in PAULI])             # (3, 4, 4)
_I4 = np.eye(4, dtype=complex)


class DensityMatrix:
    """A validated density matrix with subsystem dimensions attached.

    Instances are value-like: the backing array is copied on construction
    and marked read-only.  ``validate=False`` skips the eigenvalue check
    and is reserved for internal constructors whose output is positive by
    construction.
    """

    __slots__ = ("mat", "dims")

    def __init__(self, mat, dims, *, validate: bool = True):
        a = np.array(mat, dtype=complex, copy=True)
        dims = tuple(int(d) for d in dims)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {a.shape}")
        if int(np.prod(dims)) != a.shape[0]:
            raise ValidationError(
                f"dims {dims} inconsistent with matrix dimension {a.shape[0]}"
            )
        if validate:
            require_hermitian(a)
            tr = float(a.trace().real)
            if abs(tr - 1.0) > TOLS.trace_one:
                raise ValidationError(
                    f"trace {tr!r} deviates from 1 beyond {TOLS.trace_one:.1e}"
                )
            wmin = float(np.linalg.eigvalsh(a)[0])
            if wmin < -TOLS.psd:
                raise PositivityError(
                    f"negative eigenvalue {wmin:.3e} below -{TOLS.psd:.1e}"
                )
        a.setflags(write=False)
        self.mat = a
        self.dims = dims

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, dims={self.dims})"


@dataclass(frozen=True, eq=False)
class BlochTwoQubit:
    """Bloch parameters (x, y, T) of a two-qubit operator."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation triple (c1, c2, c3) of a Bell-diagonal state.

    Validity requires the four tetrahedron inequalities
    1-c1-c2-c3 >= 0, 1-c1+c2+c3 >= 0, 1+c1-c2+c3 >= 0, 1+c1+c2-c3 >= 0;
    the error message names the first one violated.
    """

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        c1, c2, c3 = float(self.c1), float(self.c2), float(self.c3)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        object.__setattr__(self, "c3", c3)
        slack = TOLS.bds_positivity
        constraints = (
            ("1-c1-c2-c3 >= 0", 1.0 - c1 - c2 - c3),
            ("1-c1+c2+c3 >= 0", 1.0 - c1 + c2 + c3),
            ("1+c1-c2+c3 >= 0", 1.0 + c1 - c2 + c3),
            ("1+c1+c2-c3 >= 0", 1.0 + c1 + c2 - c3),
        )
        for name, value in constraints:
            if value < -slack:
                raise PositivityError(f"{name} violated (got {value:.6g})")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)

    def weights(self) -> np.ndarray:
        """Bell-basis weights in (phi+, phi-, psi+, psi-) order."""
        c1, c2, c3 = self.c1, self.c2, self.c3
        return np.array(
            [
                (1.0 + c1 - c2 + c3) / 4.0,
                (1.0 - c1 + c2 + c3) / 4.0,
                (1.0 + c1 + c2 - c3) / 4.0,
                (1.0 - c1 - c2 - c3) / 4.0,
            ]
        )


def bell_state_vectors() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Bell basis kets in (phi+, phi-, psi+, psi-) order."""
    rt = 1.0 / np.sqrt(2.0)
    phi_p = np.array([rt, 0, 0, rt], dtype=complex)
    phi_m = np.array([rt, 0, 0, -rt], dtype=complex)
    psi_p = np.array([0, rt, rt, 0], dtype=complex)
    psi_m = np.array([0, rt, -rt, 0], dtype=complex)
    return phi_p, phi_m, psi_p, psi_m


def bell_states() -> tuple[DensityMatrix, ...]:
    """The four Bell states as density matrices (see module conventions)."""
    return tuple(
        DensityMatrix(np.outer(v, v.conj()), (2, 2), validate=False)
        for v in bell_state_vectors()
    )


def bell_diagonal(c: BellDiagonalParams | tuple[float, float, float]) -> DensityMatrix:
    """Bell-diagonal state (1/4)(1x1 + sum_i c_i sigma_i x sigma_i)."""
    if not isinstance(c, BellDiagonalParams):
        c = BellDiagonalParams(*c)
    mat = 0.25 * (_I4 + c.c1 * _PAA[0] + c.c2 * _PAA[1] + c.c3 * _PAA[2])
    return DensityMatrix(mat, (2, 2), validate=False)


def werner(p: float) -> DensityMatrix:
    """Singlet mixed with white noise: (1-p)|psi-><psi-| + (p/4) 1x1."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"werner parameter must lie in [0, 1], got {p!r}")
    return bell_diagonal(BellDiagonalParams(-(1 - p), -(1 - p), -(1 - p)))


def maximally_mixed(dims=(2, 2)) -> DensityMatrix:
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d, dtype=complex) / d, dims, validate=False)


def bloch_decompose(rho: DensityMatrix) -> BlochTwoQubit:
    """Bloch parameters of a two-qubit state (see module conventions)."""
    if rho.dims != (2, 2):
        raise ValidationError(f"bloch decomposition needs dims (2, 2), got {rho.dims}")
    m = rho.mat
    x = np.real(np.einsum("iab,ba->i", _PA, m))
    y = np.real(np.einsum("iab,ba->i", _PB, m))
    t = np.real(np.einsum("ijab,ba->ij", _PAB, m))
    return BlochTwoQubit(x=x, y=y, T=t)


def bloch_compose(b: BlochTwoQubit, *, validate: bool = True) -> DensityMatrix:
    """Rebuild the two-qubit state from Bloch parameters."""
    x = np.asarray(b.x, dtype=float)
    y = np.asarray(b.y, dtype=float)
    t = np.asarray(b.T, dtype=float)
    if x.shape != (3,) or y.shape != (3,) or t.shape != (3, 3):
        raise ValidationError("bloch parameters must have shapes (3,), (3,), (3,3)")
    mat = 0.25 * (
        _I4
        + np.einsum("i,iab->ab", x, _PA)
        + np.einsum("j,jab->ab", y, _PB)
        + np.einsum("ij,ijab->ab", t, _PAB)
    )
    return DensityMatrix(mat, (2, 2), validate=validate)


def state_inversion(rho: DensityMatrix) -> DensityMatrix:
    """Universal two-qubit state inversion (sigma_y x sigma_y) rho^T (sigma_y x sigma_y).

    Spectrum-preserving; negates both local Bloch vectors and fixes the
    correlation matrix, so Bell-diagonal states are fixed points.
    """
    if rho.dims != (2, 2):
        raise ValidationError(f"state inversion needs dims (2, 2), got {rho.dims}")
    yy = _PAB[1, 1]
    return DensityMatrix(yy @ rho.mat.T @ yy, (2, 2), validate=False)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_density(dim: int, rank: int | None = None, seed=0) -> DensityMatrix:
    """Random state via partial trace of a Gaussian-amplitude purification.

    ``G`` is a dim x rank complex Gaussian matrix; the state is
    G G^dag / tr(G G^dag), which has the requested rank almost surely.
    Deterministic for a fixed integer seed.
    """
    rng = _rng(seed)
    dim = int(dim)
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m /= m.trace().real
    dims = (2, 2) if dim == 4 else (dim,)
    return DensityMatrix(m, dims, validate=False)


def random_unitary(dim: int, seed=0) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    rng = _rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    # fix the phase ambiguity so the distribution is Haar
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_bell_diagonal(seed=0) -> BellDiagonalParams:
    """Uniform mixing weights over the four Bell states, mapped to (c1, c2, c3)."""
    rng = _rng(seed)
    w = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
    # columns: correlation triples of phi+, phi-, psi+, psi-
    signs = np.array(
        [
            [1.0, -1.0, 1.0, -1.0],
            [-1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
        ]
    )
    c = signs @ w
    return BellDiagonalParams(c[0], c[1], c[2])


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Trace norm of the difference of two states."""
    return trace_norm(rho.mat - sigma.mat)


def state_to_json(rho: DensityMatrix) -> dict:
    """Canonical JSON-ready form: dims plus real/imag entry tables."""
    return {
        "dims": list(rho.dims),
        "re": [[float(v) for v in row] for row in rho.mat.real],
        "im": [[float(v) for v in row] for row in rho.mat.imag],
    }


def state_from_json(obj: dict | str) -> DensityMatrix:
    """Parse a state from any of the three accepted JSON shapes.

    Accepted: {"dims": [...], "re": [[...]], "im": [[...]]},
    {"bloch": {"x": [...], "y": [...], "T": [[...]]}} and
    {"bds": [c1, c2, c3]}.  Validation runs on the parsed state, so
    malformed shapes raise ValidationError and non-positive inputs raise
    PositivityError.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValidationError(f"state JSON must be an object, got {type(obj).__name__}")
    if "bds" in obj:
        c = obj["bds"]
        if not isinstance(c, (list, tuple)) or len(c) != 3:
            raise ValidationError('"bds" must be a list [c1, c2, c3]')
        return bell_diagonal(BellDiagonalParams(*[float(v) for v in c]))
    if "bloch" in obj:
        b = obj["bloch"]
        try:
            params = BlochTwoQubit(
                x=np.asarray(b["x"], dtype=float),
                y=np.asarray(b["y"], dtype=float),
                T=np.asarray(b["T"], dtype=float),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f'"bloch" object needs x, y, T arrays: {exc}') from exc
        return bloch_compose(params, validate=True)
    if "re" in obj:
        dims = obj.get("dims")
        if dims is None:
            raise ValidationError('matrix-form state JSON needs a "dims" field')
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValidationError('"re" and "im" tables must have the same shape')
        mat = as_complex_matrix(re + 1j * im)
        return DensityMatrix(mat, tuple(dims), validate=True)
    raise ValidationError(
        'unrecognized state JSON: expected one of the keys "re", "bloch", "bds"'
    )
