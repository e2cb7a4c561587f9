"""Dense operator core: validated matrix types and exact spectral routines.

All operators are dense complex128 matrices of explicit dimension. Matrix
functions go through the eigendecomposition, never through series expansions,
so every downstream bound check is limited by eigensolver accuracy rather
than truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ResourceError, ValidationError

__all__ = [
    "Tolerances",
    "TOL",
    "HermitianOperator",
    "UnitaryOperator",
    "Projector",
    "StateVector",
    "SpectralDecomposition",
    "ShiftRegisterOperator",
    "eig",
    "evolve",
    "reflection",
    "projector_below",
    "spectral_norm",
    "shift_operator",
    "shift_evolution_factored",
    "check_subnormalized",
]


@dataclass(frozen=True)
class Tolerances:
    """Global numeric tolerances, adjustable in one place."""

    hermiticity: float = 1e-12
    unitarity: float = 1e-10
    idempotence: float = 1e-10
    projector_spectrum: float = 1e-8
    reconstruction: float = 1e-9
    state_norm: float = 1e-10
    norm_slack: float = 1e-10
    group_law: float = 1e-9
    factorization: float = 1e-10
    zero_norm: float = 1e-14
    max_total_dim: int = 4096


TOL = Tolerances()


def _as_matrix(entries, name: str) -> np.ndarray:
    arr = np.array(entries, dtype=np.complex128, order="C")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HermitianOperator:
    """A validated Hermitian matrix."""

    entries: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = _as_matrix(self.entries, "HermitianOperator")
        dev = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
        if dev > self.tol.hermiticity:
            raise ValidationError(
                f"matrix deviates from Hermitian by {dev:.3e} "
                f"(tolerance {self.tol.hermiticity:.0e})"
            )
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    """A validated unitary matrix."""

    entries: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = _as_matrix(self.entries, "UnitaryOperator")
        dev = np.max(np.abs(arr @ arr.conj().T - np.eye(arr.shape[0])))
        if dev > self.tol.unitarity:
            raise ValidationError(
                f"matrix deviates from unitary by {dev:.3e} "
                f"(tolerance {self.tol.unitarity:.0e})"
            )
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Projector:
    """A validated orthogonal projector (Hermitian, idempotent, 0/1 spectrum)."""

    entries: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = _as_matrix(self.entries, "Projector")
        herm = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
        if herm > self.tol.hermiticity:
            raise ValidationError(f"projector deviates from Hermitian by {herm:.3e}")
        idem = np.max(np.abs(arr @ arr - arr))
        if idem > self.tol.idempotence:
            raise ValidationError(f"projector deviates from idempotent by {idem:.3e}")
        vals = np.linalg.eigvalsh(arr)
        dev = np.min(np.stack([np.abs(vals), np.abs(vals - 1.0)]), axis=0)
        if np.max(dev) > self.tol.projector_spectrum:
            raise ValidationError(
                f"projector spectrum deviates from {{0,1}} by {np.max(dev):.3e}"
            )
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.real(np.trace(self.entries))))

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.entries, tol=self.tol)


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state."""

    amplitudes: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValidationError(f"state must be a vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValidationError("state contains non-finite amplitudes")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > self.tol.state_norm:
            raise ValidationError(f"state norm {norm:.12f} is not 1 within tolerance")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and a matching unitary eigenvector matrix.

    Column j of ``eigenvectors`` belongs to ``eigenvalues[j]``. Ordering ties
    are resolved by the backend's column order, re-sorted stably.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=np.float64)
        vecs = _as_matrix(self.eigenvectors, "eigenvectors")
        if vals.ndim != 1 or vals.shape[0] != vecs.shape[0]:
            raise ValidationError("eigenvalue/eigenvector shape mismatch")
        if np.any(np.diff(vals) < 0):
            raise ValidationError("eigenvalues must be ascending")
        dev = np.max(np.abs(vecs @ vecs.conj().T - np.eye(vecs.shape[0])))
        if dev > self.tol.unitarity:
            raise ValidationError(f"eigenvector matrix deviates from unitary by {dev:.3e}")
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


@dataclass(frozen=True)
class ShiftRegisterOperator:
    """Block operator sum_j |j><j| (x) (H - j*2pi/2^n) over an n-bit register."""

    operator: HermitianOperator
    n: int
    base_dim: int

    @property
    def dim(self) -> int:
        return self.operator.dim


def eig(H: HermitianOperator) -> SpectralDecomposition:
    """Full eigendecomposition with an ascending-order contract.

    Raises NumericError-grade ValidationError if the reconstruction drifts
    beyond the global tolerance (eigh should sit far below it).
    """
    vals, vecs = np.linalg.eigh(H.entries)
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    dec = SpectralDecomposition(vals, vecs, tol=H.tol)
    err = np.max(np.abs(dec.reconstruct() - H.entries))
    if err > H.tol.reconstruction:
        raise ValidationError(f"eigendecomposition reconstruction error {err:.3e}")
    return dec


def _phase_apply(dec: SpectralDecomposition, phases: np.ndarray) -> np.ndarray:
    return (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T


def evolve(H: HermitianOperator, t: float) -> UnitaryOperator:
    """exp(-iHt) through the eigendecomposition."""
    dec = eig(H)
    return UnitaryOperator(_phase_apply(dec, np.exp(-1j * dec.eigenvalues * t)), tol=H.tol)


def reflection(P: Projector) -> UnitaryOperator:
    """I - 2P, the reflection through the complement of range(P)."""
    return UnitaryOperator(np.eye(P.dim) - 2.0 * P.entries, tol=P.tol)


def projector_below(dec: SpectralDecomposition, energy: float) -> Projector:
    """Spectral projector onto eigenvalues strictly below ``energy``."""
    sel = dec.eigenvalues < energy
    vecs = dec.eigenvectors[:, sel]
    return Projector(vecs @ vecs.conj().T, tol=dec.tol)


def spectral_norm(M) -> float:
    """Largest singular value; accepts wrapped operators or raw arrays."""
    arr = M.entries if hasattr(M, "entries") else np.asarray(M)
    return float(np.linalg.norm(arr, 2))


def check_subnormalized(H: HermitianOperator, name: str = "operator") -> float:
    """Require spectral norm <= 1 (+ slack); returns the measured norm."""
    norm = spectral_norm(H)
    if norm > 1.0 + H.tol.norm_slack:
        raise ValidationError(f"{name} has spectral norm {norm:.12f} > 1")
    return norm


def shift_operator(H: HermitianOperator, n: int, tol: Tolerances = TOL) -> ShiftRegisterOperator:
    """Materialize sum_j |j><j| (x) (H - j*2pi/2^n) as a dense block matrix."""
    if n < 1:
        raise RangeError(f"register size must be >= 1, got {n}")
    m = H.dim
    total = m * (1 << n)
    if total > tol.max_total_dim:
        raise ResourceError(
            f"shift operator dimension {total} exceeds budget {tol.max_total_dim}"
        )
    shifts = np.arange(1 << n) * (2.0 * np.pi / (1 << n))
    blocks = np.kron(np.eye(1 << n), H.entries) - np.kron(np.diag(shifts), np.eye(m))
    return ShiftRegisterOperator(HermitianOperator(blocks, tol=tol), n, m)


def shift_evolution_factored(H: HermitianOperator, n: int, tol: Tolerances = TOL) -> UnitaryOperator:
    """exp(+i SHIFT_n(H)) built from n single-qubit phases and one exp(+iH).

    Register bit m contributes diag(1, exp(-i 2^m * 2pi/2^n)); bits are
    kron'ed most-significant first so block j carries exp(-i j*2pi/2^n).
    """
    if n < 1:
        raise RangeError(f"register size must be >= 1, got {n}")
    total = H.dim * (1 << n)
    if total > tol.max_total_dim:
        raise ResourceError(
            f"factored evolution dimension {total} exceeds budget {tol.max_total_dim}"
        )
    register = np.array([[1.0]], dtype=np.complex128)
    for m in reversed(range(n)):
        theta = (1 << m) * 2.0 * np.pi / (1 << n)
        register = np.kron(register, np.diag([1.0, np.exp(-1j * theta)]))
    return UnitaryOperator(np.kron(register, evolve(H, -1.0).entries), tol=tol)
