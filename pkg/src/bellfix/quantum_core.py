"""Dense two-qubit linear algebra and the Born rule.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4).
Two-particle operators use particle 1 as the left tensor factor, so the
computational basis is ordered |00>, |01>, |10>, |11>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PROB_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class NotHermitianError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def hermitian_deviation(a) -> float:
    m = as_matrix(a)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_deviation(a) <= tol


def eigvalsh(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending.

    2x2 inputs use the trace/determinant closed form; larger ones go
    through LAPACK.
    """
    m = as_matrix(a)
    if not is_hermitian(m, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian (deviation {hermitian_deviation(m):.3e} > {tol:.1e})"
        )
    if m.shape == (2, 2):
        t = (m[0, 0].real + m[1, 1].real) / 2
        d = (m[0, 0].real - m[1, 1].real) / 2
        r = float(np.hypot(d, abs(m[0, 1])))
        return np.array([t - r, t + r])
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def is_psd(a, tol: float = PSD_TOL) -> bool:
    """True iff every eigenvalue of the Hermitian matrix ``a`` is >= -tol.

    Raises NotHermitianError when ``a`` is not Hermitian within ``tol``.
    """
    return bool(eigvalsh(a, tol)[0] >= -tol)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated two-qubit state (Hermitian, unit trace, PSD)."""

    matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (4, 4):
            raise ValueError(f"density operator must be 4x4, got {m.shape}")
        if not is_hermitian(m, HERMITIAN_TOL):
            raise ValueError("density operator is not Hermitian")
        if abs(trace(m) - 1) > TRACE_TOL:
            raise ValueError(f"density operator trace {trace(m)} != 1")
        if not is_psd(m, PSD_TOL):
            raise ValueError("density operator is not positive semidefinite")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def pure_state(psi, name: str = "custom") -> DensityOperator:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()), name)


def singlet() -> DensityOperator:
    """(|01> - |10>)/sqrt(2) as a density operator."""
    v = np.array([0, 1, -1, 0], dtype=complex)
    # divide the outer product by 2 rather than v by sqrt(2): entries stay exact
    return DensityOperator(np.outer(v, v) / 2, "singlet")


def maximally_mixed() -> DensityOperator:
    return DensityOperator(I4 / 4, "maximally_mixed")


def product_00() -> DensityOperator:
    return pure_state([1, 0, 0, 0], "product_00")


def random_density(rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random two-qubit state from a Ginibre matrix (rank 1..4)."""
    rank = 4 if rank is None else rank
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real)


def born_probability(rho: DensityOperator, effect) -> float:
    """Probability Tr(rho E) of the two-qubit effect ``effect``.

    Values within PROB_TOL outside [0, 1] are clamped. A trace with an
    imaginary part above PROB_TOL means a non-Hermitian input and is
    rejected.
    """
    e = as_matrix(effect)
    if e.shape != (4, 4):
        raise ValueError(f"effect must be 4x4, got {e.shape}")
    if not is_psd(e, PSD_TOL):
        raise ValueError("effect is not positive semidefinite")
    if eigvalsh(e, PSD_TOL)[-1] > 1 + PSD_TOL:
        raise ValueError("effect has an eigenvalue above 1")
    # Tr(rho E) without forming the product
    t = complex(np.sum(rho.matrix * e.T))
    if abs(t.imag) > PROB_TOL:
        raise ValueError(f"Born trace has imaginary part {t.imag:.3e}")
    p = t.real
    if p < -PROB_TOL or p > 1 + PROB_TOL:
        raise ValueError(f"Born probability {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)
