"""Dense linear algebra and entropy primitives.

States and operators are plain complex ``numpy`` arrays. The validators
:func:`density_matrix` and :func:`pure_state` check the invariants and hand
back a cleaned-up copy; everything else takes arrays directly.

All logarithms are base 2.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_CLAMP = 1e-10


class InvalidStateError(ValueError):
    """Raised when an array does not describe a valid quantum state."""


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_drift(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def density_matrix(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``m`` as a density matrix and return its Hermitian part.

    Checks squareness, Hermiticity, unit trace and positivity (eigenvalues
    no smaller than ``-1e-10``), each to within ``tol``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {m.shape}")
    drift = hermitian_drift(m)
    if drift > tol:
        raise InvalidStateError(f"matrix is not Hermitian (drift {drift:.3e})")
    m = 0.5 * (m + dagger(m))
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -EIGEN_CLAMP:
        raise InvalidStateError(f"negative eigenvalue {lo:.3e}")
    return m


def pure_state(v, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"state vector has norm {norm!r}")
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, np.conj(v))


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``a``'s index as the major one."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Reduce a bipartite operator on ``dA * dB`` to subsystem ``keep``.

    ``keep`` is ``"A"`` (trace out the second factor) or ``"B"``.
    """
    rho = as_matrix(rho)
    da, db = dims
    if rho.shape != (da * db, da * db):
        raise ValueError(f"operator of shape {rho.shape} does not match dims {dims}")
    t = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix.

    Drift up to ``tol`` is removed by symmetrizing first; anything larger is
    rejected.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    drift = hermitian_drift(m)
    if drift > tol:
        raise ValueError(f"matrix is not Hermitian (drift {drift:.3e})")
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))


def entropy_of_spectrum(eigs) -> float:
    """``-sum(l * log2(l))`` over a spectrum, clamping tiny negatives to zero."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size and eigs.min() < -EIGEN_CLAMP:
        raise InvalidStateError(f"negative eigenvalue {eigs.min():.3e}")
    p = eigs[eigs > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits of a density matrix."""
    return entropy_of_spectrum(hermitian_eigenvalues(rho))


def maximally_entangled(d: int) -> np.ndarray:
    """The state ``sum_i |ii> / sqrt(d)`` as a vector of length ``d**2``."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def generalized_pauli(d: int, a: int, b: int) -> np.ndarray:
    """Shift/clock unitary ``X**a @ Z**b`` in dimension ``d``.

    ``X|j> = |j+1 mod d>`` and ``Z|j> = exp(2 pi i j / d)|j>``.
    """
    if not (0 <= a < d and 0 <= b < d):
        raise ValueError(f"Pauli label ({a}, {b}) out of range for d={d}")
    j = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    # column j of X^a Z^b is omega^(b j) |j + a>
    u[(j + a) % d, j] = np.exp(2j * np.pi * b * j / d)
    return u


def pauli_labels(d: int) -> list[tuple[int, int]]:
    """Labels ``(a, b)`` in the order used for the ``d**2``-letter alphabet.

    Index ``m`` corresponds to ``(m // d, m % d)``.
    """
    return [(a, b) for a in range(d) for b in range(d)]


def pauli_basis(d: int) -> np.ndarray:
    """All ``d**2`` generalized Paulis stacked as ``(d**2, d, d)``."""
    return np.stack([generalized_pauli(d, a, b) for a, b in pauli_labels(d)])


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
