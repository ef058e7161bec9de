"""Quantum channels in Kraus form and the named families used throughout.

A channel maps ``din``-dimensional inputs to ``dout``-dimensional outputs.
The Choi state puts the channel output first and the untouched reference
second: ``(N (x) I)(|Psi><Psi|)`` with ``|Psi> = sum_i |ii> / sqrt(din)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .qmath import (
    dagger,
    density_matrix,
    entropy_of_spectrum,
    generalized_pauli,
    hermitian_eigenvalues,
    maximally_entangled,
    pauli_basis,
    projector,
    von_neumann_entropy,
)
from .shannon import distribution

TP_TOL = 1e-9
KRAUS_CUTOFF = 1e-12


class ChannelError(ValueError):
    pass


class TracePreservationError(ChannelError):
    pass


class KrausFormatError(ChannelError):
    """Malformed Kraus JSON; ``where`` names the offending field."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map stored as a stack of Kraus operators of shape ``(k, dout, din)``."""

    din: int
    dout: int
    kraus: np.ndarray
    name: str = ""

    def __post_init__(self):
        k = np.array(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise ChannelError("need at least one Kraus operator")
        if k.shape[1:] != (self.dout, self.din):
            raise ChannelError(
                f"Kraus operators have shape {k.shape[1:]}, expected {(self.dout, self.din)}"
            )
        if not np.all(np.isfinite(k)):
            raise ChannelError("Kraus operators have non-finite entries")
        completeness = np.einsum("kji,kjl->il", k.conj(), k)
        dev = float(np.max(np.abs(completeness - np.eye(self.din))))
        if dev > TP_TOL:
            raise TracePreservationError(f"sum K^dag K deviates from identity by {dev:.3e}")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @property
    def square(self) -> bool:
        return self.din == self.dout

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self) -> str:
        label = self.name or "QuantumChannel"
        return f"<{label} din={self.din} dout={self.dout} kraus={self.kraus.shape[0]}>"


def from_kraus(din: int, dout: int, matrices, name: str = "") -> QuantumChannel:
    return QuantumChannel(din, dout, np.asarray(matrices, dtype=complex), name)


def _check_family(d: int, x: float) -> None:
    if int(d) != d or d < 2:
        raise ChannelError(f"dimension must be an integer >= 2, got {d!r}")
    if not 0.0 <= x <= 1.0:
        raise ChannelError(f"x must lie in [0, 1], got {x!r}")


def identity(d: int) -> QuantumChannel:
    return QuantumChannel(d, d, np.eye(d, dtype=complex)[None], f"identity({d})")


def depolarizing(d: int, x: float) -> QuantumChannel:
    """``xi -> (1 - x) xi + x tr(xi) I / d``.

    Realized as a Pauli mixture in which the identity keeps weight
    ``1 - x + x/d**2`` (the uniform twirl also contains the identity).
    """
    _check_family(d, x)
    paulis = pauli_basis(d)
    weights = np.full(d * d, x / d**2)
    weights[0] = 1 - x + x / d**2
    keep = weights > 0
    k = np.sqrt(weights[keep])[:, None, None] * paulis[keep]
    return QuantumChannel(d, d, k, f"depolarizing(d={d}, x={x:g})")


def erasure(d: int, x: float) -> QuantumChannel:
    """Input survives w.p. ``1 - x``; otherwise replaced by the flag ``|d>``.

    The erasure flag is the last basis vector of the ``d + 1`` output space.
    """
    _check_family(d, x)
    embed = np.zeros((d + 1, d), dtype=complex)
    embed[:d, :d] = np.eye(d)
    ks = []
    if x < 1:
        ks.append(np.sqrt(1 - x) * embed)
    if x > 0:
        for i in range(d):
            k = np.zeros((d + 1, d), dtype=complex)
            k[d, i] = np.sqrt(x)
            ks.append(k)
    return QuantumChannel(d, d + 1, np.stack(ks), f"erasure(d={d}, x={x:g})")


def dephasing(x: float) -> QuantumChannel:
    """Qubit channel applying ``sigma_z`` with probability ``x/2``."""
    _check_family(2, x)
    z = np.diag([1.0, -1.0]).astype(complex)
    k = np.stack([np.sqrt(1 - x / 2) * np.eye(2, dtype=complex), np.sqrt(x / 2) * z])
    return QuantumChannel(2, 2, k, f"dephasing(x={x:g})")


def bell_diagonal(d: int, probs) -> QuantumChannel:
    """Mixture of generalized Paulis; ``probs[m]`` weights label ``(m // d, m % d)``."""
    probs = np.asarray(probs, dtype=float).reshape(-1)
    if probs.size != d * d:
        raise ChannelError(f"need {d * d} probabilities for d={d}, got {probs.size}")
    probs = distribution(probs)
    keep = probs > 0
    k = np.sqrt(probs[keep])[:, None, None] * pauli_basis(d)[keep]
    return QuantumChannel(d, d, k, f"bell_diagonal(d={d})")


def amplitude_damping(gamma: float) -> QuantumChannel:
    """Qubit decay ``|1> -> |0>`` with probability ``gamma``; not a Pauli channel."""
    _check_family(2, gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return QuantumChannel(2, 2, np.stack([k0, k1]), f"amplitude_damping({gamma:g})")


def unitary_channel(u) -> QuantumChannel:
    u = np.asarray(u, dtype=complex)
    return QuantumChannel(u.shape[1], u.shape[0], u[None], "unitary")


def apply(ch: QuantumChannel, rho) -> np.ndarray:
    """``sum_i K_i rho K_i^dag``, validated as a density matrix on the way in."""
    rho = density_matrix(rho)
    if rho.shape[0] != ch.din:
        raise ChannelError(f"input has dimension {rho.shape[0]}, channel expects {ch.din}")
    return _apply(ch.kraus, rho)


def _apply(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = (kraus @ rho @ dagger(kraus)).sum(axis=0)
    return 0.5 * (out + dagger(out))


def choi(ch: QuantumChannel) -> np.ndarray:
    """Choi state on ``dout * din``, output factor first."""
    psi = maximally_entangled(ch.din).reshape(ch.din, ch.din)
    # (K (x) I)|Psi> reshaped to dout x din is K @ psi_matrix
    vecs = (ch.kraus @ psi).reshape(ch.kraus.shape[0], -1)
    j = vecs.T @ vecs.conj()
    return 0.5 * (j + dagger(j))


def channel_from_choi(j, din: int, dout: int, name: str = "") -> QuantumChannel:
    """Kraus form of a map given its (normalized) Choi state.

    Eigenpairs with eigenvalue above ``1e-12`` become Kraus operators.
    """
    j = np.asarray(j, dtype=complex)
    if j.shape != (dout * din, dout * din):
        raise ChannelError(f"Choi matrix shape {j.shape} does not match ({dout}*{din})")
    evals, evecs = np.linalg.eigh(0.5 * (j + dagger(j)))
    keep = evals > KRAUS_CUTOFF
    if not np.any(keep):
        raise ChannelError("Choi matrix has no positive spectrum")
    k = np.sqrt(din * evals[keep])[:, None, None] * evecs[:, keep].T.reshape(-1, dout, din)
    return QuantumChannel(din, dout, k, name)


def choi_deviation(a: QuantumChannel, b: QuantumChannel) -> float:
    if (a.din, a.dout) != (b.din, b.dout):
        return float("inf")
    return float(np.max(np.abs(choi(a) - choi(b))))


def exchange_matrix(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``W[i, j] = tr(K_i rho K_j^dag)``."""
    k = kraus.shape[0]
    return (kraus @ rho).reshape(k, -1) @ kraus.reshape(k, -1).conj().T


def entropy_exchange(ch: QuantumChannel, rho) -> float:
    """Entropy of the environment, ``S((N (x) I)(Psi_rho))`` for a purification of ``rho``."""
    rho = density_matrix(rho)
    if rho.shape[0] != ch.din:
        raise ChannelError(f"input has dimension {rho.shape[0]}, channel expects {ch.din}")
    return entropy_of_spectrum(hermitian_eigenvalues(exchange_matrix(ch.kraus, rho), tol=1e-9))


def purification(rho) -> np.ndarray:
    """A purification of ``rho`` on system (x) reference, as a vector."""
    rho = density_matrix(rho)
    evals, evecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0, None)
    d = rho.shape[0]
    psi = np.zeros((d, d), dtype=complex)
    for lam, v in zip(evals, evecs.T):
        psi += np.sqrt(lam) * np.outer(v, v.conj())
    # psi = sqrt(rho) read as amplitudes psi[i, r] of |i>|r>
    return psi.reshape(-1)


def entropy_exchange_explicit(ch: QuantumChannel, rho) -> float:
    """Same quantity as :func:`entropy_exchange`, via an explicit purification."""
    d = ch.din
    psi = purification(rho).reshape(d, d)
    vecs = (ch.kraus @ psi).reshape(ch.kraus.shape[0], -1)
    state = vecs.T @ vecs.conj()
    return von_neumann_entropy(state)


# -- Kraus JSON -----------------------------------------------------------


def to_json_dict(ch: QuantumChannel) -> dict:
    return {
        "din": ch.din,
        "dout": ch.dout,
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in k] for k in ch.kraus
        ],
    }


def _count(obj: dict, key: str) -> int:
    if key not in obj:
        raise KrausFormatError("missing field", key)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise KrausFormatError(f"expected a positive integer, got {v!r}", key)
    return v


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise KrausFormatError(f"expected a number, got {v!r}", where)
    return float(v)


def from_json_dict(obj) -> QuantumChannel:
    if not isinstance(obj, dict):
        raise KrausFormatError("top level must be an object")
    din, dout = _count(obj, "din"), _count(obj, "dout")
    mats = obj.get("kraus")
    if not isinstance(mats, list) or not mats:
        raise KrausFormatError("expected a nonempty list of matrices", "kraus")
    out = np.zeros((len(mats), dout, din), dtype=complex)
    for k, mat in enumerate(mats):
        if not isinstance(mat, list) or len(mat) != dout:
            raise KrausFormatError(f"expected {dout} rows", f"kraus[{k}]")
        for r, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != din:
                raise KrausFormatError(f"expected {din} entries", f"kraus[{k}][{r}]")
            for c, entry in enumerate(row):
                where = f"kraus[{k}][{r}][{c}]"
                if not isinstance(entry, list) or len(entry) != 2:
                    raise KrausFormatError("expected a [re, im] pair", where)
                out[k, r, c] = complex(_number(entry[0], where), _number(entry[1], where))
    return QuantumChannel(din, dout, out, "kraus-file")


def load_kraus(path) -> QuantumChannel:
    """Read a Kraus JSON file.

    Raises ``json.JSONDecodeError`` (with line/column) for bad syntax,
    :class:`KrausFormatError` for schema problems and
    :class:`TracePreservationError` if the operators are incomplete.
    """
    text = Path(path).read_text(encoding="utf-8")
    return from_json_dict(json.loads(text))


def save_kraus(ch: QuantumChannel, path) -> None:
    Path(path).write_text(json.dumps(to_json_dict(ch), indent=1) + "\n", encoding="utf-8")


__all__ = [
    "ChannelError",
    "KrausFormatError",
    "QuantumChannel",
    "TracePreservationError",
    "amplitude_damping",
    "apply",
    "bell_diagonal",
    "channel_from_choi",
    "choi",
    "choi_deviation",
    "dephasing",
    "depolarizing",
    "entropy_exchange",
    "entropy_exchange_explicit",
    "erasure",
    "exchange_matrix",
    "from_json_dict",
    "from_kraus",
    "generalized_pauli",
    "identity",
    "load_kraus",
    "projector",
    "purification",
    "save_kraus",
    "to_json_dict",
    "unitary_channel",
]
