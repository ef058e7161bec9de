"""Superdense coding over noisy quantum channels, teleportation over noisy
classical channels, and measure/re-prepare simulation.

Each protocol is reduced to an induced channel (classical for superdense
coding, quantum for the two simulations) so its capacity can be computed
exactly. The ``d**2`` messages are generalized Pauli labels, indexed
``m = a * d + b`` for ``X**a Z**b``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, channel_from_choi, choi_deviation
from .qmath import generalized_pauli, maximally_entangled, pauli_basis, pauli_labels
from .shannon import DiscreteChannel, ba_capacity, dary_symmetric

__all__ = [
    "BellDiagonalReport",
    "bell_basis",
    "c_sd",
    "fccc_tp",
    "generalized_pauli",
    "measure_reprepare",
    "measure_reprepare_mc",
    "pauli_labels",
    "superdense_induced",
    "teleport_induced",
    "verify_bell_diagonal",
]


def bell_basis(d: int) -> np.ndarray:
    """Rows are ``(U_m (x) I)|Psi>`` for the ``d**2`` Pauli labels."""
    psi = maximally_entangled(d).reshape(d, d)
    return (pauli_basis(d) @ psi).reshape(d * d, d * d)


def _channel_dim(ch: QuantumChannel) -> int:
    if ch.dout == ch.din:
        return ch.din
    if ch.dout == ch.din + 1:
        return ch.din
    raise ValueError(
        f"superdense coding needs dout == din or dout == din + 1 (erasure-type), "
        f"got din={ch.din}, dout={ch.dout}"
    )


def superdense_induced(ch: QuantumChannel) -> DiscreteChannel:
    """Classical channel from encoding ``m`` as ``U_m`` on Alice's half of
    ``|Psi>``, sending that half through ``ch`` and measuring in the Bell basis.

    For erasure-type channels (one extra output level, the last basis state)
    the decoder gets one more outcome: the flag on Alice's side, whatever Bob
    holds.
    """
    d = _channel_dim(ch)
    bell = bell_basis(d)  # (d^2 messages, d^2 amplitudes)
    # (K_k (x) I)(U_m (x) I)|Psi> as dout x d matrices: K_k @ U_m @ psi
    encoded = bell.reshape(d * d, d, d)
    out = np.einsum("kab,mbr->mkar", ch.kraus, encoded)  # (m, k, dout, d)
    decoder = bell.reshape(d * d, d, d).conj()
    if ch.dout == d + 1:
        decoder = np.concatenate([decoder, np.zeros((d * d, 1, d))], axis=1)
    amps = np.einsum("nar,mkar->mnk", decoder, out)
    probs = np.sum(np.abs(amps) ** 2, axis=2)
    if ch.dout == d + 1:
        flagged = np.sum(np.abs(out[:, :, d, :]) ** 2, axis=(1, 2))
        probs = np.concatenate([probs, flagged[:, None]], axis=1)
    dev = np.max(np.abs(probs.sum(axis=1) - 1))
    if dev > 1e-9:
        raise ValueError(f"induced channel rows do not sum to 1 (deviation {dev:.3e})")
    return DiscreteChannel(probs / probs.sum(axis=1, keepdims=True))


def c_sd(ch: QuantumChannel, tol: float = 1e-9) -> float:
    return ba_capacity(superdense_induced(ch), tol)


def teleport_induced(cch: DiscreteChannel, d: int) -> QuantumChannel:
    """Quantum channel simulated by teleportation whose classical arm is ``cch``.

    Alice's Bell outcome ``m`` is uniform and leaves Bob holding
    ``U_m^dag xi U_m``; the arm delivers ``n`` with probability ``p(n|m)`` and
    Bob applies ``U_n``. A received erasure flag (output ``d**2``, if present)
    makes Bob output the erasure state, extending the output space to
    ``d + 1``.
    """
    n2 = d * d
    if cch.inputs != n2 or cch.outputs not in (n2, n2 + 1):
        raise ValueError(
            f"classical arm must have {n2} inputs and {n2} or {n2 + 1} outputs, "
            f"got {cch.inputs}x{cch.outputs}"
        )
    flagged = cch.outputs == n2 + 1
    dout = d + 1 if flagged else d
    paulis = pauli_basis(d)
    p = cch.matrix
    psi = maximally_entangled(d).reshape(d, d)
    # net Kraus U_n U_m^dag with weight p(n|m) / d^2
    net = np.einsum("nab,mcb->mnac", paulis, paulis.conj())
    w = p[:, :n2] / n2
    vecs = (np.sqrt(w)[:, :, None, None] * (net @ psi)).reshape(n2 * n2, d * d)
    j = np.zeros((dout * d, dout * d), dtype=complex)
    jd = vecs.T @ vecs.conj()
    if flagged:
        j4 = j.reshape(dout, d, dout, d)
        j4[:d, :, :d, :] = jd.reshape(d, d, d, d)
        # erasure branch: |e><e| (x) I/d, weighted by the mean flag probability
        j4[d, :, d, :] = p[:, n2].mean() * np.eye(d) / d
        j = j4.reshape(dout * d, dout * d)
    else:
        j = jd
    return channel_from_choi(j, d, dout, "teleport_induced")


def fccc_tp(cch: DiscreteChannel, tol: float = 1e-9) -> float:
    """Shannon capacity of the classical arm used in the teleportation."""
    return ba_capacity(cch, tol)


@dataclass(frozen=True)
class BellDiagonalReport:
    passed: bool
    choi_deviation: float
    c_sd: float
    fccc_tp: float
    tol: float

    @property
    def capacity_gap(self) -> float:
        return abs(self.c_sd - self.fccc_tp)

    @property
    def ce(self) -> float | None:
        """Entanglement-assisted capacity when the two bounds meet, else ``None``."""
        return self.c_sd if self.passed else None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "choi_deviation": self.choi_deviation,
            "c_sd": self.c_sd,
            "fccc_tp": self.fccc_tp,
            "capacity_gap": self.capacity_gap,
            "tol": self.tol,
        }


def verify_bell_diagonal(ch: QuantumChannel, tol: float = 1e-9) -> BellDiagonalReport:
    """Check that teleporting through the superdense-induced channel gives
    back ``ch``, so the superdense lower bound and teleportation upper bound
    coincide."""
    if not ch.square:
        raise ValueError("Bell-diagonal check needs a square channel")
    cch = superdense_induced(ch)
    back = teleport_induced(cch, ch.din)
    dev = choi_deviation(back, ch)
    lower = ba_capacity(cch, min(tol, 1e-9))
    upper = fccc_tp(cch, min(tol, 1e-9))
    passed = dev <= tol and abs(lower - upper) <= tol
    return BellDiagonalReport(passed, dev, lower, upper, tol)


def mr_arm_noise(d: int, x: float) -> float:
    """Randomization of the ``d``-ary arm needed to simulate ``x``-depolarizing."""
    if x < d / (d + 1) - 1e-15:
        raise ValueError(f"x={x:g} is below the measure/re-prepare threshold d/(d+1)")
    return min(1.0, max(0.0, 1 - (1 - x) * (d + 1)))


def measure_reprepare(d: int, r: float) -> QuantumChannel:
    """Haar-averaged measure/re-prepare channel with a ``d``-ary symmetric arm.

    Averaging over bases uses the second moment of a Haar-random vector,
    ``E[|b><b| (x) |b><b|] = (I + SWAP) / (d (d + 1))``, which gives
    ``xi -> (1 - r)(xi + tr(xi) I)/(d + 1) + r tr(xi) I/d``.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    psi = maximally_entangled(d)
    ident = np.eye(d * d, dtype=complex) / (d * d)
    j = (1 - r) * (np.outer(psi, psi.conj()) + d * ident) / (d + 1) + r * ident
    return channel_from_choi(j, d, d, f"measure_reprepare(d={d}, r={r:g})")


def _haar_bases(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unitaries, shape ``(n, d, d)``."""
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def _mr_choi_chunk(d: int, r: float, samples: int, seed: np.random.SeedSequence,
                   batch: int = 8192) -> np.ndarray:
    rng = np.random.default_rng(seed)
    arm = dary_symmetric(d, r).matrix
    acc = np.zeros((d * d, d * d), dtype=complex)
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        b = np.swapaxes(_haar_bases(d, n, rng), 1, 2)  # b[s, j] is basis vector j
        out = b[..., :, None] * b.conj()[..., None, :]  # |b_j><b_j|
        ref = out.conj()  # |conj b_k><conj b_k|
        # (1/d) sum_{j,k} p(j|k) |b_j><b_j| (x) conj(|b_k><b_k|)
        mixed = np.einsum("kj,sjab->skab", arm, out)
        acc += np.einsum("skab,skcd->acbd", mixed, ref).reshape(d * d, d * d)
        done += n
    return acc / d


def measure_reprepare_mc(d: int, r: float, samples: int, seed: int = 0, workers: int = 1) -> np.ndarray:
    """Monte Carlo estimate of the measure/re-prepare Choi state.

    Samples are split across ``workers`` chunks with independent streams
    spawned from ``seed``; the result is bit-reproducible for a fixed
    ``(seed, workers)`` pair.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    workers = max(1, min(workers, samples))
    sizes = [samples // workers + (i < samples % workers) for i in range(workers)]
    seeds = np.random.SeedSequence(seed).spawn(workers)
    if workers == 1:
        parts = [_mr_choi_chunk(d, r, sizes[0], seeds[0])]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _mr_choi_chunk(d, r, *a), zip(sizes, seeds)))
    total = np.zeros((d * d, d * d), dtype=complex)
    for part in parts:
        total += part
    return total / samples
