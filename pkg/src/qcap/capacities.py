"""Closed-form capacities and numerical maximization of the quantum mutual
information.

All values are in bits per channel use; :func:`qe_from_ce` returns qubits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channels import QuantumChannel, _apply, choi, entropy_exchange, exchange_matrix
from .qmath import density_matrix, maximally_mixed, von_neumann_entropy
from .shannon import ConvergenceError, binary_entropy, symmetric_divergence

METHODS = ("closed_form", "optimized", "simulated")


class DomainError(ValueError):
    """A formula was evaluated outside the range where it holds."""


def _check(d: int, x: float) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")


def c1_depolarizing(d: int, x: float) -> float:
    """One-shot classical capacity of the ``x``-depolarizing channel.

    Equal to ``log2 d - H_d(1 - x(d-1)/d)``: the channel used in a fixed
    basis is a ``d``-ary symmetric channel with randomization ``x``.
    """
    _check(d, x)
    return symmetric_divergence(d, (1 - x) * (d - 1) / d)


def mr_threshold(d: int) -> float:
    """Smallest ``x`` reachable by measure/re-prepare simulation."""
    return d / (d + 1)


def fccc_mr_depolarizing(d: int, x: float) -> float:
    """Forward classical cost of simulating the channel by measure/re-prepare.

    ``log2 d - H_d(d - x(d - 1/d))``, defined only for ``x >= d/(d+1)``.
    """
    _check(d, x)
    if x < mr_threshold(d) - 1e-15:
        raise DomainError(
            f"measure/re-prepare cannot simulate x={x:g} < d/(d+1)={mr_threshold(d):g}"
        )
    # H_d argument is 1/d + (1 - x)(d^2 - 1)/d
    delta = min((1 - x) * (d * d - 1) / d, (d - 1) / d)
    return symmetric_divergence(d, delta)


def ce_depolarizing(d: int, x: float) -> float:
    """``2 log2 d - H_{d^2}(1 - x(d^2 - 1)/d^2)``."""
    _check(d, x)
    n = d * d
    return symmetric_divergence(n, (1 - x) * (n - 1) / n)


def erasure_capacities(d: int, x: float) -> tuple[float, float, float]:
    """``(C, Q, C_E)`` of the ``d``-dimensional erasure channel."""
    _check(d, x)
    c = (1 - x) * np.log2(d)
    q = max(0.0, 1 - 2 * x) * np.log2(d)
    return float(c), float(q), float(2 * c)


def ce_dephasing(x: float) -> float:
    _check(2, x)
    return 2.0 - binary_entropy(x / 2)


def hashing_bound(ch: QuantumChannel, clamp: bool = False) -> float:
    """``log2 d - S(choi(ch))``; negative values mean the bound is vacuous."""
    if not ch.square:
        raise ValueError("hashing bound needs din == dout")
    val = float(np.log2(ch.din) - von_neumann_entropy(choi(ch)))
    return max(0.0, val) if clamp else val


def qe_from_ce(ce: float) -> float:
    if ce < 0:
        raise ValueError("capacity must be nonnegative")
    return ce / 2


def depolarizing_bounds(d: int, x: float) -> tuple[float, float]:
    """Band ``(C1, min(C_E, (1 - x) log2 d))`` containing the unassisted capacity."""
    _check(d, x)
    upper = min(ce_depolarizing(d, x), (1 - x) * float(np.log2(d)))
    return c1_depolarizing(d, x), upper


def quantum_mutual_information(ch: QuantumChannel, rho) -> float:
    """``S(rho) + S(N(rho)) - S_exchange(N, rho)``."""
    rho = density_matrix(rho)
    if rho.shape[0] != ch.din:
        raise ValueError(f"input has dimension {rho.shape[0]}, channel expects {ch.din}")
    out = _apply(ch.kraus, rho)
    return von_neumann_entropy(rho) + von_neumann_entropy(out) - entropy_exchange(ch, rho)


def _spectral_entropy(m: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(m)
    p = eigs[eigs > 0]
    return float(-np.sum(p * np.log2(p)))


def _qmi_fast(kraus: np.ndarray, rho: np.ndarray) -> float:
    out = _apply(kraus, rho)
    w = exchange_matrix(kraus, rho)
    w = 0.5 * (w + w.conj().T)
    return _spectral_entropy(rho) + _spectral_entropy(out) - _spectral_entropy(w)


# -- Cholesky-style parametrization -----------------------------------------


class _Cholesky:
    """Index bookkeeping for :func:`params_to_rho`, reused across calls."""

    def __init__(self, d: int):
        self.d = d
        self.diag = np.diag_indices(d)
        self.lower = np.tril_indices(d, -1)
        self.n = len(self.lower[0])

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        d, n = self.d, self.n
        low = np.zeros((d, d), dtype=complex)
        low[self.diag] = theta[:d]
        low[self.lower] = theta[d : d + n] + 1j * theta[d + n : d + 2 * n]
        rho = low @ low.conj().T
        tr = rho.trace().real
        if tr <= 1e-300:
            return maximally_mixed(d)
        return rho / tr


def params_to_rho(theta: np.ndarray, d: int) -> np.ndarray:
    """``rho = L L^dag / tr(L L^dag)`` with ``L`` lower triangular.

    ``theta`` holds the ``d`` real diagonal entries followed by real and
    imaginary parts of the strictly-lower entries: ``d**2`` reals in all.
    """
    return _Cholesky(d)(np.asarray(theta, dtype=float))


def rho_to_params(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    # jitter keeps the factorization defined for singular states
    low = np.linalg.cholesky(rho + 1e-14 * np.eye(d))
    il = np.tril_indices(d, -1)
    return np.concatenate([low.diagonal().real, low[il].real, low[il].imag])


@dataclass
class OptimizationResult:
    value: float
    argmax: np.ndarray = field(repr=False)
    restart_values: list[float]
    converged: list[bool]

    @property
    def dispersion(self) -> float:
        """Spread between the best and worst restart."""
        return float(max(self.restart_values) - min(self.restart_values))


def ce_optimize(
    ch: QuantumChannel,
    tol: float = 1e-8,
    restarts: int = 8,
    seed: int = 0,
    xatol: float = 1e-10,
    max_iter: int | None = None,
) -> OptimizationResult:
    """Maximize the quantum mutual information over input states.

    Nelder-Mead on the Cholesky parametrization, started once from the
    maximally mixed state and ``restarts - 1`` times from random factors.
    Each restart draws from its own stream spawned off ``seed``. Concavity is
    not assumed.

    Raises:
        ConvergenceError: if no restart met the tolerances within the cap.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if restarts < 1:
        raise ValueError("need at least one restart")
    d = ch.din
    kraus = ch.kraus
    n = d * d
    cap = max_iter if max_iter is not None else 400 * n

    to_rho = _Cholesky(d)

    def objective(theta):
        return -_qmi_fast(kraus, to_rho(theta))

    streams = np.random.SeedSequence(seed).spawn(restarts)
    starts = [rho_to_params(maximally_mixed(d))]
    for ss in streams[1:]:
        rng = np.random.default_rng(ss)
        starts.append(rng.standard_normal(n))

    options = {"xatol": xatol, "fatol": tol, "maxiter": cap, "maxfev": 2 * cap, "adaptive": n > 4}
    values, converged, states = [], [], []
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead", options=options)
        # restarting from the best vertex rebuilds a collapsed simplex
        for _ in range(2):
            again = minimize(objective, res.x, method="Nelder-Mead", options=options)
            improved = again.fun < res.fun - tol
            if again.fun <= res.fun:
                res = again
            if not improved:
                break
        values.append(-float(res.fun))
        converged.append(bool(res.success))
        states.append(to_rho(res.x))

    if not any(converged):
        raise ConvergenceError(f"no restart converged within {cap} iterations")
    i = int(np.argmax(values))
    return OptimizationResult(float(values[i]), states[i], [float(v) for v in values], converged)


# -- reports ----------------------------------------------------------------

ENTRY_NAMES = (
    "C1", "C_E", "FCCC_MR", "FCCC_Tp", "C_Sd", "Q_hash", "Q_E",
    "C_erasure", "Q_erasure", "CE_erasure",
)


@dataclass(frozen=True)
class CapacityEntry:
    name: str
    value: float
    method: str
    bracket: float = 0.0

    def __post_init__(self):
        if self.name not in ENTRY_NAMES:
            raise ValueError(f"unknown capacity name {self.name!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not np.isfinite(self.value):
            raise ValueError(f"{self.name} is not finite")
        if self.bracket < 0:
            raise ValueError("bracket must be nonnegative")


@dataclass
class CapacityReport:
    channel: str
    entries: list[CapacityEntry] = field(default_factory=list)

    def add(self, name: str, value: float, method: str, bracket: float = 0.0) -> None:
        self.entries.append(CapacityEntry(name, float(value), method, float(bracket)))

    def get(self, name: str) -> CapacityEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "entries": [
                {"name": e.name, "value": e.value, "method": e.method, "bracket": e.bracket}
                for e in self.entries
            ],
        }


__all__ = [
    "CapacityEntry",
    "CapacityReport",
    "DomainError",
    "OptimizationResult",
    "c1_depolarizing",
    "ce_dephasing",
    "ce_depolarizing",
    "ce_optimize",
    "depolarizing_bounds",
    "erasure_capacities",
    "fccc_mr_depolarizing",
    "hashing_bound",
    "mr_threshold",
    "params_to_rho",
    "qe_from_ce",
    "quantum_mutual_information",
    "rho_to_params",
]
