"""Classical entropies, discrete memoryless channels, Blahut-Arimoto."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STOCHASTIC_TOL = 1e-10


class ConvergenceError(RuntimeError):
    pass


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def distribution(probs, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > tol:
        raise ValueError(f"not a probability distribution: {p!r}")
    return p


def shannon_entropy(probs) -> float:
    p = distribution(probs)
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def binary_entropy(p: float) -> float:
    p = _check_probability(p)
    return shannon_entropy([p, 1.0 - p])


def h_dary(p: float, d: int) -> float:
    """Entropy of one outcome with probability ``p`` and ``d - 1`` sharing ``1 - p``."""
    p = _check_probability(p)
    if d < 2:
        raise ValueError(f"alphabet size must be at least 2, got {d}")
    h = 0.0
    if p > 0:
        h -= p * np.log2(p)
    if p < 1:
        h -= (1 - p) * np.log2((1 - p) / (d - 1))
    return float(h)


def symmetric_divergence(d: int, delta: float) -> float:
    """``log2 d - h_dary(1/d + delta, d)`` evaluated without cancellation.

    This is the relative entropy of the distribution
    ``(1/d + delta, ...)`` from uniform, with ``0 <= delta <= (d-1)/d``.
    Near ``delta = 0`` the result is second order in ``delta``, so the naive
    difference of two ``O(1)`` numbers loses most of its digits.
    """
    p = 1.0 / d + delta
    q = 1.0 - p
    val = p * np.log1p(d * delta)
    if q > 0:
        val += q * np.log1p(-d * delta / (d - 1))
    return float(max(0.0, val / np.log(2)))


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Row-stochastic matrix ``matrix[i, j] = p(j | i)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError(f"channel matrix must be 2-d and nonempty, got shape {m.shape}")
        if np.any(m < -STOCHASTIC_TOL) or np.any(m > 1 + STOCHASTIC_TOL):
            raise ValueError("channel entries must lie in [0, 1]")
        worst = np.max(np.abs(m.sum(axis=1) - 1.0))
        if worst > STOCHASTIC_TOL:
            raise ValueError(f"rows must sum to 1 (worst deviation {worst:.3e})")
        m = np.clip(m, 0.0, 1.0)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def inputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def outputs(self) -> int:
        return self.matrix.shape[1]

    def then(self, other: "DiscreteChannel") -> "DiscreteChannel":
        """Cascade: this channel followed by ``other``."""
        if other.inputs != self.outputs:
            raise ValueError("alphabet mismatch in channel cascade")
        return DiscreteChannel(self.matrix @ other.matrix)


def noiseless(m: int) -> DiscreteChannel:
    return DiscreteChannel(np.eye(m))


def dary_symmetric(d: int, x: float) -> DiscreteChannel:
    """Symbol replaced by a uniformly random one (possibly itself) w.p. ``x``."""
    x = _check_probability(x, "x")
    return DiscreteChannel((1 - x) * np.eye(d) + x / d)


def binary_symmetric(crossover: float) -> DiscreteChannel:
    f = _check_probability(crossover, "crossover")
    return DiscreteChannel([[1 - f, f], [f, 1 - f]])


def classical_erasure(m: int, x: float) -> DiscreteChannel:
    """``m`` inputs, ``m + 1`` outputs; the last output is the erasure flag."""
    x = _check_probability(x, "x")
    mat = np.zeros((m, m + 1))
    mat[:, :m] = (1 - x) * np.eye(m)
    mat[:, m] = x
    return DiscreteChannel(mat)


def dary_symmetric_capacity(d: int, x: float) -> float:
    """Shannon capacity of :func:`dary_symmetric`, i.e.
    ``log2 d - h_dary(1 - x(d-1)/d, d)``."""
    x = _check_probability(x, "x")
    return symmetric_divergence(d, (1 - x) * (d - 1) / d)


def mutual_information(ch: DiscreteChannel, prior) -> float:
    prior = distribution(prior)
    return float(prior @ _divergences(ch.matrix, prior @ ch.matrix))


def _divergences(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise ``D(p[i] || q)`` in bits, with ``0 log 0 = 0``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p / q), 0.0)
    return terms.sum(axis=1)


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    lower: float
    upper: float
    prior: np.ndarray = field(repr=False)
    iterations: int

    @property
    def bracket(self) -> float:
        return self.upper - self.lower


def blahut_arimoto(ch: DiscreteChannel, tol: float = 1e-9, max_iter: int = 10**6) -> CapacityResult:
    """Capacity of a discrete memoryless channel.

    Starts from the uniform prior and stops once the gap between
    ``max_i D(p_i || q)`` and ``sum_i r_i D(p_i || q)`` is at most ``tol``.
    Inputs whose weight has underflowed to zero are left out of the max.
    The reported capacity is the midpoint of the final bracket.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = ch.matrix
    r = np.full(ch.inputs, 1.0 / ch.inputs)
    for it in range(1, max_iter + 1):
        q = r @ p
        div = _divergences(p, q)
        live = r > 0
        lower = float(r @ div)
        upper = float(div[live].max())
        if upper - lower <= tol:
            cap = 0.5 * (lower + upper)
            cap = min(max(cap, 0.0), np.log2(min(ch.inputs, ch.outputs)))
            return CapacityResult(cap, lower, upper, r, it)
        # multiplicative update, shifted for overflow safety
        w = r * np.exp2(div - upper)
        r = w / w.sum()
    raise ConvergenceError(f"Blahut-Arimoto did not reach tol={tol} in {max_iter} iterations")


def ba_capacity(ch: DiscreteChannel, tol: float = 1e-9, max_iter: int = 10**6) -> float:
    return blahut_arimoto(ch, tol, max_iter).capacity
