"""
Objective functions for signature matrices.

Five criteria are provided:

- ``capacity``: Monte-Carlo estimate of the sum capacity ``I(X; Y)`` in bits
  under uniform binary input.
- ``ber``: simulated bit error rate of the exhaustive ML decoder.
- ``md``: minimum distance between constellation points.
- ``qd``: pairwise sum of Gaussian tail probabilities (union bound on block
  error, scaled by ``2**n``).
- ``ed``: ``qd`` with the tail replaced by an exponential fit.

Capacity and BER are stochastic but seeded: repeated calls with the same
spec give identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import erfc, logsumexp

from .core import (
    CdmaError,
    ChannelParams,
    as_matrix,
    constellation,
    ml_decode_index,
)

__all__ = [
    "Criterion",
    "Direction",
    "CriterionSpec",
    "CriterionValue",
    "DEFAULT_SEARCH_SAMPLES",
    "DEFAULT_REPORT_SAMPLES",
    "DEFAULT_BER_BITS",
    "mixture_logpdf",
    "mixture_pdf",
    "capacity",
    "per_user_capacity",
    "ber",
    "qfunc",
    "q_approx",
    "md",
    "qd",
    "ed",
    "evaluate",
]

DEFAULT_SEARCH_SAMPLES = 20_000
DEFAULT_REPORT_SAMPLES = 200_000
DEFAULT_BER_BITS = 1_000_000

_LOG2E = 1.0 / math.log(2.0)
# bound on (samples x constellation points) held in memory at once
_MC_CHUNK = 1 << 21


class Direction(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Criterion(str, Enum):
    CAPACITY = "capacity"
    BER = "ber"
    MD = "md"
    QD = "qd"
    ED = "ed"

    @property
    def direction(self) -> Direction:
        if self in (Criterion.CAPACITY, Criterion.MD):
            return Direction.MAXIMIZE
        return Direction.MINIMIZE

    @property
    def stochastic(self) -> bool:
        return self in (Criterion.CAPACITY, Criterion.BER)


@dataclass(frozen=True)
class CriterionSpec:
    """
    What to evaluate and how.

    ``mc_samples`` is the number of channel draws for capacity and the bit
    budget for BER; it is ignored by the distance criteria.
    """

    kind: Criterion
    channel: ChannelParams | None = None
    mc_samples: int = DEFAULT_SEARCH_SAMPLES
    seed: int = 0

    def __post_init__(self):
        kind = Criterion(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is not Criterion.MD and self.channel is None:
            raise CdmaError(f"{kind.value} criterion needs a channel")
        if kind.stochastic and self.mc_samples < 1000:
            raise CdmaError("Monte-Carlo criteria need at least 1000 samples")

    @property
    def ebn0_db(self) -> float | None:
        return None if self.channel is None else self.channel.eb_n0_db

    def with_samples(self, mc_samples: int, seed: int | None = None) -> "CriterionSpec":
        return replace(self, mc_samples=mc_samples, seed=self.seed if seed is None else seed)


@dataclass(frozen=True)
class CriterionValue:
    value: float
    std_error: float
    direction: Direction
    samples: int = 0

    def __float__(self):
        return float(self.value)


def _sigma(A, channel) -> float:
    if isinstance(channel, ChannelParams):
        sigma = channel.sigma_for(A)
    else:
        sigma = float(channel)
    if not sigma > 0:
        raise CdmaError("noise standard deviation must be positive")
    return sigma


def _mixture_logpdf_points(points: np.ndarray, sigma: float, y: np.ndarray) -> np.ndarray:
    # natural-log density of the equal-weight Gaussian mixture centred on ``points``
    K, m = points.shape
    const = -math.log(K) - 0.5 * m * math.log(2.0 * math.pi * sigma * sigma)
    zz = np.einsum("ij,ij->i", points, points)
    out = np.empty(len(y))
    step = max(1, _MC_CHUNK // K)
    for start in range(0, len(y), step):
        yc = y[start:start + step]
        d2 = np.einsum("ij,ij->i", yc, yc)[:, np.newaxis] - 2.0 * yc @ points.T + zz
        np.maximum(d2, 0.0, out=d2)
        out[start:start + step] = logsumexp(-d2 / (2.0 * sigma * sigma), axis=1)
    return out + const


def mixture_logpdf(A, channel, y) -> np.ndarray | float:
    """Natural log of the output density ``f_Y(y)``; accepts one vector or a batch."""
    A = as_matrix(A)
    sigma = _sigma(A, channel)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    if y.shape[-1] != A.shape[0]:
        raise CdmaError(f"output length {y.shape[-1]} does not match {A.shape[0]} chips")
    out = _mixture_logpdf_points(constellation(A), sigma, y)
    return float(out[0]) if single else out


def mixture_pdf(A, channel, y):
    """
    Output density of ``Y = A X + N`` for uniform binary ``X``.

    Evaluated in the log domain, so it stays positive far from the
    constellation where the direct sum would underflow (it can still
    round to zero on conversion back for extreme ``y``).
    """
    return np.exp(mixture_logpdf(A, channel, y))


def _capacity_samples(A: np.ndarray, sigma: float, samples: int, seed: int) -> np.ndarray:
    """
    Per-draw log-likelihood ratios ``log2 f(y|x) - log2 f(y)``.

    Their mean estimates ``h(Y) - h(N)``; pairing each output with its own
    noise draw cancels the noise-entropy fluctuation, so the estimate tends
    to exactly ``n`` bits at high SNR instead of carrying noise of order
    ``sqrt(m / samples)``.
    """
    m, n = A.shape
    points = constellation(A)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(points), size=samples)
    noise = rng.standard_normal((samples, m)) * sigma
    y = points[idx] + noise
    log_cond = (
        -0.5 * np.einsum("ij,ij->i", noise, noise) / (sigma * sigma)
        - 0.5 * m * math.log(2.0 * math.pi * sigma * sigma)
    )
    log_marg = _mixture_logpdf_points(points, sigma, y)
    return (log_cond - log_marg) * _LOG2E


def capacity(A, spec: CriterionSpec) -> CriterionValue:
    """
    Sum capacity ``C(n, m, sigma | A)`` in bits, by Monte Carlo.

    Draws ``spec.mc_samples`` uniform inputs and noise vectors and averages
    the log-likelihood ratio between the channel law and the output
    mixture density. ``std_error`` is the standard error of that mean.
    """
    if spec.kind is not Criterion.CAPACITY:
        raise CdmaError(f"expected a capacity spec, got {spec.kind.value}")
    A = as_matrix(A)
    sigma = _sigma(A, spec.channel)
    s = _capacity_samples(A, sigma, spec.mc_samples, spec.seed)
    se = float(s.std(ddof=1) / math.sqrt(len(s)))
    return CriterionValue(float(s.mean()), se, Direction.MAXIMIZE, len(s))


def per_user_capacity(A, spec: CriterionSpec) -> CriterionValue:
    c = capacity(A, spec)
    n = as_matrix(A).shape[1]
    return CriterionValue(c.value / n, c.std_error / n, c.direction, c.samples)


def ber(A, spec: CriterionSpec) -> CriterionValue:
    """
    Bit error rate of exhaustive ML decoding, simulated over
    ``ceil(mc_samples / n)`` random blocks.
    """
    if spec.kind is not Criterion.BER:
        raise CdmaError(f"expected a BER spec, got {spec.kind.value}")
    A = as_matrix(A)
    m, n = A.shape
    sigma = _sigma(A, spec.channel)
    blocks = -(-spec.mc_samples // n)
    points = constellation(A)
    rng = np.random.default_rng(spec.seed)
    idx = rng.integers(0, len(points), size=blocks)
    y = points[idx] + sigma * rng.standard_normal((blocks, m))
    decided = ml_decode_index(A, y, points)
    # differing bits between sent and decided input indices
    diff = np.bitwise_xor(idx, decided)
    errors = int(sum(int(np.count_nonzero((diff >> j) & 1)) for j in range(n)))
    bits = blocks * n
    p = errors / bits
    return CriterionValue(p, math.sqrt(p * (1.0 - p) / bits), Direction.MINIMIZE, bits)


def qfunc(x):
    """Gaussian tail probability ``Q(x) = P(N(0, 1) > x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def q_approx(x):
    """Exponential fit to the Gaussian tail, ``0.7 exp(-((x + 1) / 1.6)**2)``."""
    x = np.asarray(x, dtype=float)
    return 0.7 * np.exp(-(((x + 1.0) / 1.6) ** 2))


def _half_points(A: np.ndarray) -> np.ndarray:
    # inputs with the last user at +1; the other half is their negation
    Z = constellation(A)
    return Z[len(Z) // 2:]


def _pair_distances(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Distances covering every unordered pair of constellation points.

    With ``H`` one half of the constellation and ``-H`` the other, pairs
    inside ``-H`` repeat those inside ``H`` and cross pairs are
    ``||h_i + h_j||``. Returns ``(within, cross)``: ``within`` holds the
    ``|H|(|H|-1)/2`` pairs inside ``H`` (each occurring twice in the full
    constellation), ``cross`` the ``|H|**2`` ordered cross terms (each once).
    """
    H = _half_points(A)
    within = pdist(H) if len(H) > 1 else np.empty(0)
    cross = cdist(H, -H).ravel()
    return within, cross


def md(A) -> CriterionValue:
    """Minimum Euclidean distance between distinct-input constellation points."""
    A = as_matrix(A)
    if A.shape[1] < 1:
        raise CdmaError("matrix has no users")
    within, cross = _pair_distances(A)
    value = float(min(within.min(initial=np.inf), cross.min()))
    return CriterionValue(value, 0.0, Direction.MAXIMIZE)


def _ordered_pair_sum(A: np.ndarray, sigma: float, fn) -> float:
    # sum of fn(d / (2 sigma)) over ordered pairs i != j of the full constellation
    within, cross = _pair_distances(A)
    scale = 2.0 * sigma
    return float(4.0 * np.sum(fn(within / scale)) + 2.0 * np.sum(fn(cross / scale)))


def qd(A, channel, tail=qfunc) -> CriterionValue:
    """
    ``sum_{i != j} Q(||Z_i - Z_j|| / (2 sigma))`` over ordered pairs.

    ``tail`` replaces the Gaussian tail function, e.g. with :func:`q_approx`.
    """
    A = as_matrix(A)
    sigma = _sigma(A, channel)
    return CriterionValue(_ordered_pair_sum(A, sigma, tail), 0.0, Direction.MINIMIZE)


def _ed_term(x):
    return np.exp(-(((x + 1.0) / 1.6) ** 2))


def ed(A, channel) -> CriterionValue:
    """Exponential distance: :func:`qd` with ``Q(x)`` replaced by ``exp(-((x+1)/1.6)**2)``."""
    A = as_matrix(A)
    sigma = _sigma(A, channel)
    return CriterionValue(_ordered_pair_sum(A, sigma, _ed_term), 0.0, Direction.MINIMIZE)


def evaluate(A, spec: CriterionSpec) -> CriterionValue:
    """Dispatch on ``spec.kind``."""
    kind = spec.kind
    if kind is Criterion.CAPACITY:
        return capacity(A, spec)
    if kind is Criterion.BER:
        return ber(A, spec)
    if kind is Criterion.MD:
        return md(A)
    if kind is Criterion.QD:
        return qd(A, spec.channel)
    return ed(A, spec.channel)
