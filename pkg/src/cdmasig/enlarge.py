"""
Kronecker enlargement of signature matrices.

A small ``m x n`` matrix ``A`` and a ``k x k`` generator ``G`` with unit-norm
columns give the ``km x kn`` matrix ``B = G (x) A``. When ``G`` is unitary
the sum capacity of ``B`` is exactly ``k`` times that of ``A`` at the same
noise level; otherwise it is strictly smaller. Normalized Sylvester-Hadamard
matrices are used as unitary generators.

Decoding an enlarged matrix only needs the base constellation: applying
``G^-1 (x) I_m`` to the received vector leaves ``k`` independent copies of
the base channel, each decoded by exhaustive ML against ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Alphabet,
    CdmaError,
    ChannelParams,
    SignatureMatrix,
    as_matrix,
    constellation,
    ml_decode_index,
    index_to_input,
)
from .criteria import Criterion, CriterionSpec, capacity

__all__ = [
    "EnlargementPlan",
    "Theorem1Report",
    "kronecker",
    "hadamard_generator",
    "check_generator",
    "enlarge",
    "tensor_decode",
    "verify_theorem1",
    "decoder_complexity",
]


def kronecker(G, A) -> np.ndarray:
    """Kronecker product: block ``(i, j)`` of the result is ``G[i, j] * A``."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    A = as_matrix(A)
    p, q = G.shape
    m, n = A.shape
    # (p, m, q, n) layout flattens row-major into the block matrix
    return (G[:, np.newaxis, :, np.newaxis] * A[np.newaxis, :, np.newaxis, :]).reshape(p * m, q * n)


def _is_power_of_two(k: int) -> bool:
    return isinstance(k, (int, np.integer)) and k > 0 and (k & (k - 1)) == 0


def hadamard_generator(k: int) -> np.ndarray:
    """
    Sylvester-Hadamard matrix of order ``k`` scaled by ``1/sqrt(k)``.

    The result is orthogonal. ``k`` must be a power of two. Built as
    repeated products with the normalized order-2 matrix, so
    ``hadamard_generator(2 k) == kronecker(hadamard_generator(2), hadamard_generator(k))``
    holds exactly in floating point.
    """
    if not _is_power_of_two(k):
        raise CdmaError(f"Hadamard order must be a power of two, got {k}")
    H = np.ones((1, 1))
    H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    while H.shape[0] < k:
        H = kronecker(H2, H)
    return H


def check_generator(G, atol: float = 1e-9) -> np.ndarray:
    """Validate a square, invertible generator with unit-norm columns."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise CdmaError(f"generator must be square, got shape {G.shape}")
    norms = np.linalg.norm(G, axis=0)
    if not np.allclose(norms, 1.0, rtol=0.0, atol=atol):
        raise CdmaError("generator columns must have unit Euclidean norm")
    if abs(np.linalg.det(G)) < 1e-12:
        raise CdmaError("generator is singular")
    return G


def _is_unitary(G: np.ndarray, atol: float = 1e-10) -> bool:
    return np.allclose(G.T @ G, np.eye(len(G)), rtol=0.0, atol=atol)


@dataclass(frozen=True)
class EnlargementPlan:
    base: SignatureMatrix
    generator: np.ndarray
    enlarged: SignatureMatrix
    generator_kind: str = "hadamard"

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def unitary(self) -> bool:
        return _is_unitary(self.generator)

    @classmethod
    def from_generator(cls, base, G, generator_kind: str = "custom") -> "EnlargementPlan":
        if not isinstance(base, SignatureMatrix):
            base = SignatureMatrix(as_matrix(base), check_bounds=False)
        G = check_generator(G)
        if len(G) == 1 and G[0, 0] == 1.0:
            enlarged = base
        else:
            enlarged = SignatureMatrix(kronecker(G, base.entries), Alphabet.REAL, check_bounds=False)
        G = G.copy()
        G.setflags(write=False)
        return cls(base, G, enlarged, generator_kind)

    def to_dict(self) -> dict:
        out = {"base": self.base.to_dict(), "k": self.k, "generator": self.generator_kind}
        if self.generator_kind != "hadamard":
            out["generator_entries"] = [float(v) for v in self.generator.ravel()]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EnlargementPlan":
        base = SignatureMatrix.from_dict(data["base"])
        k = int(data["k"])
        kind = data.get("generator", "hadamard")
        if kind == "hadamard":
            return enlarge(base, k)
        G = np.reshape([float(v) for v in data["generator_entries"]], (k, k))
        return cls.from_generator(base, G, kind)


def enlarge(A, k: int) -> EnlargementPlan:
    """Enlarge ``A`` by the normalized Hadamard generator of order ``k``."""
    return EnlargementPlan.from_generator(A, hadamard_generator(k), "hadamard")


def tensor_decode(plan: EnlargementPlan, Y) -> np.ndarray:
    """
    Decode received vector(s) of an enlarged matrix block by block.

    ``Y`` has length ``k*m`` (or shape ``(N, k*m)``). The transform
    ``(G^-1 (x) I_m) Y`` is applied, each length-m segment is ML-decoded
    against the base matrix and the ``k`` decisions are concatenated.
    """
    A = plan.base.entries
    m, n = A.shape
    k = plan.k
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    Y = np.atleast_2d(Y)
    if Y.shape[-1] != k * m:
        raise CdmaError(f"received length {Y.shape[-1]} does not match enlarged size {k * m}")
    G = plan.generator
    Ginv = G.T if plan.unitary else np.linalg.inv(G)
    # segments: (N, k, m); transform mixes segments only
    Z = np.einsum("ij,njm->nim", Ginv, Y.reshape(len(Y), k, m))
    points = constellation(A)
    idx = ml_decode_index(A, Z.reshape(-1, m), points).reshape(len(Y), k)
    X = index_to_input(idx, n).reshape(len(Y), k * n)
    return X[0] if single else X


@dataclass(frozen=True)
class Theorem1Report:
    lhs: float
    lhs_error: float
    rhs: float
    rhs_error: float
    sigma_n: float
    k: int
    unitary: bool

    @property
    def combined_error(self) -> float:
        return math.hypot(self.lhs_error, self.rhs_error)

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        """The inequality ``lhs <= rhs`` within three combined standard errors."""
        return self.lhs <= self.rhs + 3.0 * self.combined_error


def verify_theorem1(
    A,
    G,
    channel,
    mc_samples: int = 200_000,
    seed: int = 0,
    max_users: int = 12,
) -> Theorem1Report:
    """
    Estimate ``C(kn, km, sigma | G (x) A)`` and ``k C(n, m, sigma | A)``.

    The noise level is that of ``channel`` evaluated on ``A`` (a unitary
    generator leaves the energy per bit unchanged). Both sides use
    independent random streams so their errors add in quadrature.
    """
    A = as_matrix(A)
    G = check_generator(G)
    k = len(G)
    if k * A.shape[1] > max_users:
        raise CdmaError(f"enlarged matrix has {k * A.shape[1]} users, above the limit of {max_users}")
    sigma = channel.sigma_for(A) if isinstance(channel, ChannelParams) else float(channel)
    fixed = ChannelParams.fixed(sigma)
    lhs_seed, rhs_seed = np.random.SeedSequence(seed).generate_state(2)
    B = kronecker(G, A)
    lhs = capacity(B, CriterionSpec(Criterion.CAPACITY, fixed, mc_samples, int(lhs_seed)))
    rhs = capacity(A, CriterionSpec(Criterion.CAPACITY, fixed, mc_samples, int(rhs_seed)))
    return Theorem1Report(
        lhs=lhs.value,
        lhs_error=lhs.std_error,
        rhs=k * rhs.value,
        rhs_error=k * rhs.std_error,
        sigma_n=sigma,
        k=k,
        unitary=_is_unitary(G),
    )


def decoder_complexity(plan: EnlargementPlan, mode: str = "tensor") -> int:
    """
    Number of Euclidean distance evaluations per decoded block.

    ``naive`` is exhaustive ML on the enlarged matrix (``2**(k n)``
    candidates); ``tensor`` is exhaustive ML per segment (``k * 2**n``).
    """
    n = plan.base.n
    k = plan.k
    if mode == "naive":
        return 2 ** (k * n)
    if mode == "tensor":
        return k * 2 ** n
    raise CdmaError(f"unknown decoder mode {mode!r}")
