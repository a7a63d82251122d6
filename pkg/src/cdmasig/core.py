"""
Binary-input CDMA system model.

A signature matrix ``A`` (m chips by n users) maps an antipodal input
vector ``X`` to the received vector ``Y = A X + N`` where ``N`` is white
Gaussian noise with per-chip standard deviation ``sigma_n``.

Input vectors are enumerated in a fixed order: index ``i`` maps to the
vector whose user ``j`` (0-based) is ``+1`` when bit ``j`` of ``i`` is set
and ``-1`` otherwise. Constellations, decoders and serialized results all
use this order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

__all__ = [
    "Alphabet",
    "SignatureMatrix",
    "ChannelParams",
    "CdmaError",
    "ConstellationSizeError",
    "MatrixFormatError",
    "MAX_USERS",
    "as_matrix",
    "input_vectors",
    "index_to_input",
    "input_to_index",
    "constellation",
    "transmit",
    "ml_decode_index",
    "ml_decode",
    "signal_energy_per_bit",
    "sigma_from_ebn0",
    "loading_factor",
    "load_matrix",
    "save_matrix",
]

#: Largest number of users for which a full constellation is built.
MAX_USERS = 26

# decoder chunking: bound on (received vectors x candidates) per block
_DECODE_CHUNK = 1 << 22


class CdmaError(ValueError):
    """Base class for invalid inputs to the CDMA model."""


class ConstellationSizeError(CdmaError):
    """Raised when 2**n constellation points would exceed the configured limit."""


class MatrixFormatError(CdmaError):
    """Raised for malformed matrix files or invalid matrix entries."""


class Alphabet(str, Enum):
    REAL = "real"
    BINARY = "binary"


@dataclass(frozen=True)
class SignatureMatrix:
    """
    An ``m x n`` spreading matrix with its entry alphabet.

    Real matrices have entries in ``[-1, 1]``; binary matrices have entries
    in ``{-1, +1}``. Enlarged matrices (see :mod:`cdmasig.enlarge`) may carry
    scaled entries and are built with ``check_bounds=False``.
    """

    entries: np.ndarray
    alphabet: Alphabet = Alphabet.REAL
    check_bounds: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise MatrixFormatError(f"signature matrix must be 2-D and non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise MatrixFormatError("signature matrix has non-finite entries")
        alphabet = Alphabet(self.alphabet)
        if alphabet is Alphabet.BINARY:
            if not np.all(np.abs(arr) == 1.0):
                raise MatrixFormatError("binary signature matrix entries must be -1 or +1")
        elif self.check_bounds and np.any(np.abs(arr) > 1.0):
            raise MatrixFormatError("real signature matrix entries must lie in [-1, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "alphabet", alphabet)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def loading_factor(self) -> float:
        return self.n / self.m

    @property
    def overloaded(self) -> bool:
        return self.n > self.m

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, SignatureMatrix):
            return NotImplemented
        return self.alphabet is other.alphabet and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.alphabet, self.entries.shape, self.entries.tobytes()))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "alphabet": self.alphabet.value,
            "entries": [float(v) for v in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SignatureMatrix":
        try:
            m, n = int(data["m"]), int(data["n"])
            alphabet = Alphabet(data.get("alphabet", "real"))
            entries = [float(v) for v in data["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise MatrixFormatError(f"malformed matrix object: {exc}") from exc
        if m < 1 or n < 1:
            raise MatrixFormatError(f"matrix dimensions must be positive, got {m}x{n}")
        if len(entries) != m * n:
            raise MatrixFormatError(f"expected {m * n} entries for a {m}x{n} matrix, got {len(entries)}")
        return cls(np.reshape(entries, (m, n)), alphabet)


def as_matrix(A) -> np.ndarray:
    """Return the entries of ``A`` as a float 2-D array (no copy when possible)."""
    if isinstance(A, SignatureMatrix):
        return A.entries
    arr = np.asarray(A, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise CdmaError(f"signature matrix must be 2-D, got shape {arr.shape}")
    return arr


def loading_factor(A) -> float:
    m, n = as_matrix(A).shape
    return n / m


def input_vectors(n: int, max_users: int = MAX_USERS) -> np.ndarray:
    """All ``2**n`` antipodal input vectors in canonical order, shape ``(2**n, n)``."""
    if n < 1:
        raise CdmaError("number of users must be positive")
    if n > max_users:
        raise ConstellationSizeError(
            f"2**{n} input vectors exceed the limit of 2**{max_users}; raise max_users explicitly"
        )
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, np.newaxis] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(float)


def index_to_input(index, n: int) -> np.ndarray:
    index = np.asarray(index, dtype=np.int64)
    bits = (index[..., np.newaxis] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(float)


def input_to_index(X) -> np.ndarray:
    X = np.asarray(X)
    n = X.shape[-1]
    bits = (X > 0).astype(np.int64)
    return (bits << np.arange(n, dtype=np.int64)).sum(axis=-1)


def constellation(A, max_users: int = MAX_USERS) -> np.ndarray:
    """
    Noiseless output points ``Z_i = A X_i`` for every input vector.

    Returns
    -------
    ndarray, shape (2**n, m)
        Row ``i`` is the point for input index ``i``.
    """
    A = as_matrix(A)
    return input_vectors(A.shape[1], max_users) @ A.T


def _check_inputs(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != A.shape[1]:
        raise CdmaError(f"input length {X.shape[-1]} does not match {A.shape[1]} users")
    if not np.all(np.abs(X) == 1.0):
        raise CdmaError("input entries must be -1 or +1")
    return X


def transmit(A, X, sigma_n: float, rng: np.random.Generator) -> np.ndarray:
    """
    Pass inputs through the AWGN channel.

    ``X`` may be a single vector of length n or a batch of shape ``(N, n)``;
    the result has matching leading shape with m columns.
    """
    A = as_matrix(A)
    X = _check_inputs(A, X)
    if sigma_n < 0:
        raise CdmaError("noise standard deviation must be non-negative")
    clean = X @ A.T
    if sigma_n == 0:
        return clean
    return clean + sigma_n * rng.standard_normal(clean.shape)


def ml_decode_index(A, Y, points: np.ndarray | None = None) -> np.ndarray:
    """
    Index of the nearest constellation point for each received vector.

    Ties resolve to the lowest input index. ``points`` can pass a
    precomputed constellation of ``A``.
    """
    A = as_matrix(A)
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    Y = np.atleast_2d(Y)
    if Y.shape[-1] != A.shape[0]:
        raise CdmaError(f"received length {Y.shape[-1]} does not match {A.shape[0]} chips")
    Z = constellation(A) if points is None else points
    out = np.empty(len(Y), dtype=np.int64)
    step = max(1, _DECODE_CHUNK // len(Z))
    for start in range(0, len(Y), step):
        y = Y[start:start + step]
        d2 = ((y[:, np.newaxis, :] - Z[np.newaxis, :, :]) ** 2).sum(axis=-1)
        out[start:start + step] = np.argmin(d2, axis=1)
    return out[0] if single else out


def ml_decode(A, Y, points: np.ndarray | None = None) -> np.ndarray:
    """Maximum-likelihood (minimum Euclidean distance) estimate of the input vector(s)."""
    n = as_matrix(A).shape[1]
    return index_to_input(ml_decode_index(A, Y, points), n)


def signal_energy_per_bit(A) -> float:
    """Average transmitted energy per user bit, ``||A||_F**2 / n``."""
    A = as_matrix(A)
    return float(np.sum(A * A)) / A.shape[1]


def sigma_from_ebn0(A, eb_n0_db: float) -> float:
    """
    Per-chip noise standard deviation for a given Eb/N0 in dB.

    Uses ``sigma_n**2 = Eb / (2 * 10**(eb_n0_db / 10))`` with
    ``Eb = ||A||_F**2 / n`` (noise variance N0/2 per chip).
    """
    if not math.isfinite(eb_n0_db):
        raise CdmaError("Eb/N0 must be finite")
    eb = signal_energy_per_bit(A)
    if eb <= 0:
        raise CdmaError("zero signature matrix has no signal energy")
    return math.sqrt(eb / (2.0 * 10.0 ** (eb_n0_db / 10.0)))


@dataclass(frozen=True)
class ChannelParams:
    """
    AWGN channel description.

    Either a fixed ``sigma_n`` or an ``eb_n0_db`` from which the noise level
    is derived per matrix (so matrices of different norm are compared at the
    same energy per bit). When both are given ``sigma_n`` wins.
    """

    eb_n0_db: float | None = None
    sigma_n: float | None = None

    def __post_init__(self):
        if self.eb_n0_db is None and self.sigma_n is None:
            raise CdmaError("channel needs eb_n0_db or sigma_n")
        if self.sigma_n is not None and not self.sigma_n > 0:
            raise CdmaError("sigma_n must be positive")
        if self.eb_n0_db is not None and not math.isfinite(self.eb_n0_db):
            raise CdmaError("eb_n0_db must be finite")

    @classmethod
    def fixed(cls, sigma_n: float) -> "ChannelParams":
        return cls(sigma_n=float(sigma_n))

    @classmethod
    def at_ebn0(cls, eb_n0_db: float) -> "ChannelParams":
        return cls(eb_n0_db=float(eb_n0_db))

    def sigma_for(self, A) -> float:
        if self.sigma_n is not None:
            return float(self.sigma_n)
        return sigma_from_ebn0(A, self.eb_n0_db)


def load_matrix(path) -> SignatureMatrix:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise MatrixFormatError(f"{path}: expected a JSON object")
    return SignatureMatrix.from_dict(data)


def save_matrix(matrix: SignatureMatrix, path) -> None:
    Path(path).write_text(json.dumps(matrix.to_dict(), indent=2) + "\n")
