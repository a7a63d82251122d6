"""
Constellations, noise and ML decoding
=====================================

A signature matrix maps every +-1 input vector to a point in R^m. The
receiver sees that point plus Gaussian noise and picks the nearest one.
"""

import numpy as np

from cdmasig import registry
from cdmasig.core import constellation, input_vectors, ml_decode, sigma_from_ebn0, transmit

# The 4x5 all-+-1 matrix from the capacity table: 5 users share 4 chips.
A = registry.get("tabIII.A5").matrix
print(A.entries)
print("loading factor", A.loading_factor)

# 32 inputs give 32 constellation points. Inputs are ordered like binary
# counting, user 1 in the least significant position.
Z = constellation(A)
X = input_vectors(A.n)
print("all-ones input ->", Z[-1])
print("first inputs:\n", X[:4])

# The noise level follows from Eb/N0 and the matrix energy per user bit.
sigma = sigma_from_ebn0(A, 8.0)
print(f"sigma at 8 dB: {sigma:.4f}")

# Send 10000 random blocks and count block errors of the ML decoder.
rng = np.random.default_rng(0)
sent = X[rng.integers(0, len(X), 10_000)]
received = transmit(A, sent, sigma, rng)
decoded = ml_decode(A, received)
block_errors = np.any(decoded != sent, axis=1).mean()
bit_errors = (decoded != sent).mean()
print(f"block error rate {block_errors:.4f}, bit error rate {bit_errors:.4f}")
