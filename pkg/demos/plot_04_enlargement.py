"""
Enlarging a matrix with a Hadamard generator
============================================

``G (x) A`` with a normalized Hadamard ``G`` keeps the loading factor and
the per-user capacity of ``A``, and it decodes segment by segment.
"""

import numpy as np

from cdmasig import registry
from cdmasig.core import ChannelParams
from cdmasig.enlarge import decoder_complexity, enlarge, tensor_decode, verify_theorem1

A4 = registry.get("tabIII.A4").matrix
plan = enlarge(A4, 2)
print(plan.enlarged.shape, "loading factor", plan.enlarged.loading_factor)

# A received 8-vector for the 8x10 matrix, decoded with two 4x5 decoders.
y = np.array([-1.4586, -0.5227, -0.8251, -1.3148, 0.9584, -0.1522, 3.7170, 2.0180])
print("decoded:", tensor_decode(plan, y).astype(int))

# Sum capacity of the enlarged matrix against twice that of the base.
report = verify_theorem1(A4, plan.generator, ChannelParams.at_ebn0(8.0), mc_samples=50_000)
print(f"C(B) = {report.lhs:.4f} +- {report.lhs_error:.4f}, 2 C(A) = {report.rhs:.4f} +- {report.rhs_error:.4f}")

# A unit-column generator that is not orthogonal loses capacity.
skew = np.array([[1.0, 0.6], [0.0, 0.8]])
loss = verify_theorem1([[1.0]], skew, 0.7, mc_samples=50_000)
print(f"non-unitary: {loss.lhs:.4f} < {loss.rhs:.4f}")

big = enlarge(A4, 16)
print(big.enlarged.shape, "tensor decoder:", decoder_complexity(big, "tensor"),
      "distances per block, exhaustive:", decoder_complexity(big, "naive"))
