"""
Signature matrix design for overloaded binary-input CDMA.

Modules
-------
core
    System model: matrices, constellations, AWGN channel, ML decoding.
criteria
    Sum capacity, BER and constellation-distance objectives.
optimize
    Genetic algorithm and particle swarm search.
enlarge
    Kronecker enlargement with Hadamard generators and block decoding.
registry
    Published sub-optimum matrices.
harness
    Experiment sweeps and CSV records.
"""

from .core import (
    Alphabet,
    CdmaError,
    ChannelParams,
    ConstellationSizeError,
    MatrixFormatError,
    SignatureMatrix,
    constellation,
    load_matrix,
    ml_decode,
    save_matrix,
    sigma_from_ebn0,
    transmit,
)
from .criteria import (
    Criterion,
    CriterionSpec,
    CriterionValue,
    ber,
    capacity,
    ed,
    md,
    mixture_pdf,
    per_user_capacity,
    q_approx,
    qd,
    qfunc,
)
from .enlarge import EnlargementPlan, enlarge, hadamard_generator, kronecker, tensor_decode, verify_theorem1
from .optimize import GaConfig, OptimizationTrace, PsoConfig, make_cost, run_ga, run_pso

__version__ = "0.1.0"
