import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cdmasig.core import (
    Alphabet,
    CdmaError,
    ChannelParams,
    ConstellationSizeError,
    MatrixFormatError,
    SignatureMatrix,
    constellation,
    input_to_index,
    input_vectors,
    load_matrix,
    ml_decode,
    ml_decode_index,
    save_matrix,
    sigma_from_ebn0,
    transmit,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: arrays(float, (m, n), elements=st.floats(-1, 1, allow_nan=False))
    )
)


def test_input_order_is_binary_counting():
    X = input_vectors(3)
    assert X.shape == (8, 3)
    assert X[0].tolist() == [-1, -1, -1]
    assert X[1].tolist() == [1, -1, -1]  # least significant bit is user 1
    assert X[6].tolist() == [-1, 1, 1]
    assert input_to_index(X).tolist() == list(range(8))


def test_constellation_identity():
    Z = constellation(np.eye(2))
    assert sorted(map(tuple, Z)) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_constellation_all_ones_input_gives_row_sums(A5):
    Z = constellation(A5)
    assert Z.shape == (32, 4)
    assert Z[31].tolist() == [5, 1, 1, -1]


def test_constellation_size_limit():
    with pytest.raises(ConstellationSizeError):
        constellation(np.ones((1, 27)))
    with pytest.raises(ConstellationSizeError):
        constellation(np.ones((1, 5)), max_users=4)


@given(small_matrices)
def test_constellation_closed_under_negation(A):
    Z = constellation(A)
    # index i and its bitwise complement are negated inputs
    comp = (len(Z) - 1) - np.arange(len(Z))
    assert np.array_equal(Z[comp], -Z)


@given(small_matrices, st.floats(0.1, 10))
def test_constellation_linear_in_scale(A, c):
    np.testing.assert_allclose(constellation(c * A), c * constellation(A), rtol=1e-12, atol=1e-12)


def test_transmit_zero_noise_and_determinism(A4, rng):
    X = np.array([1, -1, 1, 1, -1])
    assert np.array_equal(transmit(A4, X, 0.0, rng), A4.entries @ X)
    y1 = transmit(A4, X, 0.5, np.random.default_rng(3))
    y2 = transmit(A4, X, 0.5, np.random.default_rng(3))
    assert np.array_equal(y1, y2)


def test_transmit_noise_variance(A4):
    sigma = 0.37
    X = np.tile([1, -1, 1, 1, -1], (100_000, 1))
    Y = transmit(A4, X, sigma, np.random.default_rng(11))
    var = (Y - X @ A4.entries.T).var(axis=0)
    np.testing.assert_allclose(var, sigma**2, rtol=0.02)


def test_transmit_dimension_mismatch(A4, rng):
    with pytest.raises(CdmaError):
        transmit(A4, np.ones(4), 0.1, rng)
    with pytest.raises(CdmaError):
        transmit(A4, np.array([1, 0, 1, 1, 1]), 0.1, rng)


def test_ml_decode_simple_cases():
    assert ml_decode([[1.0]], [0.3]).tolist() == [1]
    assert ml_decode([[1.0]], [-0.3]).tolist() == [-1]
    # equidistant: lowest input index (-1) wins
    assert ml_decode([[1.0]], [0.0]).tolist() == [-1]


def test_ml_decode_ties_lowest_index():
    A = np.ones((2, 2))  # inputs (1,-1) and (-1,1) coincide at the origin
    assert ml_decode_index(A, [0.0, 0.0]) == 1


def test_ml_decode_exact_points(A4):
    X = input_vectors(5)
    Y = X @ A4.entries.T
    assert np.array_equal(ml_decode(A4, Y), X)


def test_ml_decode_low_noise_round_trip(A4):
    rng = np.random.default_rng(5)
    X = input_vectors(5)[rng.integers(0, 32, size=2000)]
    Y = transmit(A4, X, 1e-3, rng)
    assert np.array_equal(ml_decode(A4, Y), X)


def test_sigma_from_ebn0():
    assert sigma_from_ebn0([[1.0]], 0.0) == pytest.approx(1 / math.sqrt(2))
    assert sigma_from_ebn0([[1.0]], 0.0) / sigma_from_ebn0([[1.0]], 10.0) == pytest.approx(math.sqrt(10))


def test_sigma_from_ebn0_binary_4x5(A5):
    # Eb = ||A||^2 / n = 20 / 5 = 4
    expected = math.sqrt(4 / (2 * 10**0.8))
    assert sigma_from_ebn0(A5, 8.0) == pytest.approx(expected, rel=1e-12)
    assert sigma_from_ebn0(A5, 8.0) == pytest.approx(0.563, abs=5e-4)


def test_sigma_from_ebn0_rejects_zero_matrix():
    with pytest.raises(CdmaError):
        sigma_from_ebn0(np.zeros((2, 3)), 5.0)


@given(st.floats(-20, 20), st.floats(0.01, 5))
def test_sigma_monotone_decreasing(db, step):
    A = [[0.5, -0.2], [0.1, 0.9]]
    assert sigma_from_ebn0(A, db + step) < sigma_from_ebn0(A, db)


def test_channel_params():
    A = np.ones((2, 2))
    assert ChannelParams.fixed(0.3).sigma_for(A) == 0.3
    assert ChannelParams.at_ebn0(3.0).sigma_for(A) == sigma_from_ebn0(A, 3.0)
    with pytest.raises(CdmaError):
        ChannelParams()
    with pytest.raises(CdmaError):
        ChannelParams.fixed(0.0)


def test_signature_matrix_validation():
    SignatureMatrix([[1, -1], [-1, 1]], Alphabet.BINARY)
    with pytest.raises(MatrixFormatError):
        SignatureMatrix([[1, 0.5]], Alphabet.BINARY)
    with pytest.raises(MatrixFormatError):
        SignatureMatrix([[1.5, 0.0]])
    m = SignatureMatrix([[0.2, 0.4, -0.1], [0.3, 0.1, 0.0]])
    assert (m.m, m.n, m.overloaded) == (2, 3, True)
    assert m.loading_factor == 1.5


def test_matrix_json_round_trip(tmp_path, A4):
    path = tmp_path / "a4.json"
    save_matrix(A4, path)
    data = json.loads(path.read_text())
    assert data["m"] == 4 and data["n"] == 5 and data["alphabet"] == "real"
    assert len(data["entries"]) == 20
    assert load_matrix(path) == A4


@pytest.mark.parametrize(
    "payload",
    [
        {"m": 2, "n": 2, "alphabet": "real", "entries": [0.1, 0.2, 0.3]},
        {"m": 1, "n": 2, "alphabet": "binary", "entries": [1, 0]},
        {"m": 1, "n": 2, "entries": [1]},
        {"n": 2, "entries": [1, 1]},
        [1, 2, 3],
    ],
)
def test_load_matrix_rejects_malformed(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(MatrixFormatError):
        load_matrix(path)
