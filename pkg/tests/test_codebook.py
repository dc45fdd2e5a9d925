import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beamalign import beamspace as bs
from beamalign import codebook as cb
from beamalign.errors import ConfigurationError


def test_full_spreading_is_full_set():
    c = cb.generate_codebook(3, 5, 2, 8, 8)
    assert np.all(c.supports == np.arange(8))


def test_seed_determinism():
    a = cb.generate_codebook(11, 20, 3, 16, 4)
    b = cb.generate_codebook(11, 20, 3, 16, 4)
    c = cb.generate_codebook(12, 20, 3, 16, 4)
    np.testing.assert_array_equal(a.supports, b.supports)
    assert not np.array_equal(a.supports, c.supports)


def test_spreading_out_of_range():
    with pytest.raises(ConfigurationError):
        cb.generate_codebook(0, 2, 1, 8, 9)
    with pytest.raises(ConfigurationError):
        cb.generate_codebook(0, 2, 1, 8, 0)


def test_bin_coverage_uniform():
    T, chains, M, k = 100, 3, 32, 8
    c = cb.generate_codebook(7, T, chains, M, k)
    counts = np.bincount(c.supports.ravel(), minlength=M)
    expected = k * T * chains / M
    assert np.all(np.abs(counts - expected) <= 0.3 * expected)


@settings(max_examples=50)
@given(st.integers(1, 10), st.integers(1, 4), st.integers(1, 32), st.data())
def test_supports_are_distinct_sorted_subsets(T, chains, M, data):
    k = data.draw(st.integers(1, M))
    c = cb.generate_codebook(data.draw(st.integers(0, 1000)), T, chains, M, k)
    assert c.supports.shape == (T, chains, k)
    assert np.all(np.diff(c.supports, axis=-1) > 0)
    assert c.supports.min() >= 0 and c.supports.max() < M


def test_json_roundtrip():
    c = cb.generate_codebook(5, 4, 2, 16, 3, side="UE")
    d = cb.Codebook.from_json(c.to_json())
    np.testing.assert_array_equal(c.supports, d.supports)
    assert (d.dimension, d.side, d.seed) == (16, "UE", 5)


def test_beamforming_vector_single_bin_is_dft_column():
    F = bs.dft_matrix(8)
    np.testing.assert_allclose(cb.beamforming_vector([5], F), F[:, 5])


@given(st.integers(1, 32), st.data())
def test_beamforming_vector_unit_norm(M, data):
    k = data.draw(st.integers(1, M))
    support = data.draw(st.permutations(range(M)))[:k]
    v = cb.beamforming_vector(support, bs.dft_matrix(M))
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


# Probing example with M = N = 10 (1-based sets in the original drawing).
U_SET = [1, 3, 4, 6, 8, 10]
U_VECTOR = [1, 0, 1, 0, 1, 0, 1, 1, 0, 1]  # printed vector; its support is {1,3,5,7,8,10}
V_SET = [2, 4, 5, 7, 9]
V_VECTOR = [0, 1, 0, 1, 1, 0, 1, 0, 1, 0]


def test_probing_example_weights():
    u_support = np.flatnonzero(U_VECTOR)
    np.testing.assert_allclose(cb.beamspace_weights(u_support, 10),
                               np.array(U_VECTOR) / math.sqrt(6))
    np.testing.assert_allclose(cb.beamspace_weights(np.array(V_SET) - 1, 10),
                               np.array(V_VECTOR) / math.sqrt(5))
    w = cb.beamspace_weights(np.array(U_SET) - 1, 10)
    assert np.count_nonzero(w) == 6 and np.linalg.norm(w) == pytest.approx(1.0)


def test_probing_example_sensing_row():
    row = cb.sensing_row(np.array(U_SET) - 1, np.array(V_SET) - 1, 10, 10)
    assert row.sum() == 30
    grid = row.reshape(10, 10, order="F")  # rows = AoA bins, cols = AoD bins
    expected = np.outer(np.isin(np.arange(1, 11), V_SET), np.isin(np.arange(1, 11), U_SET))
    np.testing.assert_array_equal(grid, expected)


def test_sensing_row_single_one():
    row = cb.sensing_row([3], [1], 8, 4)
    assert row.sum() == 1 and row[bs.flat_index(1, 3, 4)] == 1


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_sensing_row_double_loop(M, N, data):
    U = sorted(data.draw(st.sets(st.integers(0, M - 1), min_size=1)))
    V = sorted(data.draw(st.sets(st.integers(0, N - 1), min_size=1)))
    row = cb.sensing_row(U, V, M, N)
    for c in range(M):
        for r in range(N):
            assert row[bs.flat_index(r, c, N)] == float(c in U and r in V)
    assert row.sum() == len(U) * len(V)


def test_assemble_B_single_row():
    u = cb.generate_codebook(1, 3, 1, 8, 3)
    v = cb.generate_codebook(2, 3, 1, 6, 2, side="UE")
    B = cb.assemble_B(u, v, 1)
    np.testing.assert_array_equal(B[0], cb.sensing_row(u.supports[0, 0], v.supports[0, 0], 8, 6))


def test_assemble_B_ordering_and_row_sums():
    T, m, n, M, N = 5, 3, 2, 16, 12
    u = cb.generate_codebook(1, T, m, M, 4)
    v = cb.generate_codebook(2, T, n, N, 3, side="UE")
    B = cb.assemble_B(u, v, T)
    assert B.shape == (30, M * N)
    assert np.all(B.sum(axis=1) == 12)
    for s in range(T):
        for i in range(m):
            for j in range(n):
                np.testing.assert_array_equal(
                    B[cb.row_index(s, i, j, m, n)],
                    cb.sensing_row(u.supports[s, i], v.supports[s, j], M, N))


def test_assemble_B_needs_enough_slots():
    u = cb.generate_codebook(1, 2, 1, 8, 3)
    v = cb.generate_codebook(2, 2, 1, 8, 3)
    with pytest.raises(ConfigurationError):
        cb.assemble_B(u, v, 3)


def test_codebook_rejects_duplicates():
    with pytest.raises(ConfigurationError):
        cb.Codebook(np.array([[[1, 1]]]), 4)
