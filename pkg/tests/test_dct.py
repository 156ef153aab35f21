import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dctpurify.dct import (
    ZIGZAG,
    BlockGrid,
    assemble,
    basis_function,
    forward_dct,
    inverse_dct,
    partition,
    unzigzag,
    zigzag,
)


def double_sum_dct(s):
    """Textbook DCT-II, one coefficient at a time."""
    out = np.zeros((8, 8))
    for u in range(8):
        for v in range(8):
            au = 1 / math.sqrt(2) if u == 0 else 1.0
            av = 1 / math.sqrt(2) if v == 0 else 1.0
            acc = 0.0
            for x in range(8):
                for y in range(8):
                    acc += (
                        s[x, y]
                        * math.cos((2 * x + 1) * u * math.pi / 16)
                        * math.cos((2 * y + 1) * v * math.pi / 16)
                    )
            out[u, v] = 0.25 * au * av * acc
    return out


blocks = arrays(np.float64, (8, 8), elements=st.floats(-128, 127))


def test_flat_128_partitions_to_zeros():
    grid = partition(np.full((8, 8), 128, dtype=np.uint8))
    assert len(grid) == 1
    assert not grid.blocks.any()


def test_edge_padding_replicates_last_column():
    plane = np.arange(72, dtype=np.uint8).reshape(8, 9)
    grid = partition(plane)
    assert (grid.block_cols, grid.block_rows) == (2, 1)
    second = grid.blocks[1] + 128
    assert np.array_equal(second, np.repeat(plane[:, 8:9], 8, axis=1))


def test_edge_padding_replicates_last_row():
    plane = np.arange(27, dtype=np.uint8).reshape(9, 3)
    grid = partition(plane)
    assert (grid.block_cols, grid.block_rows) == (1, 2)
    assert np.all(grid.blocks[1] + 128 == grid.blocks[1][0] + 128)


@given(arrays(np.uint8, st.tuples(st.integers(1, 20), st.integers(1, 20))))
def test_partition_assemble_identity(plane):
    assert np.array_equal(assemble(partition(plane)), plane)


def test_grid_shape_is_checked():
    with pytest.raises(ValueError):
        BlockGrid(np.zeros((3, 8, 8)), 2, 2, 16, 16)


def test_constant_block_dc():
    c = forward_dct(np.full((8, 8), 2.0))
    assert c[0, 0] == pytest.approx(16.0, abs=1e-12)
    assert np.allclose(np.delete(c.ravel(), 0), 0.0, atol=1e-12)


def test_zero_block():
    assert not forward_dct(np.zeros((8, 8))).any()


def test_matches_double_sum(rng):
    for _ in range(5):
        s = rng.uniform(-128, 127, (8, 8))
        assert np.abs(forward_dct(s) - double_sum_dct(s)).max() < 1e-9


def test_dc_only_inverse():
    c = np.zeros((8, 8))
    c[0, 0] = 16
    assert np.allclose(inverse_dct(c), 2.0, atol=1e-12)


def test_ac_impulse_is_basis_function():
    c = np.zeros((8, 8))
    c[0, 1] = 1.0
    x = np.arange(8)
    expected = 0.25 * (1 / math.sqrt(2)) * np.outer(np.ones(8), np.cos((2 * x + 1) * math.pi / 16))
    assert np.allclose(inverse_dct(c), expected, atol=1e-12)
    assert np.allclose(basis_function(0, 1), expected, atol=1e-12)


def test_stacked_roundtrip(rng):
    s = rng.uniform(-128, 127, (1000, 8, 8))
    assert np.abs(inverse_dct(forward_dct(s)) - s).max() < 1e-6


@given(blocks, blocks)
def test_linearity(a, e):
    assert np.abs(forward_dct(a + e) - forward_dct(a) - forward_dct(e)).max() <= 1e-9


@given(arrays(np.float64, (8, 8), elements=st.floats(-1, 1)), st.floats(0.1, 16))
def test_perturbation_coefficient_bound(e, eps):
    assert np.abs(forward_dct(e * eps)).max() <= 8 * eps + 1e-9


@given(blocks)
def test_parseval(s):
    energy = np.sum(s * s)
    assert np.sum(forward_dct(s) ** 2) == pytest.approx(energy, rel=1e-6, abs=1e-9)


def test_zigzag_prefix():
    c = np.arange(64).reshape(8, 8)
    v = zigzag(c)
    assert v[:8].tolist() == [0, 1, 8, 16, 9, 2, 3, 10]
    assert v[63] == 63


def test_zigzag_is_a_permutation():
    assert sorted(ZIGZAG.tolist()) == list(range(64))


@given(blocks)
def test_zigzag_roundtrip(c):
    assert np.array_equal(unzigzag(zigzag(c)), c)
