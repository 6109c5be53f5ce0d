import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from tensorschur.block import BlockMatrix, flatten, unflatten
from tensorschur.errors import ShapeError
from tensorschur.linalg_core import psd_check
from tensorschur.randgen import random_block_psd, random_block_psd_grid, random_psd
from tensorschur.schur_tensor import (
    all_ones,
    amplified_by_ones,
    as_scalar_blocks,
    contract_with_ones,
    kron_blocks,
    lr_amplified,
    ones_column,
    schur,
    split_grid,
    stack_grid,
    sum_contract,
    tensor_schur,
)

from .conftest import assert_psd_flat


def test_tensor_schur_with_all_ones_blocks():
    r = random_block_psd(3, 2, 1)
    ones = as_scalar_blocks(np.ones((3, 3)))
    assert_array_equal(tensor_schur(r, ones).blocks, r.blocks)


def test_tensor_schur_scalar_example():
    r = as_scalar_blocks([[1, 1], [1, 1]])
    s = as_scalar_blocks([[2, 1], [1, 1]])
    out = flatten(tensor_schur(r, s))
    assert_array_equal(out, [[2, 1], [1, 1]])
    assert psd_check(out).is_psd


def test_tensor_schur_blocks_are_krons():
    r = random_block_psd(2, 2, 3)
    s = random_block_psd(2, 3, 4)
    t = tensor_schur(r, s)
    assert (t.n, t.m) == (2, 6)
    for i in range(2):
        for j in range(2):
            assert_array_equal(t.block(i, j), np.kron(r.block(i, j), s.block(i, j)))


def test_tensor_schur_rejects_outer_mismatch():
    with pytest.raises(ShapeError):
        tensor_schur(BlockMatrix.identity(2, 1), BlockMatrix.identity(3, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_tensor_schur_of_psd_is_psd(n, p, q, seed):
    r = random_block_psd(n, p, seed)
    s = random_block_psd(n, q, seed + 1)
    assert psd_check(flatten(tensor_schur(r, s))).is_psd


def test_schur_examples():
    r = random_psd(4, 4, 7)
    assert_array_equal(schur(r, all_ones(4)), r)
    s = random_psd(4, 4, 8)
    assert_array_equal(schur(np.eye(4), s), np.diag(np.diag(s)))
    assert psd_check(schur(r, s)).is_psd


def test_schur_rejects_shape_mismatch():
    with pytest.raises(ShapeError):
        schur(np.eye(2), np.eye(3))


def test_sum_contract_examples():
    ident = BlockMatrix.identity(2, 1)
    assert_array_equal(sum_contract(ident, ident), [[2]])
    ones = as_scalar_blocks(np.ones((2, 2)))
    assert_array_equal(sum_contract(ones, ones), [[4]])


def test_sum_contract_matches_ones_contraction():
    for seed in range(50):
        r = random_block_psd(3, 2, 2 * seed)
        s = random_block_psd(3, 2, 2 * seed + 1)
        total = sum_contract(r, s)
        assert_allclose(total, contract_with_ones(tensor_schur(r, s)), atol=1e-12 * max(1, np.abs(total).max()))
        assert psd_check(total).is_psd


def test_ones_column():
    ones = ones_column(3, 2)
    assert ones.shape == (6, 2)
    assert_array_equal(np.conj(ones).T @ ones, 3 * np.eye(2))


def test_kron_blocks_flattens_to_permuted_kron():
    r = random_block_psd(2, 2, 5)
    s = random_block_psd(2, 1, 6)
    big = kron_blocks(r, s)
    assert (big.n, big.m) == (4, 2)
    assert_allclose(
        np.linalg.eigvalsh(flatten(big)),
        np.linalg.eigvalsh(np.kron(flatten(r), flatten(s))),
        atol=1e-10,
    )


def test_all_ones():
    assert_array_equal(all_ones(1), [[1]])
    for k in range(1, 6):
        lam = np.linalg.eigvalsh(all_ones(k))
        assert_allclose(lam, [0] * (k - 1) + [k], atol=1e-12)
        proj = all_ones(k) / k
        assert_allclose(proj @ proj, proj, atol=1e-12)
    with pytest.raises(ShapeError):
        all_ones(0)


def test_stack_grid_layout():
    grid = random_block_psd_grid(2, 3, 2, 1)
    stacked = stack_grid(grid)
    assert (stacked.n, stacked.m) == (6, 2)
    for a in range(2):
        for b in range(2):
            for i in range(3):
                for j in range(3):
                    assert_array_equal(stacked.block(a * 3 + i, b * 3 + j), grid[a][b].block(i, j))
    back = split_grid(stacked, 2)
    assert all(np.array_equal(back[a][b].blocks, grid[a][b].blocks) for a in range(2) for b in range(2))


def test_lr_amplified_with_k_one_is_tensor_schur():
    r = random_block_psd(3, 2, 2)
    s = random_block_psd(3, 2, 3)
    out = lr_amplified(r, [[s]])
    assert_array_equal(out[0][0].blocks, tensor_schur(r, s).blocks)


def test_lr_amplified_equals_ones_amplification():
    for seed in range(40):
        r = random_block_psd(3, 2, 2 * seed)
        s_hat = random_block_psd_grid(3, 3, 2, 2 * seed + 1)
        amplified = stack_grid(lr_amplified(r, s_hat))
        assert_array_equal(amplified.blocks, amplified_by_ones(r, s_hat).blocks)
        assert_psd_flat(amplified)


def test_lr_amplified_with_identity_r():
    """R 为单位块时只保留每个 S_αβ 的对角块"""
    r = BlockMatrix.identity(2, 1)
    s_hat = random_block_psd_grid(2, 2, 2, 4)
    out = stack_grid(lr_amplified(r, s_hat))
    for a in range(2):
        for b in range(2):
            for i in range(2):
                for j in range(2):
                    expected = s_hat[a][b].block(i, j) if i == j else np.zeros((2, 2))
                    assert_array_equal(out.block(a * 2 + i, b * 2 + j), expected)
    assert psd_check(flatten(out)).is_psd


def test_lr_amplified_rejects_ragged_grid():
    s = random_block_psd(2, 1, 0)
    with pytest.raises(ShapeError):
        lr_amplified(BlockMatrix.identity(2, 1), [[s, s], [s]])
    with pytest.raises(ShapeError):
        split_grid(unflatten(np.eye(3), 3, 1), 2)
