import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from tensorschur.block import (
    BlockMatrix,
    IndexMap,
    build_compression_V,
    compress_by_V,
    diag_compress,
    flatten,
    permute,
    pi_iso,
    pi_right,
    swap_permutation,
    unflatten,
)
from tensorschur.errors import ShapeError
from tensorschur.randgen import ginibre, random_block_psd
from tensorschur.schur_tensor import kron_blocks, tensor_schur
from tensorschur.seeding import Seed


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_index_map_split_inverts_compose(outer, inner, data):
    idx = IndexMap(outer, inner)
    o = data.draw(st.integers(0, outer - 1))
    x = data.draw(st.integers(0, inner - 1))
    assert idx.split(idx.compose(o, x)) == (o, x)


def test_index_map_rejects_out_of_range():
    with pytest.raises(ShapeError):
        IndexMap(2, 3).compose(2, 0)
    with pytest.raises(ShapeError):
        IndexMap(2, 3).split(6)


def test_flatten_examples():
    single = BlockMatrix(ginibre(3, 3, 1)[None, None])
    assert_array_equal(flatten(single), single.block(0, 0))
    assert_array_equal(flatten(BlockMatrix.identity(3, 2)), np.eye(6))

    r = BlockMatrix.from_grid([[[[1]], [[2]]], [[[3]], [[4]]]])
    assert_array_equal(flatten(r), [[1, 2], [3, 4]])


def test_flatten_layout():
    r = BlockMatrix(ginibre(3 * 3, 2 * 2, 4).reshape(3, 3, 2, 2))
    a = flatten(r)
    for i in range(3):
        for j in range(3):
            assert_array_equal(a[i * 2:(i + 1) * 2, j * 2:(j + 1) * 2], r.block(i, j))


def test_unflatten_examples():
    r = unflatten(np.eye(6), 2, 3)
    assert_array_equal(r.block(0, 0), np.eye(3))
    assert_array_equal(r.block(1, 1), np.eye(3))
    assert_array_equal(r.block(0, 1), np.zeros((3, 3)))

    r = unflatten([[1, 2], [3, 4]], 2, 1)
    assert [r.block(i, j)[0, 0] for i in range(2) for j in range(2)] == [1, 2, 3, 4]


def test_unflatten_inverts_flatten():
    for seed in range(200):
        r = BlockMatrix(ginibre(4, 9, seed).reshape(2, 2, 3, 3))
        assert_array_equal(unflatten(flatten(r), 2, 3).blocks, r.blocks)


def test_unflatten_rejects_bad_shape():
    with pytest.raises(ShapeError):
        unflatten(np.eye(5), 2, 2)


def test_block_matrix_is_read_only():
    r = BlockMatrix.identity(2, 2)
    with pytest.raises(ValueError):
        r.blocks[0, 0, 0, 0] = 5


def test_block_matrix_rejects_ragged_grid():
    with pytest.raises(ShapeError):
        BlockMatrix.from_grid([[np.eye(2), np.eye(3)], [np.eye(2), np.eye(2)]])


def test_adjoint_and_matmul():
    r = BlockMatrix(ginibre(4, 4, 2).reshape(2, 2, 2, 2))
    s = BlockMatrix(ginibre(4, 4, 3).reshape(2, 2, 2, 2))
    assert_allclose(flatten(r.adjoint()), np.conj(flatten(r)).T)
    assert_allclose(flatten(r.matmul(s)), flatten(r) @ flatten(s))


def test_pi_iso_examples():
    r = random_block_psd(2, 2, 9)
    assert_array_equal(pi_iso(r, [[1]]).blocks, r.blocks)

    out = pi_iso(r, np.eye(3))
    for i in range(2):
        for j in range(2):
            for a in range(3):
                for b in range(3):
                    expected = r.block(i, j) if a == b else np.zeros((2, 2))
                    assert_array_equal(out.block(i * 3 + a, j * 3 + b), expected)


def test_pi_right_examples():
    r = random_block_psd(2, 2, 10)
    assert_array_equal(pi_right([[1]], r).blocks, r.blocks)

    out = pi_right(np.eye(3), r)
    assert_array_equal(flatten(out), np.kron(np.eye(3), flatten(r)))


def test_pi_right_is_permutation_of_pi_iso():
    r = random_block_psd(3, 2, 12)
    c = ginibre(2, 2, 13)
    c = c @ np.conj(c).T
    left = flatten(pi_iso(r, c))
    right = flatten(pi_right(c, r))
    # (i, α, x) → (α, i, x)
    perm = swap_permutation(1, 3, 2, inner=2)
    assert_array_equal(permute(left, perm), right)
    assert_allclose(np.linalg.eigvalsh(left), np.linalg.eigvalsh(right), atol=1e-8)


def test_build_compression_V_examples():
    assert_array_equal(build_compression_V(2, 1), [[1, 0, 0, 0], [0, 0, 0, 1]])
    assert_array_equal(build_compression_V(1, 4), np.eye(4))


def test_compression_V_is_coisometry():
    v = build_compression_V(3, 2)
    assert v.shape == (6, 18)
    assert_array_equal(v @ np.conj(v).T, np.eye(6))


def test_diag_compress_block_identity():
    out = diag_compress(BlockMatrix.identity(9, 2))
    assert_array_equal(flatten(out), np.eye(6))


def test_diag_compress_rejects_non_square_outer():
    with pytest.raises(ShapeError):
        diag_compress(BlockMatrix.identity(3, 1))


def test_diag_compress_of_kron_is_tensor_schur():
    for seed in range(30):
        r = random_block_psd(3, 2, 2 * seed)
        s = random_block_psd(3, 3, 2 * seed + 1)
        big = kron_blocks(r, s)
        t = tensor_schur(r, s)
        assert_array_equal(diag_compress(big).blocks, t.blocks)
        assert_array_equal(compress_by_V(big).blocks, t.blocks)


def test_compression_matches_explicit_V_product():
    r = random_block_psd(2, 2, 1)
    s = random_block_psd(2, 1, 2)
    v = build_compression_V(2, 2)
    expected = v @ np.kron(flatten(r), flatten(s)) @ np.conj(v).T
    assert_allclose(flatten(diag_compress(kron_blocks(r, s))), expected, atol=1e-12)


def _rel_err(a, b):
    return np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b))


def test_pi_iso_is_a_star_homomorphism():
    for seed in range(200):
        base = Seed(seed)
        n, m, k = 1 + seed % 3, 1 + (seed // 3) % 3, 1 + (seed // 9) % 3
        r1 = BlockMatrix(ginibre(n * n, m * m, base.derive(0)).reshape(n, n, m, m))
        r2 = BlockMatrix(ginibre(n * n, m * m, base.derive(1)).reshape(n, n, m, m))
        c1, c2 = ginibre(k, k, base.derive(2)), ginibre(k, k, base.derive(3))

        product = pi_iso(r1.matmul(r2), c1 @ c2)
        composed = pi_iso(r1, c1).matmul(pi_iso(r2, c2))
        assert _rel_err(flatten(product), flatten(composed)) <= 1e-10

        starred = pi_iso(r1.adjoint(), np.conj(c1).T)
        assert _rel_err(flatten(starred), flatten(pi_iso(r1, c1).adjoint())) <= 1e-10


def test_pi_right_is_a_star_homomorphism():
    r1, r2 = random_block_psd(2, 2, 1), BlockMatrix(ginibre(4, 4, 2).reshape(2, 2, 2, 2))
    c1, c2 = ginibre(3, 3, 3), ginibre(3, 3, 4)
    product = pi_right(c1 @ c2, r1.matmul(r2))
    composed = pi_right(c1, r1).matmul(pi_right(c2, r2))
    assert _rel_err(flatten(product), flatten(composed)) <= 1e-10
    assert_allclose(flatten(pi_right(np.conj(c1).T, r2.adjoint())), flatten(pi_right(c1, r2).adjoint()))
