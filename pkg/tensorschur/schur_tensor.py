"""
张量 Schur 积 R ∘⊗ S = [r_ij ⊗ s_ij]、求和收缩 Σ r_ij ⊗ s_ij，以及 Schur 乘子的放大形式。
"""

from __future__ import annotations

import logging
from typing import List, Sequence

import numpy as np

from .block import BlockMatrix, IndexMap, flatten, pi_right
from .errors import ShapeError
from .linalg_core import CMatrix, adjoint, as_cmatrix, kron

logger = logging.getLogger(__name__)

BlockGrid = List[List[BlockMatrix]]


def _require_same_outer(r: BlockMatrix, s: BlockMatrix) -> None:
    if r.n != s.n:
        raise ShapeError(f"外层尺寸不一致: R 为 {r.n}, S 为 {s.n}")


def tensor_schur(r: BlockMatrix, s: BlockMatrix) -> BlockMatrix:
    """
    张量 Schur 积

    Args:
        r: BlockMatrix(n, p)
        s: BlockMatrix(n, q)

    Returns:
        BlockMatrix(n, pq)，块 (i, j) 为 kron(r_ij, s_ij)
    """
    _require_same_outer(r, s)
    n, p, q = r.n, r.m, s.m
    # (i, j, α, γ, β, δ)，与 np.kron 同为逐元素乘法
    out = r.blocks[:, :, :, None, :, None] * s.blocks[:, :, None, :, None, :]
    return BlockMatrix(out.reshape(n, n, p * q, p * q))


def schur(r: CMatrix, s: CMatrix) -> CMatrix:
    """经典 Schur (Hadamard) 积，逐元素相乘"""
    r, s = as_cmatrix(r), as_cmatrix(s)
    if r.shape != s.shape or r.shape[0] != r.shape[1]:
        raise ShapeError(f"Schur 积需要同形状方阵，得到 {r.shape} 与 {s.shape}")
    return r * s


def as_scalar_blocks(a: CMatrix) -> BlockMatrix:
    """把 n×n 矩阵看作 BlockMatrix(n, 1)"""
    a = as_cmatrix(a)
    return BlockMatrix(a[:, :, np.newaxis, np.newaxis])


def sum_contract(r: BlockMatrix, s: BlockMatrix) -> CMatrix:
    """Σ_ij kron(r_ij, s_ij)，即 1ₙ*·(R ∘⊗ S)·1ₙ"""
    return tensor_schur(r, s).blocks.sum(axis=(0, 1))


def ones_column(n: int, u: int) -> CMatrix:
    """n 个 u×u 单位阵纵向堆叠而成的 nu×u 矩阵 1ₙ"""
    return np.tile(np.eye(u, dtype=np.complex128), (n, 1))


def contract_with_ones(t: BlockMatrix) -> CMatrix:
    """1ₙ*·flatten(T)·1ₙ"""
    ones = ones_column(t.n, t.m)
    return adjoint(ones) @ flatten(t) @ ones


def kron_blocks(r: BlockMatrix, s: BlockMatrix) -> BlockMatrix:
    """
    把 kron(flatten(R), flatten(S)) 重排为 BlockMatrix(n², pq)。

    外层复合下标 (p, q) ↦ p·n + q 与压缩算子 V 的列顺序一致，
    块 ((p,q), (k,l)) 为 kron(r_pk, s_ql)。
    """
    _require_same_outer(r, s)
    n, p, q = r.n, r.m, s.m
    big = kron(flatten(r), flatten(s))
    # 行下标依次为 (i, α, i', γ)，尺寸 (n, p, n, q)
    t = big.reshape(n, p, n, q, n, p, n, q).transpose(0, 2, 4, 6, 1, 3, 5, 7)
    pairs = IndexMap(n, n)
    return BlockMatrix(t.reshape(pairs.size, pairs.size, p * q, p * q))


def all_ones(k: int) -> CMatrix:
    """全 1 矩阵 J_k，J_k/k 是投影"""
    if k < 1:
        raise ShapeError(f"k 必须为正整数，得到 {k}")
    return np.ones((k, k), dtype=np.complex128)


def stack_grid(grid: Sequence[Sequence[BlockMatrix]]) -> BlockMatrix:
    """
    k×k 个 BlockMatrix(n, q) 组成的网格 Ŝ 视为 BlockMatrix(kn, q)。

    外层复合下标为 (α, i) ↦ α·n + i，即 [Ŝ]_{αi,βj} = [S_αβ]_ij。
    """
    k = len(grid)
    if k == 0 or any(len(row) != k for row in grid):
        raise ShapeError("网格必须是非空的 k×k 列表")
    shapes = {(b.n, b.m) for row in grid for b in row}
    if len(shapes) != 1:
        raise ShapeError(f"网格中所有 BlockMatrix 的 (n, m) 必须相同，得到 {sorted(shapes)}")
    (n, q), = shapes
    stacked = np.array([[b.blocks for b in row] for row in grid])  # (k, k, n, n, q, q)
    out = stacked.transpose(0, 2, 1, 3, 4, 5).reshape(k * n, k * n, q, q)
    return BlockMatrix(out)


def split_grid(b: BlockMatrix, k: int) -> BlockGrid:
    """stack_grid 的逆"""
    if k < 1 or b.n % k != 0:
        raise ShapeError(f"外层尺寸 {b.n} 不能被 k={k} 整除")
    n = b.n // k
    t = b.blocks.reshape(k, n, k, n, b.m, b.m).transpose(0, 2, 1, 3, 4, 5)
    return [[BlockMatrix(t[a, c]) for c in range(k)] for a in range(k)]


def lr_amplified(r: BlockMatrix, s_hat: Sequence[Sequence[BlockMatrix]]) -> BlockGrid:
    """
    L_R 在第 k 层的放大: 网格 (α, β) 处为 tensor_schur(R, S_αβ)。

    展平后等于 tensor_schur(J_k ⊗ R, Ŝ)，见 amplified_by_ones。
    """
    k = len(s_hat)
    if k == 0 or any(len(row) != k for row in s_hat):
        raise ShapeError("Ŝ 必须是非空的 k×k 网格")
    shapes = {(b.n, b.m) for row in s_hat for b in row}
    if len(shapes) != 1:
        raise ShapeError(f"Ŝ 中所有 BlockMatrix 的 (n, m) 必须相同，得到 {sorted(shapes)}")
    return [[tensor_schur(r, s) for s in row] for row in s_hat]


def amplified_by_ones(r: BlockMatrix, s_hat: Sequence[Sequence[BlockMatrix]]) -> BlockMatrix:
    """(J_k ⊗ R) ∘⊗ Ŝ，在 kn 层上计算"""
    k = len(s_hat)
    return tensor_schur(pi_right(all_ones(k), r), stack_grid(s_hat))
