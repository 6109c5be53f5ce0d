"""
按种子确定地生成测试实例: Ginibre 矩阵、半正定矩阵、分块半正定矩阵与完全正映射。

每个生成器都是其参数(含种子)的纯函数，随机流水线见 seeding 模块。
"""

from __future__ import annotations

import logging
from typing import List

import numpy as np

from .block import BlockMatrix, unflatten
from .cpmaps import KrausSet, MatLinearMap, from_kraus
from .errors import ShapeError
from .linalg_core import CMatrix, adjoint
from .schur_tensor import split_grid
from .seeding import Seed, SeedLike, as_seed, bit_generator, complex_gaussian

logger = logging.getLogger(__name__)

__all__ = [
    "Seed",
    "ginibre",
    "random_psd",
    "random_hermitian",
    "random_unit_vector",
    "random_block_psd",
    "random_block_psd_grid",
    "random_kraus_set",
    "random_cp_map",
]


def ginibre(rows: int, cols: int, seed: SeedLike) -> CMatrix:
    """rows×cols 的 Ginibre 矩阵，元素为独立标准复高斯数"""
    if rows < 1 or cols < 1:
        raise ShapeError(f"Ginibre 矩阵的尺寸必须为正，得到 {rows}×{cols}")
    return complex_gaussian(bit_generator(seed), (rows, cols))


def random_psd(dim: int, rank: int, seed: SeedLike) -> CMatrix:
    """G·G*，G = ginibre(dim, rank, seed)，秩不超过 rank"""
    if not 1 <= rank <= dim:
        raise ShapeError(f"rank 必须满足 1 ≤ rank ≤ dim={dim}，得到 {rank}")
    g = ginibre(dim, rank, seed)
    return g @ adjoint(g)


def random_hermitian(dim: int, seed: SeedLike) -> CMatrix:
    """(G + G*)/2，一般不定"""
    g = ginibre(dim, dim, seed)
    return (g + adjoint(g)) / 2


def random_unit_vector(dim: int, seed: SeedLike) -> CMatrix:
    x = ginibre(dim, 1, seed)[:, 0]
    return x / np.linalg.norm(x)


def random_block_psd(n: int, m: int, seed: SeedLike) -> BlockMatrix:
    return unflatten(random_psd(n * m, n * m, seed), n, m)


def random_block_psd_grid(k: int, n: int, q: int, seed: SeedLike) -> List[List[BlockMatrix]]:
    """Ŝ ∈ M_k(M_n(M_q))⁺，以 k×k 网格形式返回 (外层下标 α·n + i)"""
    return split_grid(random_block_psd(k * n, q, seed), k)


def random_kraus_set(n: int, d: int, num_kraus: int, seed: SeedLike) -> KrausSet:
    """K_t = ginibre(d, n, seed.derive(t))"""
    if num_kraus < 1:
        raise ShapeError(f"num_kraus 必须为正，得到 {num_kraus}")
    base = as_seed(seed)
    return KrausSet(n, d, tuple(ginibre(d, n, base.derive(t)) for t in range(num_kraus)))


def random_cp_map(n: int, d: int, num_kraus: int, seed: SeedLike) -> MatLinearMap:
    """由随机 Kraus 集合构造的映射，按构造完全正"""
    return from_kraus(random_kraus_set(n, d, num_kraus, seed))
