"""
M_n(M_m) 上的分块矩阵，以及分块布局之间的恒等对应。

约定(全部 0 起始):
    - 复合下标 (i, α) ↦ i·m + α，外层下标在前；
    - flatten 把第 (i, j) 块的 (α, β) 元放到 (i·m+α, j·m+β)；
    - 压缩算子 V 的列按 (p, q) ↦ p·n + q 排列。
所有复合下标运算都经由 IndexMap，避免同一公式在多处重复。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from .errors import ShapeError
from .linalg_core import CMatrix, adjoint, as_cmatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexMap:
    """复合下标 (o, x) ↦ o·inner + x 及其逆"""

    outer: int
    inner: int

    @property
    def size(self) -> int:
        return self.outer * self.inner

    def compose(self, o: int, x: int) -> int:
        if not (0 <= o < self.outer and 0 <= x < self.inner):
            raise ShapeError(f"复合下标 ({o}, {x}) 超出 {self.outer}×{self.inner}")
        return o * self.inner + x

    def split(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.size:
            raise ShapeError(f"下标 {index} 超出范围 {self.size}")
        return divmod(index, self.inner)


def swap_permutation(outer: int, a: int, b: int, inner: int = 1) -> npt.NDArray[np.intp]:
    """
    交换复合下标中相邻两段的置换。

    旧布局按 (o, x, y, z) 排列，尺寸为 (outer, a, b, inner)；新布局为 (o, y, x, z)。
    返回的 perm 满足 new = old[perm][:, perm]。
    """
    return (
        np.arange(outer * a * b * inner)
        .reshape(outer, a, b, inner)
        .transpose(0, 2, 1, 3)
        .ravel()
    )


def permute(a: CMatrix, perm: npt.NDArray[np.intp]) -> CMatrix:
    """置换共轭 P·A·Pᵀ，即同时重排行和列"""
    return as_cmatrix(a)[np.ix_(perm, perm)]


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """
    M_n(M_m) 中的元素: n×n 个 m×m 复矩阵块。

    blocks 是形状为 (n, n, m, m) 的只读数组，blocks[i, j] 即 r_ij。
    """

    blocks: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = np.array(self.blocks, dtype=np.complex128, copy=True)
        if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3] or 0 in arr.shape:
            raise ShapeError(f"分块数组形状必须为 (n, n, m, m)，得到 {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "blocks", arr)

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def m(self) -> int:
        return self.blocks.shape[2]

    def block(self, i: int, j: int) -> CMatrix:
        return self.blocks[i, j]

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[Any]]) -> BlockMatrix:
        """由 n×n 的块列表构造，每块必须同为 m×m"""
        n = len(grid)
        if n == 0 or any(len(row) != n for row in grid):
            raise ShapeError("块网格必须是非空的 n×n 列表")
        rows = [[as_cmatrix(b) for b in row] for row in grid]
        shapes = {b.shape for row in rows for b in row}
        if len(shapes) != 1:
            raise ShapeError(f"所有块形状必须相同，得到 {sorted(shapes)}")
        return cls(np.array(rows))

    @classmethod
    def identity(cls, n: int, m: int) -> BlockMatrix:
        return unflatten(np.eye(n * m, dtype=np.complex128), n, m)

    @classmethod
    def zeros(cls, n: int, m: int) -> BlockMatrix:
        return cls(np.zeros((n, n, m, m), dtype=np.complex128))

    def adjoint(self) -> BlockMatrix:
        """[R*]_ij = (r_ji)*"""
        return BlockMatrix(np.conj(self.blocks.transpose(1, 0, 3, 2)))

    def matmul(self, other: BlockMatrix) -> BlockMatrix:
        """M_n(M_m) 中的乘积"""
        if (self.n, self.m) != (other.n, other.m):
            raise ShapeError(f"无法相乘: ({self.n}, {self.m}) 与 ({other.n}, {other.m})")
        return unflatten(flatten(self) @ flatten(other), self.n, self.m)

    def __repr__(self) -> str:
        return f"BlockMatrix(n={self.n}, m={self.m})"


def flatten(r: BlockMatrix) -> CMatrix:
    """BlockMatrix(n, m) → nm×nm 矩阵，(i·m+α, j·m+β) 处为 r_ij[α, β]"""
    n, m = r.n, r.m
    return np.ascontiguousarray(r.blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m))


def unflatten(a: CMatrix, n: int, m: int) -> BlockMatrix:
    """flatten 的逆，要求 a 是边长为 n·m 的方阵"""
    a = as_cmatrix(a)
    if n < 1 or m < 1 or a.shape != (n * m, n * m):
        raise ShapeError(f"形状 {a.shape} 无法分解为 n={n} 个 m={m} 维块")
    return BlockMatrix(a.reshape(n, m, n, m).transpose(0, 2, 1, 3))


def pi_iso(r: BlockMatrix, c: CMatrix) -> BlockMatrix:
    """
    M_n(A) ⊗ M_k → M_nk(A) 的恒等对应。

    输出在外层复合下标 (i·k+α, j·k+β) 处的块为 c_αβ·r_ij。
    """
    c = as_cmatrix(c)
    if c.shape[0] != c.shape[1]:
        raise ShapeError(f"C 必须是方阵，得到 {c.shape}")
    n, m, k = r.n, r.m, c.shape[0]
    out = c[None, :, None, :, None, None] * r.blocks[:, None, :, None, :, :]  # (i, α, j, β, x, y)
    return BlockMatrix(out.reshape(n * k, n * k, m, m))


def pi_right(c: CMatrix, r: BlockMatrix) -> BlockMatrix:
    """pi_iso 的右版本 M_k ⊗ M_n(A) → M_kn(A)，块 (α·n+i, β·n+j) 为 c_αβ·r_ij"""
    c = as_cmatrix(c)
    if c.shape[0] != c.shape[1]:
        raise ShapeError(f"C 必须是方阵，得到 {c.shape}")
    n, m, k = r.n, r.m, c.shape[0]
    out = c[:, None, :, None, None, None] * r.blocks[None, :, None, :, :, :]  # (α, i, β, j, x, y)
    return BlockMatrix(out.reshape(k * n, k * n, m, m))


def build_compression_V(n: int, u: int) -> CMatrix:
    """
    压缩算子 V ∈ M_{nu × n²u}: [V]_{i,pq} = δ_pi δ_qi I_u。

    每个块行 i 只在块列 (i, i) 处有一个单位块，因此 V·V* = I_nu。
    """
    if n < 1 or u < 1:
        raise ShapeError(f"n 与 u 必须为正整数，得到 n={n}, u={u}")
    pairs = IndexMap(n, n)
    v = np.zeros((n * u, n * n * u), dtype=np.complex128)
    eye = np.eye(u, dtype=np.complex128)
    for i in range(n):
        col = pairs.compose(i, i)
        v[i * u:(i + 1) * u, col * u:(col + 1) * u] = eye
    return v


def _outer_root(t: BlockMatrix) -> int:
    n = math.isqrt(t.n)
    if n * n != t.n:
        raise ShapeError(f"外层尺寸 {t.n} 不是完全平方数")
    return n


def diag_compress(t: BlockMatrix) -> BlockMatrix:
    """
    V·T·V* 的选取形式: 输出块 (i, j) 为 T 在外层下标 ((i,i), (j,j)) 处的块。

    纯选取，不做乘法，与 compress_by_V 的结果逐位相同。
    """
    n = _outer_root(t)
    pairs = IndexMap(n, n)
    diag = [pairs.compose(i, i) for i in range(n)]
    return BlockMatrix(t.blocks[np.ix_(diag, diag)])


def compress_by_V(t: BlockMatrix) -> BlockMatrix:
    """按定义计算 V·flatten(T)·V*，作为 diag_compress 的对照"""
    n = _outer_root(t)
    v = build_compression_V(n, t.m)
    return unflatten(v @ flatten(t) @ adjoint(v), n, t.m)
