"""
线性映射 φ: M_n → M_d 及其 Choi 矩阵、完全正性判定、放大 id_A ⊗ φ 和 Kraus 分解。

映射以其在矩阵单位上的作用 φ(E_ij) 存储；Choi 矩阵 [φ(E_ij)] 按 (i, s) ↦ i·d + s 展平，
与 block 模块的布局一致。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .block import BlockMatrix, flatten
from .errors import NotCPError, NotHermitianError, ShapeError
from .linalg_core import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    CMatrix,
    PsdReport,
    adjoint,
    as_cmatrix,
    eig_hermitian,
    kron,
    matrix_unit,
    psd_check,
)
from .schur_tensor import sum_contract
from .seeding import SeedLike, as_seed, bit_generator, complex_gaussian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MatLinearMap:
    """
    线性映射 φ: M_n → M_d

    action 是形状为 (n, n, d, d) 的只读数组，action[i, j] = φ(E_ij)。
    """

    action: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = np.array(self.action, dtype=np.complex128, copy=True)
        if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3] or 0 in arr.shape:
            raise ShapeError(f"作用数组形状必须为 (n, n, d, d)，得到 {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "action", arr)

    @property
    def n(self) -> int:
        return self.action.shape[0]

    @property
    def d(self) -> int:
        return self.action.shape[2]

    def hermiticity_defect(self) -> float:
        """max_ij ‖φ(E_ji) − φ(E_ij)*‖_F"""
        swapped = np.conj(self.action.transpose(1, 0, 3, 2))
        return float(np.max(np.linalg.norm(self.action - swapped, axis=(2, 3))))

    def is_hermiticity_preserving(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.action))))
        return self.hermiticity_defect() <= tol * scale

    def __repr__(self) -> str:
        return f"MatLinearMap(n={self.n}, d={self.d})"


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus 形式 φ(X) = Σ_t K_t X K_t*，每个 K_t 为 d×n"""

    n: int
    d: int
    kraus: Tuple[CMatrix, ...] = ()

    def __post_init__(self) -> None:
        ops = []
        for k in self.kraus:
            k = np.array(as_cmatrix(k), copy=True)
            if k.shape != (self.d, self.n):
                raise ShapeError(f"Kraus 算子形状必须为 ({self.d}, {self.n})，得到 {k.shape}")
            k.flags.writeable = False
            ops.append(k)
        object.__setattr__(self, "kraus", tuple(ops))

    def __len__(self) -> int:
        return len(self.kraus)

    def to_map(self) -> MatLinearMap:
        return from_kraus(self)

    def apply(self, x: CMatrix) -> CMatrix:
        x = as_cmatrix(x)
        out = np.zeros((self.d, self.d), dtype=np.complex128)
        for k in self.kraus:
            out += k @ x @ adjoint(k)
        return out


def from_function(n: int, d: int, f: Callable[[CMatrix], CMatrix]) -> MatLinearMap:
    """由 φ 在矩阵单位上的取值构造映射"""
    action = np.empty((n, n, d, d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            value = as_cmatrix(f(matrix_unit(n, i, j)))
            if value.shape != (d, d):
                raise ShapeError(f"φ(E_{i}{j}) 的形状应为 ({d}, {d})，得到 {value.shape}")
            action[i, j] = value
    return MatLinearMap(action)


def from_kraus(ks: KrausSet) -> MatLinearMap:
    """φ(E_ij) = Σ_t K_t[:, i] K_t[:, j]*"""
    if not ks.kraus:
        return MatLinearMap(np.zeros((ks.n, ks.n, ks.d, ks.d), dtype=np.complex128))
    stacked = np.array(ks.kraus)  # (t, d, n)
    return MatLinearMap(np.einsum("tai,tbj->ijab", stacked, np.conj(stacked)))


def identity_map(n: int) -> MatLinearMap:
    return from_function(n, n, lambda e: e)


def transpose_map(n: int) -> MatLinearMap:
    """X ↦ Xᵀ，正但不完全正 (n ≥ 2)"""
    return from_function(n, n, lambda e: e.T)


def unitary_conjugation_map(u: CMatrix) -> MatLinearMap:
    u = as_cmatrix(u)
    return from_function(u.shape[1], u.shape[0], lambda e: u @ e @ adjoint(u))


def completely_depolarizing_map(n: int, d: int) -> MatLinearMap:
    """X ↦ tr(X)·I_d/d"""
    eye = np.eye(d, dtype=np.complex128) / d
    return from_function(n, d, lambda e: np.trace(e) * eye)


def schur_multiplier_map(r: CMatrix) -> MatLinearMap:
    """Schur 乘子 S ↦ R ∘ S，作为 M_n → M_n 的映射；R 半正定时完全正"""
    r = as_cmatrix(r)
    if r.shape[0] != r.shape[1]:
        raise ShapeError(f"R 必须是方阵，得到 {r.shape}")
    return from_function(r.shape[0], r.shape[0], lambda e: r * e)


def kron_left_map(r: CMatrix, n: int) -> MatLinearMap:
    """L_r: s ↦ r ⊗ s，M_n → M_{mn}"""
    r = as_cmatrix(r)
    return from_function(n, r.shape[0] * n, lambda e: kron(r, e))


def kron_right_map(r: CMatrix, n: int) -> MatLinearMap:
    """s ↦ s ⊗ r，M_n → M_{nm}"""
    r = as_cmatrix(r)
    return from_function(n, n * r.shape[0], lambda e: kron(e, r))


def canonical_omega(n: int) -> BlockMatrix:
    """Ω = [E_ij] ∈ M_n(M_n)⁺，展平后为 n 倍的秩一投影"""
    return BlockMatrix.from_grid([[matrix_unit(n, i, j) for j in range(n)] for i in range(n)])


def choi(phi: MatLinearMap) -> BlockMatrix:
    """Choi 矩阵 [φ(E_ij)]"""
    return BlockMatrix(phi.action)


def is_cp(phi: MatLinearMap, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> PsdReport:
    """
    完全正性判定: Choi 矩阵半正定当且仅当 φ 完全正。

    不保持 Hermite 性的映射其 Choi 矩阵不是 Hermite 的，此时抛出 NotHermitianError
    而不是返回否定结论。
    """
    return psd_check(flatten(choi(phi)), rtol=rtol, atol=atol)


def apply(phi: MatLinearMap, x: CMatrix) -> CMatrix:
    """φ(X) = Σ_ij x_ij·φ(E_ij)"""
    x = as_cmatrix(x)
    if x.shape != (phi.n, phi.n):
        raise ShapeError(f"输入应为 {phi.n}×{phi.n}，得到 {x.shape}")
    return np.einsum("ij,ijab->ab", x, phi.action)


def extend_apply(phi: MatLinearMap, r: BlockMatrix) -> CMatrix:
    """
    放大映射 φ_A = id_A ⊗ φ 作用于 R ∈ M_n(M_m)

    结果为 Σ_ij kron(r_ij, φ(E_ij))，m 维下标在外层；与 sum_contract(R, choi(φ)) 完全相同。
    """
    if r.n != phi.n:
        raise ShapeError(f"R 的外层尺寸 {r.n} 与映射输入维数 {phi.n} 不一致")
    return sum_contract(r, choi(phi))


def kraus(
    phi: MatLinearMap,
    rank_tol: float = 1e-10,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> KrausSet:
    """
    由 Choi 矩阵的谱分解构造 Kraus 算子

    Args:
        phi: 完全正映射
        rank_tol: 相对秩截断，保留 λ_t > rank_tol·λ_max 的特征向量

    Returns:
        KrausSet，[K_t]_{α,i} = √λ_t·w_t[i·d+α]

    Raises:
        NotCPError: Choi 矩阵未通过半正定检查
    """
    report = is_cp(phi, rtol=rtol, atol=atol)
    if not report.is_psd:
        raise NotCPError(report)
    eigenvalues, eigenvectors = eig_hermitian(flatten(choi(phi)))
    lam_max = float(eigenvalues[-1])
    if lam_max <= 0.0:
        logger.warning("Choi 矩阵为零，返回空的 Kraus 集合")
        return KrausSet(phi.n, phi.d, ())
    keep = np.flatnonzero(eigenvalues > rank_tol * lam_max)
    ops = [
        np.sqrt(eigenvalues[t]) * eigenvectors[:, t].reshape(phi.n, phi.d).T
        for t in keep[::-1]
    ]
    logger.debug(f"kraus: n={phi.n} d={phi.d} 秩={len(ops)}")
    return KrausSet(phi.n, phi.d, tuple(ops))


def kraus_residual(phi: MatLinearMap, ks: KrausSet) -> float:
    """max_ij ‖Σ_t K_t E_ij K_t* − φ(E_ij)‖_F"""
    if (ks.n, ks.d) != (phi.n, phi.d):
        raise ShapeError(f"维数不一致: 映射为 ({phi.n}, {phi.d})，Kraus 集合为 ({ks.n}, {ks.d})")
    diff = from_kraus(ks).action - phi.action
    return float(np.max(np.linalg.norm(diff, axis=(2, 3))))


def _probe_vectors(n: int, trials: int, seed: SeedLike) -> Iterator[CMatrix]:
    for i in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[i] = 1.0
        yield e
    base = as_seed(seed)
    for t in range(trials):
        x = complex_gaussian(bit_generator(base.derive(t)), (n,))
        yield x / np.linalg.norm(x)


def positive_map_falsify(
    phi: MatLinearMap,
    trials: int = 1000,
    seed: SeedLike = 0,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Optional[CMatrix]:
    """
    单侧随机检验 φ 是否为正映射。

    先试标准基向量 e_0…e_{n−1}，再试 trials 个种子确定的随机单位向量 x，返回第一个使
    φ(xx*) 不半正定(或不是 Hermite)的 x；找不到时返回 None，这并不证明 φ 是正的。
    """
    for x in _probe_vectors(phi.n, trials, seed):
        out = apply(phi, np.outer(x, np.conj(x)))
        try:
            report = psd_check(out, rtol=rtol, atol=atol)
        except NotHermitianError:
            logger.info("找到反例: φ(xx*) 不是 Hermite 的")
            return x
        if not report.is_psd:
            logger.info(f"找到反例: λ_min(φ(xx*)) = {report.min_eigenvalue:.3e}")
            return x
    return None
