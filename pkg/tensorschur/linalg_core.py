"""
稠密复矩阵内核: Kronecker 积、Hermite 化、Hermite 特征分解与带容差的半正定判定。

所有函数都是纯函数，输入不会被修改。复矩阵统一用 complex128 的二维 numpy 数组表示。
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple

import numpy as np
import numpy.typing as npt

from .errors import NotHermitianError, ShapeError

logger = logging.getLogger(__name__)

CMatrix = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
HERMITICITY_TOL = 1e-8


def as_cmatrix(a: Any) -> CMatrix:
    """把输入转换为 complex128 二维数组，不是二维时报错"""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or 0 in arr.shape:
        raise ShapeError(f"需要非空二维矩阵，得到形状 {arr.shape}")
    return arr


def _require_square(a: CMatrix, what: str = "矩阵") -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what}必须是方阵，得到形状 {a.shape}")


def matrix_unit(n: int, i: int, j: int) -> CMatrix:
    """矩阵单位 E_ij ∈ M_n (下标从 0 开始)"""
    if not (0 <= i < n and 0 <= j < n):
        raise ShapeError(f"下标 ({i}, {j}) 超出 M_{n} 的范围")
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def adjoint(a: CMatrix) -> CMatrix:
    return np.conj(a).T


def frobenius(a: CMatrix) -> float:
    return float(np.linalg.norm(a, "fro"))


def hermiticity_defect(a: CMatrix) -> float:
    """‖A − A*‖_F"""
    a = as_cmatrix(a)
    _require_square(a)
    return frobenius(a - adjoint(a))


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    """
    Kronecker 积 a ⊗ b，左因子在外层。

    结果在 (i·r+α, j·s+β) 处的元素为 a_ij·b_αβ，其中 b 的形状为 r×s。
    """
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def hermitize(a: CMatrix) -> CMatrix:
    """
    返回 (A + A*)/2。

    只计算上三角再镜像到下三角，对角线取实部，因此输出在存储层面精确 Hermite。
    """
    a = as_cmatrix(a)
    _require_square(a)
    half = (a + adjoint(a)) / 2
    upper = np.triu(half, 1)
    out = upper + adjoint(upper)
    np.fill_diagonal(out, half.diagonal().real)
    return out


def eig_hermitian(a: CMatrix, hermiticity_tol: float = HERMITICITY_TOL) -> Tuple[RealArray, CMatrix]:
    """
    Hermite 矩阵的特征分解

    Args:
        a: 方阵，Hermite 偏差不得超过 hermiticity_tol·max(1, ‖a‖_F)
        hermiticity_tol: 相对 Hermite 偏差阈值

    Returns:
        (升序特征值, 列正交归一的特征向量矩阵)

    Raises:
        ShapeError: 非方阵
        NotHermitianError: Hermite 偏差超过阈值
    """
    a = as_cmatrix(a)
    _require_square(a)
    defect = hermiticity_defect(a)
    threshold = hermiticity_tol * max(1.0, frobenius(a))
    if defect > threshold:
        raise NotHermitianError(defect, threshold)
    if defect > threshold / 10:
        logger.warning(f"Hermite 偏差 {defect:.3e} 接近阈值 {threshold:.3e}")
    eigenvalues, eigenvectors = np.linalg.eigh(hermitize(a))
    return eigenvalues, eigenvectors


@dataclass(frozen=True)
class PsdReport:
    """半正定判定结果，is_psd 当且仅当 min_eigenvalue ≥ −tolerance_used"""

    is_psd: bool
    min_eigenvalue: float
    max_eigenvalue: float
    tolerance_used: float
    hermiticity_defect: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def psd_check(
    a: CMatrix,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    hermiticity_tol: float = HERMITICITY_TOL,
) -> PsdReport:
    """
    判定 a 是否属于半正定锥

    容差为绝对量 rtol·‖a‖_F + atol，最小特征值不低于其相反数即视为半正定。
    """
    a = as_cmatrix(a)
    eigenvalues, _ = eig_hermitian(a, hermiticity_tol=hermiticity_tol)
    tolerance = rtol * frobenius(a) + atol
    lam_min = float(eigenvalues[0])
    lam_max = float(eigenvalues[-1])
    report = PsdReport(
        is_psd=lam_min >= -tolerance,
        min_eigenvalue=lam_min,
        max_eigenvalue=lam_max,
        tolerance_used=tolerance,
        hermiticity_defect=hermiticity_defect(a),
    )
    logger.debug(f"psd_check: dim={a.shape[0]} λ_min={lam_min:.3e} tol={tolerance:.3e} psd={report.is_psd}")
    return report


def spectrum_products(r: CMatrix, s: CMatrix) -> RealArray:
    """两个 Hermite 矩阵特征值两两乘积构成的多重集，升序排列"""
    lam, _ = eig_hermitian(r)
    mu, _ = eig_hermitian(s)
    return np.sort(np.outer(lam, mu).ravel())
