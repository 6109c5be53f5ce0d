"""tensorschur 的异常类型"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .linalg_core import PsdReport


class TensorSchurError(ValueError):
    """所有库内错误的基类，CLI 捕获后以退出码 2 结束"""


class ShapeError(TensorSchurError):
    """形状不合法：非方阵、外层尺寸不一致、无法分解为 n·m 等"""


class NotHermitianError(TensorSchurError):
    """矩阵的 Hermite 偏差超过阈值，此时谈正定性没有意义"""

    def __init__(self, defect: float, threshold: float):
        self.defect = defect
        self.threshold = threshold
        super().__init__(
            f"矩阵不是 Hermite 的: ‖A − A*‖_F = {defect:.3e} 超过阈值 {threshold:.3e}"
        )


class NotCPError(TensorSchurError):
    """Choi 矩阵未通过半正定检查，映射不是完全正的"""

    def __init__(self, report: PsdReport):
        self.report = report
        super().__init__(
            f"映射不是完全正的: Choi 矩阵最小特征值 {report.min_eigenvalue:.3e} "
            f"低于 −{report.tolerance_used:.3e}"
        )


class MatrixFileError(TensorSchurError):
    """矩阵文件格式错误"""
