"""
矩阵文件与报告的 JSON 模型及读写。

矩阵文件中的复数写成 [re, im] 数组，按行优先展平；block/map 文件存放按 block 模块布局
展平后的矩阵。浮点数以 repr 写出(不超过 17 位有效数字)，读回后逐位相同。
"""

from __future__ import annotations

import logging
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

import numpy as np
import simplejson
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, model_validator

from .block import BlockMatrix, flatten, unflatten
from .cpmaps import KrausSet, MatLinearMap
from .errors import MatrixFileError
from .linalg_core import CMatrix, as_cmatrix

logger = logging.getLogger(__name__)

FiniteNumber = Annotated[float, Field(strict=True, allow_inf_nan=False)]
Verdict = Literal["psd", "not-psd", "cp", "not-cp", "pass", "fail", "error"]


def _pairs(values: np.ndarray) -> List[Tuple[float, float]]:
    return [(float(z.real), float(z.imag)) for z in np.asarray(values, dtype=np.complex128).ravel()]


def _complex(pairs: List[Tuple[float, float]]) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    out = np.empty(arr.shape[0], dtype=np.complex128)
    # 分别赋值实部与虚部，保留 −0.0 等位模式
    out.real = arr[:, 0]
    out.imag = arr[:, 1]
    return out


class MatrixFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["matrix", "block", "map", "kraus"]
    rows: Optional[PositiveInt] = None
    cols: Optional[PositiveInt] = None
    n: Optional[PositiveInt] = None
    m: Optional[PositiveInt] = None
    d: Optional[PositiveInt] = None
    count: Optional[int] = Field(default=None, ge=0)
    data: List[Tuple[FiniteNumber, FiniteNumber]]

    @model_validator(mode="after")
    def _check_dimensions(self) -> MatrixFile:
        required = {
            "matrix": ("rows", "cols"),
            "block": ("n", "m"),
            "map": ("n", "d"),
            "kraus": ("n", "d", "count"),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"kind={self.kind} 缺少字段: {', '.join(missing)}")
        if len(self.data) != self.expected_length():
            raise ValueError(f"data 长度 {len(self.data)} 与声明的维数不符，应为 {self.expected_length()}")
        return self

    def expected_length(self) -> int:
        if self.kind == "matrix":
            return self.rows * self.cols
        if self.kind == "block":
            return (self.n * self.m) ** 2
        if self.kind == "map":
            return (self.n * self.d) ** 2
        return self.count * self.d * self.n

    # 转换为内存对象

    def as_matrix(self) -> CMatrix:
        if self.kind != "matrix":
            raise MatrixFileError(f"需要 matrix 文件，得到 {self.kind}")
        return _complex(self.data).reshape(self.rows, self.cols)

    def as_dense(self) -> CMatrix:
        """matrix 原样返回；block/map 返回展平后的矩阵 (map 即 Choi 矩阵)"""
        if self.kind == "matrix":
            return self.as_matrix()
        if self.kind == "block":
            return flatten(self.as_block())
        if self.kind == "map":
            return flatten(BlockMatrix(self.as_map().action))
        raise MatrixFileError("kraus 文件没有对应的单个矩阵")

    def as_block(self) -> BlockMatrix:
        """block 文件，或把方阵 matrix 文件看作 BlockMatrix(n, 1)"""
        if self.kind == "block":
            side = self.n * self.m
            return unflatten(_complex(self.data).reshape(side, side), self.n, self.m)
        if self.kind == "matrix" and self.rows == self.cols:
            return unflatten(self.as_matrix(), self.rows, 1)
        raise MatrixFileError(f"需要 block 文件或方阵 matrix 文件，得到 {self.kind}")

    def as_map(self) -> MatLinearMap:
        if self.kind != "map":
            raise MatrixFileError(f"需要 map 文件，得到 {self.kind}")
        side = self.n * self.d
        choi = unflatten(_complex(self.data).reshape(side, side), self.n, self.d)
        return MatLinearMap(choi.blocks)

    def as_kraus(self) -> KrausSet:
        if self.kind != "kraus":
            raise MatrixFileError(f"需要 kraus 文件，得到 {self.kind}")
        ops = _complex(self.data).reshape(self.count, self.d, self.n)
        return KrausSet(self.n, self.d, tuple(ops))

    # 由内存对象构造

    @classmethod
    def from_matrix(cls, a: CMatrix) -> MatrixFile:
        a = as_cmatrix(a)
        return cls(kind="matrix", rows=a.shape[0], cols=a.shape[1], data=_pairs(a))

    @classmethod
    def from_block(cls, r: BlockMatrix) -> MatrixFile:
        return cls(kind="block", n=r.n, m=r.m, data=_pairs(flatten(r)))

    @classmethod
    def from_map(cls, phi: MatLinearMap) -> MatrixFile:
        return cls(kind="map", n=phi.n, d=phi.d, data=_pairs(flatten(BlockMatrix(phi.action))))

    @classmethod
    def from_kraus(cls, ks: KrausSet) -> MatrixFile:
        data = _pairs(np.array(ks.kraus)) if ks.kraus else []
        return cls(kind="kraus", n=ks.n, d=ks.d, count=len(ks), data=data)


def _reject_constant(name: str) -> float:
    raise ValueError(f"不允许非有限数值 {name}")


def loads_matrix_file(text: str) -> MatrixFile:
    """解析矩阵文件内容，任何格式问题都转换为 MatrixFileError"""
    try:
        obj = simplejson.loads(text, parse_constant=_reject_constant)
        return MatrixFile.model_validate(obj)
    except (ValueError, ValidationError) as e:
        # simplejson.JSONDecodeError 与 ValidationError 都是 ValueError
        raise MatrixFileError(f"矩阵文件无效: {e}") from e
    except RecursionError as e:
        raise MatrixFileError("矩阵文件嵌套层数过深") from e


def read_matrix_file(path: str) -> MatrixFile:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return loads_matrix_file(text)
    except MatrixFileError as e:
        raise MatrixFileError(f"{path}: {e}") from e


def dumps_matrix_file(mf: MatrixFile) -> str:
    return simplejson.dumps(mf.model_dump(exclude_none=True), allow_nan=False)


def write_matrix_file(path: str, mf: MatrixFile) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_matrix_file(mf) + "\n")
    logger.info(f"已写入 {mf.kind} 文件: {path}")


class SuiteSummary(BaseModel):
    suite: str
    verdict: Literal["pass", "fail"]
    checks: int
    passed: int
    failed: int
    worst_min_eigenvalue: Optional[float] = None
    first_failure: Optional[Dict[str, Any]] = None


class Report(BaseModel):
    command: str
    verdict: Verdict
    min_eigenvalue: Optional[float] = None
    max_eigenvalue: Optional[float] = None
    tolerance: Optional[float] = None
    hermiticity_defect: Optional[float] = None
    elapsed_seconds: Optional[float] = None
    seed: Optional[str] = None
    counterexample: Optional[List[Tuple[float, float]]] = None
    output: Optional[str] = None
    message: Optional[str] = None
    details: Optional[Dict[str, Any]] = None
    suites: Optional[List[SuiteSummary]] = None

    @property
    def exit_code(self) -> int:
        if self.verdict in ("psd", "cp", "pass"):
            return 0
        if self.verdict == "error":
            return 2
        return 1

    def to_json(self) -> str:
        """单行 JSON"""
        return simplejson.dumps(self.model_dump(exclude_none=True), allow_nan=False, separators=(",", ":"))


def counterexample_payload(x: np.ndarray) -> List[Tuple[float, float]]:
    return _pairs(x)
