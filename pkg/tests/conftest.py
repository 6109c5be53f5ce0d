import numpy as np
import pytest

from tensorschur.block import BlockMatrix, flatten
from tensorschur.cpmaps import MatLinearMap
from tensorschur.schemas import MatrixFile, write_matrix_file


@pytest.fixture
def swap4():
    """4×4 交换矩阵 (M₂ 上转置映射的 Choi 矩阵)"""
    s = np.zeros((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            s[2 * i + j, 2 * j + i] = 1.0
    return s


@pytest.fixture
def write_file(tmp_path):
    """把矩阵、BlockMatrix 或映射写到临时目录并返回路径"""

    def _write(name, obj):
        if isinstance(obj, BlockMatrix):
            mf = MatrixFile.from_block(obj)
        elif isinstance(obj, MatLinearMap):
            mf = MatrixFile.from_map(obj)
        elif isinstance(obj, MatrixFile):
            mf = obj
        else:
            mf = MatrixFile.from_matrix(np.asarray(obj, dtype=np.complex128))
        path = str(tmp_path / name)
        write_matrix_file(path, mf)
        return path

    return _write


def assert_psd_flat(r: BlockMatrix, tol: float = 1e-10) -> None:
    lam = np.linalg.eigvalsh(flatten(r))
    assert lam[0] >= -tol * max(1.0, float(np.abs(lam).max()))
