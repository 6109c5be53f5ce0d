"""张量 Schur 积、Choi 判据与 Schur 乘子的数值实现"""

from .block import (
    BlockMatrix,
    IndexMap,
    build_compression_V,
    compress_by_V,
    diag_compress,
    flatten,
    pi_iso,
    pi_right,
    unflatten,
)
from .cpmaps import (
    KrausSet,
    MatLinearMap,
    apply,
    choi,
    extend_apply,
    identity_map,
    is_cp,
    kraus,
    positive_map_falsify,
    transpose_map,
)
from .errors import MatrixFileError, NotCPError, NotHermitianError, ShapeError, TensorSchurError
from .linalg_core import PsdReport, eig_hermitian, hermitize, kron, psd_check
from .randgen import ginibre, random_block_psd, random_cp_map, random_psd
from .schur_tensor import all_ones, lr_amplified, schur, sum_contract, tensor_schur
from .seeding import Seed, parse_seed

__version__ = "0.1.0"
