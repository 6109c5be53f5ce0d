"""
性质检验活动 (fuzz suites)。

每个套件对若干随机实例逐一检验一条定理性质；第 idx 个实例使用子种子
seed.derive(套件编号, idx)，实例维数也从该子种子抽取，因此结果与执行顺序无关。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .block import compress_by_V, diag_compress, flatten
from .cpmaps import (
    canonical_omega,
    choi,
    extend_apply,
    is_cp,
    kraus,
    kraus_residual,
    kron_left_map,
    positive_map_falsify,
    schur_multiplier_map,
    transpose_map,
)
from .errors import TensorSchurError
from .linalg_core import PsdReport, eig_hermitian, kron, psd_check, spectrum_products
from .randgen import (
    random_block_psd,
    random_block_psd_grid,
    random_cp_map,
    random_psd,
)
from .schemas import SuiteSummary
from .schur_tensor import (
    all_ones,
    amplified_by_ones,
    as_scalar_blocks,
    contract_with_ones,
    kron_blocks,
    lr_amplified,
    schur,
    stack_grid,
    sum_contract,
    tensor_schur,
)
from .seeding import Seed, bit_generator, integer

logger = logging.getLogger(__name__)

SPECTRUM_TOL = 1e-8
CONTRACTION_TOL = 1e-12

# 放大类套件的维数包络，与全局上限取较小者
COR6_MAX_DIM = 3
COR7_MAX_K = 3
COR7_MAX_N = 3
COR7_MAX_M = 2


@dataclass(frozen=True)
class Limits:
    """实例维数上限与数值容差"""

    max_n: int = 4
    max_m: int = 3
    max_k: int = 3
    rtol: float = 1e-10
    atol: float = 1e-12
    rank_tol: float = 1e-10
    kraus_residual: float = 1e-8
    trials: int = 1000


@dataclass
class SuiteResult:
    suite: str
    checks: int = 0
    passed: int = 0
    failed: int = 0
    worst_min_eigenvalue: Optional[float] = None
    first_failure: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def observe(self, report: PsdReport) -> None:
        if self.worst_min_eigenvalue is None or report.min_eigenvalue < self.worst_min_eigenvalue:
            self.worst_min_eigenvalue = report.min_eigenvalue

    def record(self, failures: List[str], context: Dict[str, Any]) -> None:
        self.checks += 1
        if not failures:
            self.passed += 1
            return
        self.failed += 1
        if self.first_failure is None:
            self.first_failure = {**context, "reasons": failures}
            logger.warning(f"[{self.suite}] 实例 {context} 失败: {failures}")

    def to_summary(self) -> SuiteSummary:
        return SuiteSummary(
            suite=self.suite,
            verdict="pass" if self.ok else "fail",
            checks=self.checks,
            passed=self.passed,
            failed=self.failed,
            worst_min_eigenvalue=self.worst_min_eigenvalue,
            first_failure=self.first_failure,
        )


def _dim(bits: np.random.Philox, upper: int) -> int:
    return integer(bits, 1, max(1, upper))


def _spectra_match(a: np.ndarray, b: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return a.shape == b.shape and bool(np.max(np.abs(a - b)) <= SPECTRUM_TOL * scale)


# 单个实例的检验: (子种子, 上限, 结果) -> (失败原因列表, 实例描述)
InstanceCheck = Callable[[Seed, Limits, SuiteResult], Tuple[List[str], Dict[str, Any]]]


def _check_prop4(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    n, p, q = _dim(bits, limits.max_n), _dim(bits, limits.max_m), _dim(bits, limits.max_m)
    r = random_block_psd(n, p, sub.derive(1))
    s = random_block_psd(n, q, sub.derive(2))
    failures = []

    t = tensor_schur(r, s)
    report = psd_check(flatten(t), rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"R∘⊗S 不半正定: λ_min={report.min_eigenvalue:.3e}")

    # V(R⊗S)V* = R∘⊗S，选取与乘法两种形式都要逐位一致
    big = kron_blocks(r, s)
    selected = diag_compress(big)
    if not np.array_equal(selected.blocks, t.blocks):
        failures.append("diag_compress(R⊗S) ≠ R∘⊗S")
    if not np.array_equal(compress_by_V(big).blocks, selected.blocks):
        failures.append("V·(R⊗S)·V* ≠ diag_compress(R⊗S)")

    swapped, _ = eig_hermitian(flatten(tensor_schur(s, r)))
    original, _ = eig_hermitian(flatten(t))
    if not _spectra_match(original, swapped):
        failures.append("R∘⊗S 与 S∘⊗R 的谱不一致")
    return failures, {"n": n, "p": p, "q": q}


def _check_contract(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    n, p, q = _dim(bits, limits.max_n), _dim(bits, limits.max_m), _dim(bits, limits.max_m)
    r = random_block_psd(n, p, sub.derive(1))
    s = random_block_psd(n, q, sub.derive(2))
    failures = []

    total = sum_contract(r, s)
    oracle = contract_with_ones(tensor_schur(r, s))
    scale = max(1.0, float(np.max(np.abs(total))))
    if np.max(np.abs(total - oracle)) > CONTRACTION_TOL * scale:
        failures.append("Σ r_ij⊗s_ij ≠ 1ₙ*(R∘⊗S)1ₙ")
    report = psd_check(total, rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"Σ r_ij⊗s_ij 不半正定: λ_min={report.min_eigenvalue:.3e}")
    return failures, {"n": n, "p": p, "q": q}


def _check_cor6(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    max_nd, max_m = min(limits.max_n, COR6_MAX_DIM), min(limits.max_m, COR6_MAX_DIM)
    n, d, m = _dim(bits, max_nd), _dim(bits, max_nd), _dim(bits, max_m)
    num_kraus = _dim(bits, n * d)
    phi = random_cp_map(n, d, num_kraus, sub.derive(1))
    r = random_block_psd(n, m, sub.derive(2))
    failures = []

    if not phi.is_hermiticity_preserving():
        failures.append("Kraus 映射不保持 Hermite 性")
    cp_report = is_cp(phi, rtol=limits.rtol, atol=limits.atol)
    if not cp_report.is_psd:
        failures.append(f"Choi 矩阵不半正定: λ_min={cp_report.min_eigenvalue:.3e}")

    out = extend_apply(phi, r)
    if not np.array_equal(out, sum_contract(r, choi(phi))):
        failures.append("φ_A(R) ≠ Σ r_ij⊗φ(E_ij)")
    report = psd_check(out, rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"φ_A(R) 不半正定: λ_min={report.min_eigenvalue:.3e}")
    return failures, {"n": n, "d": d, "m": m, "num_kraus": num_kraus}


def _transpose_regression(limits: Limits, seed: Seed) -> List[str]:
    """转置映射: 正但不完全正"""
    failures = []
    phi = transpose_map(2)
    report = is_cp(phi, rtol=limits.rtol, atol=limits.atol)
    if report.is_psd or abs(report.min_eigenvalue + 1.0) > 1e-10:
        failures.append(f"转置映射的 Choi 最小特征值应为 −1，得到 {report.min_eigenvalue:.3e}")
    out = psd_check(extend_apply(phi, canonical_omega(2)), rtol=limits.rtol, atol=limits.atol)
    if out.is_psd or abs(out.min_eigenvalue + 1.0) > 1e-10:
        failures.append(f"φ_A(Ω) 的最小特征值应为 −1，得到 {out.min_eigenvalue:.3e}")
    if positive_map_falsify(phi, trials=limits.trials, seed=seed, rtol=limits.rtol, atol=limits.atol) is not None:
        failures.append("转置映射被误判为非正映射")
    return failures


def _check_cor7(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    k = _dim(bits, min(limits.max_k, COR7_MAX_K))
    n = _dim(bits, min(limits.max_n, COR7_MAX_N))
    p, q = _dim(bits, min(limits.max_m, COR7_MAX_M)), _dim(bits, min(limits.max_m, COR7_MAX_M))
    r = random_block_psd(n, p, sub.derive(1))
    s_hat = random_block_psd_grid(k, n, q, sub.derive(2))
    failures = []

    amplified = stack_grid(lr_amplified(r, s_hat))
    if not np.array_equal(amplified.blocks, amplified_by_ones(r, s_hat).blocks):
        failures.append("[L_R(S_αβ)] ≠ (J_k⊗R)∘⊗Ŝ")
    report = psd_check(flatten(amplified), rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"[L_R(S_αβ)] 不半正定: λ_min={report.min_eigenvalue:.3e}")
    return failures, {"k": k, "n": n, "p": p, "q": q}


def _projection_regression(limits: Limits, seed: Seed) -> List[str]:
    failures = []
    for k in range(1, limits.max_k + 1):
        proj = all_ones(k) / k
        if np.max(np.abs(proj @ proj - proj)) > 1e-12:
            failures.append(f"J_{k}/{k} 不是投影")
    return failures


def _check_schur(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    n = _dim(bits, 2 * limits.max_n)
    r = random_psd(n, n, sub.derive(1))
    s = random_psd(n, n, sub.derive(2))
    failures = []

    product = schur(r, s)
    if not np.array_equal(product, flatten(tensor_schur(as_scalar_blocks(r), as_scalar_blocks(s)))):
        failures.append("R∘S 与标量块张量 Schur 积不一致")
    report = psd_check(product, rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"R∘S 不半正定: λ_min={report.min_eigenvalue:.3e}")
    if not is_cp(schur_multiplier_map(r), rtol=limits.rtol, atol=limits.atol).is_psd:
        failures.append("Schur 乘子 S ↦ R∘S 不完全正")
    return failures, {"n": n}


def _check_kraus(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    n, d = _dim(bits, limits.max_n), _dim(bits, limits.max_n)
    num_kraus = _dim(bits, n * d)
    phi = random_cp_map(n, d, num_kraus, sub.derive(1))
    failures = []

    ks = kraus(phi, rank_tol=limits.rank_tol, rtol=limits.rtol, atol=limits.atol)
    residual = kraus_residual(phi, ks)
    if residual > limits.kraus_residual:
        failures.append(f"Kraus 重构残差 {residual:.3e} 超过 {limits.kraus_residual:.1e}")
    if not 1 <= len(ks) <= min(num_kraus, n * d):
        failures.append(f"Kraus 算子个数 {len(ks)} 超出 [1, {min(num_kraus, n * d)}]")
    return failures, {"n": n, "d": d, "num_kraus": num_kraus}


def _check_kron(sub: Seed, limits: Limits, result: SuiteResult) -> Tuple[List[str], Dict[str, Any]]:
    bits = bit_generator(sub.derive(0))
    a, b = _dim(bits, 2 * limits.max_m), _dim(bits, 2 * limits.max_m)
    r = random_psd(a, a, sub.derive(1))
    s = random_psd(b, b, sub.derive(2))
    failures = []

    product = kron(r, s)
    report = psd_check(product, rtol=limits.rtol, atol=limits.atol)
    result.observe(report)
    if not report.is_psd:
        failures.append(f"r⊗s 不半正定: λ_min={report.min_eigenvalue:.3e}")
    spectrum, _ = eig_hermitian(product)
    if not _spectra_match(spectrum, spectrum_products(r, s)):
        failures.append("σ(r⊗s) ≠ {λ_i μ_j}")
    if not is_cp(kron_left_map(r, b), rtol=limits.rtol, atol=limits.atol).is_psd:
        failures.append("L_r: s ↦ r⊗s 不完全正")
    return failures, {"a": a, "b": b}


# 套件名 -> (实例检验, 额外的固定回归检验)
SUITES: Dict[str, Tuple[InstanceCheck, Optional[Callable[[Limits, Seed], List[str]]]]] = {
    "prop4": (_check_prop4, None),
    "contract": (_check_contract, None),
    "cor6": (_check_cor6, _transpose_regression),
    "cor7": (_check_cor7, _projection_regression),
    "schur": (_check_schur, None),
    "kraus": (_check_kraus, None),
    "kron": (_check_kron, None),
}
SUITE_NAMES = list(SUITES)


def run_suite(name: str, seed: Seed, instances: int, limits: Limits = Limits(), progress: bool = False) -> SuiteResult:
    """运行单个套件"""
    if name not in SUITES:
        raise ValueError(f"未知套件: {name}，可选 {SUITE_NAMES}")
    if instances < 1:
        raise ValueError(f"instances 必须为正，得到 {instances}")
    check, regression = SUITES[name]
    suite_seed = seed.derive(SUITE_NAMES.index(name))
    result = SuiteResult(name)

    for idx in tqdm(range(instances), desc=f"fuzz {name}", disable=not progress):
        sub = suite_seed.derive(idx)
        try:
            failures, context = check(sub, limits, result)
        except TensorSchurError as e:
            # 维数可由子种子重现
            failures, context = [f"{type(e).__name__}: {e}"], {}
        result.record(failures, {"instance": idx, "seed": str(sub), **context})

    if regression is not None:
        result.record(regression(limits, suite_seed), {"instance": "regression"})

    logger.info(f"[{name}] 共 {result.checks} 项检验，通过 {result.passed}，失败 {result.failed}")
    return result


def run_suites(names: List[str], seed: Seed, instances: int, limits: Limits = Limits(), progress: bool = False) -> List[SuiteResult]:
    if "all" in names:
        names = SUITE_NAMES
    return [run_suite(name, seed, instances, limits, progress) for name in names]
