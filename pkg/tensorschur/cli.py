#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口: 读取矩阵/映射文件，执行运算与性质检验，输出单行 JSON 报告。

退出码: 0 = 肯定结论(psd/cp/pass)，1 = 否定结论(not-psd/not-cp/fail)，2 = 用法或输入错误。
报告写到标准输出，日志写到标准错误。
"""

import argparse
import logging
import math
import sys
import time
import traceback
from typing import Any, Callable, Dict, List, Optional

from .block import flatten
from .campaigns import SUITE_NAMES, Limits, run_suites
from .config import DEFAULT_CONFIG_PATH, Settings, create_default_config, load_settings, resolve_config_path
from .cpmaps import MatLinearMap, choi, extend_apply, is_cp, kraus, kraus_residual, positive_map_falsify
from .errors import NotCPError, NotHermitianError
from .linalg_core import CMatrix, PsdReport, psd_check
from .schemas import MatrixFile, Report, counterexample_payload, read_matrix_file, write_matrix_file
from .schur_tensor import tensor_schur
from .seeding import parse_seed

logger = logging.getLogger(__name__)


def _psd_fields(report: PsdReport) -> Dict[str, Any]:
    return {
        "min_eigenvalue": report.min_eigenvalue,
        "max_eigenvalue": report.max_eigenvalue,
        "tolerance": report.tolerance_used,
        "hermiticity_defect": report.hermiticity_defect,
    }


def _assess_output(command: str, a: CMatrix, settings: Settings, **extra: Any) -> Report:
    """对计算结果做半正定判定；结果不是 Hermite 时直接判为 not-psd"""
    try:
        report = psd_check(a, rtol=settings.rtol, atol=settings.atol, hermiticity_tol=settings.hermiticity)
    except NotHermitianError as e:
        return Report(command=command, verdict="not-psd", hermiticity_defect=e.defect, message=str(e), **extra)
    return Report(command=command, verdict="psd" if report.is_psd else "not-psd", **_psd_fields(report), **extra)


def cmd_psd(args: argparse.Namespace, settings: Settings) -> Report:
    a = read_matrix_file(args.file).as_dense()
    report = psd_check(a, rtol=settings.rtol, atol=settings.atol, hermiticity_tol=settings.hermiticity)
    return Report(command="psd", verdict="psd" if report.is_psd else "not-psd", **_psd_fields(report))


def cmd_tschur(args: argparse.Namespace, settings: Settings) -> Report:
    r = read_matrix_file(args.file_r).as_block()
    s = read_matrix_file(args.file_s).as_block()
    t = tensor_schur(r, s)
    if args.out:
        write_matrix_file(args.out, MatrixFile.from_block(t))
    return _assess_output("tschur", flatten(t), settings, output=args.out, details={"n": t.n, "m": t.m})


def _cp_report(command: str, phi: MatLinearMap, settings: Settings, **extra: Any) -> Report:
    report = is_cp(phi, rtol=settings.rtol, atol=settings.atol)
    return Report(command=command, verdict="cp" if report.is_psd else "not-cp", **_psd_fields(report), **extra)


def cmd_choi(args: argparse.Namespace, settings: Settings) -> Report:
    phi = read_matrix_file(args.mapfile).as_map()
    if args.out:
        write_matrix_file(args.out, MatrixFile.from_block(choi(phi)))
    return _cp_report("choi", phi, settings, output=args.out, details={"n": phi.n, "d": phi.d})


def cmd_cp_check(args: argparse.Namespace, settings: Settings) -> Report:
    phi = read_matrix_file(args.mapfile).as_map()
    return _cp_report(
        "cp-check",
        phi,
        settings,
        details={"n": phi.n, "d": phi.d, "hermiticity_preserving": phi.is_hermiticity_preserving()},
    )


def cmd_kraus(args: argparse.Namespace, settings: Settings) -> Report:
    phi = read_matrix_file(args.mapfile).as_map()
    try:
        ks = kraus(phi, rank_tol=settings.rank_tol, rtol=settings.rtol, atol=settings.atol)
    except NotCPError as e:
        return Report(command="kraus", verdict="not-cp", message=str(e), **_psd_fields(e.report))
    if args.out:
        write_matrix_file(args.out, MatrixFile.from_kraus(ks))
    residual = kraus_residual(phi, ks)
    return Report(
        command="kraus",
        verdict="cp",
        output=args.out,
        details={"n": phi.n, "d": phi.d, "num_kraus": len(ks), "residual": residual},
    )


def cmd_extend(args: argparse.Namespace, settings: Settings) -> Report:
    phi = read_matrix_file(args.mapfile).as_map()
    r = read_matrix_file(args.blockfile).as_block()
    out = extend_apply(phi, r)
    if args.out:
        write_matrix_file(args.out, MatrixFile.from_matrix(out))
    return _assess_output("extend", out, settings, output=args.out, details={"m": r.m, "d": phi.d})


def cmd_falsify(args: argparse.Namespace, settings: Settings) -> Report:
    phi = read_matrix_file(args.mapfile).as_map()
    seed = parse_seed(settings.seed)
    x = positive_map_falsify(phi, trials=settings.trials, seed=seed, rtol=settings.rtol, atol=settings.atol)
    if x is None:
        return Report(command="falsify", verdict="pass", seed=str(seed), details={"trials": settings.trials})
    return Report(
        command="falsify",
        verdict="fail",
        seed=str(seed),
        counterexample=counterexample_payload(x),
        details={"trials": settings.trials},
    )


def cmd_fuzz(args: argparse.Namespace, settings: Settings) -> Report:
    seed = parse_seed(settings.seed)
    limits = Limits(
        max_n=settings.max_n,
        max_m=settings.max_m,
        max_k=settings.max_k,
        rtol=settings.rtol,
        atol=settings.atol,
        rank_tol=settings.rank_tol,
        kraus_residual=settings.kraus_residual,
        trials=settings.trials,
    )
    logger.info(f"fuzz: 套件={args.suite} 种子={seed} 实例数={settings.instances}")
    results = run_suites([args.suite], seed, settings.instances, limits, progress=args.progress)
    worst = [r.worst_min_eigenvalue for r in results if r.worst_min_eigenvalue is not None]
    return Report(
        command="fuzz",
        verdict="pass" if all(r.ok for r in results) else "fail",
        min_eigenvalue=min(worst) if worst else None,
        seed=str(seed),
        details={
            "instances": settings.instances,
            "max_n": settings.max_n,
            "max_m": settings.max_m,
            "max_k": settings.max_k,
            "rtol": settings.rtol,
            "atol": settings.atol,
        },
        suites=[r.to_summary() for r in results],
    )


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Report]] = {
    "psd": cmd_psd,
    "tschur": cmd_tschur,
    "choi": cmd_choi,
    "cp-check": cmd_cp_check,
    "kraus": cmd_kraus,
    "extend": cmd_extend,
    "falsify": cmd_falsify,
    "fuzz": cmd_fuzz,
}


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rtol", type=float, default=None, help="相对容差 (默认: 配置文件或 1e-10)")
    p.add_argument("--atol", type=float, default=None, help="绝对容差 (默认: 配置文件或 1e-12)")


def build_parser() -> argparse.ArgumentParser:
    """构建命令行参数解析器"""
    parser = argparse.ArgumentParser(prog="tensorschur", description="张量 Schur 积与完全正映射的数值工具")
    parser.add_argument("--config", "-c", type=str, default=None, help=f"配置文件路径 (默认: {DEFAULT_CONFIG_PATH})")
    parser.add_argument(
        "--log-level",
        type=str,
        default="info",
        choices=["debug", "info", "warning", "error"],
        help="日志级别 (默认: info)",
    )
    parser.add_argument("--no-progress", action="store_true", help="不显示进度条")
    parser.add_argument("--timing", action="store_true", help="在报告中加入耗时")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("init-config", help="创建默认配置文件")

    p = sub.add_parser("psd", help="半正定判定")
    p.add_argument("file", help="matrix 文件")
    _add_tolerances(p)

    p = sub.add_parser("tschur", help="张量 Schur 积 R ∘⊗ S")
    p.add_argument("file_r", help="R 的 block 文件")
    p.add_argument("file_s", help="S 的 block 文件")
    p.add_argument("--out", "-o", default=None, help="输出 block 文件")
    _add_tolerances(p)

    p = sub.add_parser("choi", help="Choi 矩阵 [φ(E_ij)]")
    p.add_argument("mapfile", help="map 文件")
    p.add_argument("--out", "-o", default=None, help="输出 block 文件")
    _add_tolerances(p)

    p = sub.add_parser("cp-check", help="完全正性判定")
    p.add_argument("mapfile", help="map 文件")
    _add_tolerances(p)

    p = sub.add_parser("kraus", help="Kraus 分解")
    p.add_argument("mapfile", help="map 文件")
    p.add_argument("--out", "-o", default=None, help="输出 kraus 文件")
    p.add_argument("--rank-tol", type=float, default=None, help="相对秩截断 (默认: 1e-10)")
    _add_tolerances(p)

    p = sub.add_parser("extend", help="放大映射 id_A ⊗ φ 作用于 R")
    p.add_argument("mapfile", help="map 文件")
    p.add_argument("blockfile", help="R 的 block 文件")
    p.add_argument("--out", "-o", default=None, help="输出 matrix 文件")
    _add_tolerances(p)

    p = sub.add_parser("falsify", help="随机检验映射的正性(只能证伪)")
    p.add_argument("mapfile", help="map 文件")
    p.add_argument("--trials", type=int, default=None, help="随机向量个数 (默认: 1000)")
    p.add_argument("--seed", type=str, default=None, help="十进制或 0x 十六进制种子")
    _add_tolerances(p)

    p = sub.add_parser("fuzz", help="运行性质检验套件")
    p.add_argument("--suite", default="all", choices=SUITE_NAMES + ["all"], help="检验套件 (默认: all)")
    p.add_argument("--seed", type=str, default=None, help="十进制或 0x 十六进制种子 (默认: 42)")
    p.add_argument("--instances", type=int, default=None, help="每个套件的实例数 (默认: 100)")
    p.add_argument("--max-n", type=int, default=None, help="外层尺寸上限")
    p.add_argument("--max-m", type=int, default=None, help="块尺寸上限")
    p.add_argument("--max-k", type=int, default=None, help="放大层数上限")
    _add_tolerances(p)

    return parser


def _settings_for(args: argparse.Namespace) -> Settings:
    settings = load_settings(args.config)
    overrides = {
        "rtol": getattr(args, "rtol", None),
        "atol": getattr(args, "atol", None),
        "rank_tol": getattr(args, "rank_tol", None),
        "seed": getattr(args, "seed", None),
        "instances": getattr(args, "instances", None),
        "max_n": getattr(args, "max_n", None),
        "max_m": getattr(args, "max_m", None),
        "max_k": getattr(args, "max_k", None),
        "trials": getattr(args, "trials", None),
    }
    return settings.override(**overrides)


def _validate(args: argparse.Namespace, settings: Settings) -> None:
    if args.command == "fuzz":
        for name in ("instances", "max_n", "max_m", "max_k"):
            if getattr(settings, name) < 1:
                raise ValueError(f"{name} 必须为正整数，得到 {getattr(settings, name)}")
    if settings.trials < 0:
        raise ValueError(f"trials 不能为负，得到 {settings.trials}")
    for name in ("rtol", "atol", "hermiticity", "rank_tol", "kraus_residual"):
        value = getattr(settings, name)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{name} 必须是非负有限数，得到 {value}")


def main(argv: Optional[List[str]] = None) -> int:
    """主函数：解析参数并分派子命令，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # 设置日志
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    args.progress = not args.no_progress and sys.stderr.isatty()

    if args.command == "init-config":
        create_default_config(resolve_config_path(args.config))
        return 0

    start = time.perf_counter()
    try:
        settings = _settings_for(args)
        _validate(args, settings)
        report = COMMANDS[args.command](args, settings)
    except (ValueError, OSError) as e:
        # ValueError 涵盖库内错误、JSON 与模型校验错误
        logger.error(f"{args.command} 失败: {e}")
        logger.debug(traceback.format_exc())
        report = Report(command=args.command, verdict="error", message=str(e))

    elapsed = time.perf_counter() - start
    logger.info(f"{args.command} 完成，结论 {report.verdict}，耗时: {elapsed:.3f}秒")
    if args.timing:
        report = report.model_copy(update={"elapsed_seconds": elapsed})

    try:
        text = report.to_json()
    except ValueError as e:
        # 结果溢出为 inf/nan 时无法写成 JSON
        logger.error(f"{args.command} 报告无法序列化: {e}")
        report = Report(command=args.command, verdict="error", message=f"结果含非有限数值: {e}")
        text = report.to_json()
    print(text)
    return report.exit_code
