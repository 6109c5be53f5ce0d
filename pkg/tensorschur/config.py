"""INI 配置文件的读取与生成"""

from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass, replace
from typing import Any, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "configs/tensorschur.ini"
CONFIG_ENV = "TENSORSCHUR_CONFIG"

REQUIRED_SECTIONS = ["tolerance", "kraus", "fuzz", "falsify"]

DEFAULTS = {
    "tolerance": {
        "rtol": "1e-10",
        "atol": "1e-12",
        "hermiticity": "1e-8",
    },
    "kraus": {
        "rank_tol": "1e-10",
        "residual": "1e-8",
    },
    "fuzz": {
        "seed": "42",
        "instances": "100",
        "max_n": "4",
        "max_m": "3",
        "max_k": "3",
    },
    "falsify": {
        "trials": "1000",
    },
}


@dataclass(frozen=True)
class Settings:
    rtol: float = 1e-10
    atol: float = 1e-12
    hermiticity: float = 1e-8
    rank_tol: float = 1e-10
    kraus_residual: float = 1e-8
    seed: str = "42"
    instances: int = 100
    max_n: int = 4
    max_m: int = 3
    max_k: int = 3
    trials: int = 1000

    def override(self, **kwargs: Any) -> Settings:
        """用命令行给出的非 None 值覆盖配置"""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def load_config(config_path: str) -> configparser.ConfigParser:
    """加载配置文件"""
    raw = configparser.ConfigParser()
    with open(config_path, "r", encoding="utf-8") as f:
        try:
            raw.read_file(f)
        except configparser.Error as e:
            raise ValueError(f"配置文件格式错误: {e}") from e

    # 验证必要的配置项
    for section in REQUIRED_SECTIONS:
        if not raw.has_section(section):
            raise ValueError(f"配置文件缺少必要的 [{section}] 部分")

    # 缺省的键取内置默认值
    config = configparser.ConfigParser()
    config.read_dict(DEFAULTS)
    config.read_dict({section: dict(raw.items(section, raw=True)) for section in raw.sections()})
    return config


def create_default_config(config_path: str) -> configparser.ConfigParser:
    """创建默认配置文件"""
    config = configparser.ConfigParser()
    config.read_dict(DEFAULTS)

    # 确保配置目录存在
    parent = os.path.dirname(config_path)
    if parent:
        os.makedirs(parent, exist_ok=True)

    with open(config_path, "w", encoding="utf-8") as f:
        config.write(f)

    logger.info(f"已创建默认配置文件: {config_path}")
    return config


def settings_from_config(config: configparser.ConfigParser) -> Settings:
    return Settings(
        rtol=config.getfloat("tolerance", "rtol"),
        atol=config.getfloat("tolerance", "atol"),
        hermiticity=config.getfloat("tolerance", "hermiticity"),
        rank_tol=config.getfloat("kraus", "rank_tol"),
        kraus_residual=config.getfloat("kraus", "residual"),
        seed=config.get("fuzz", "seed"),
        instances=config.getint("fuzz", "instances"),
        max_n=config.getint("fuzz", "max_n"),
        max_m=config.getint("fuzz", "max_m"),
        max_k=config.getint("fuzz", "max_k"),
        trials=config.getint("falsify", "trials"),
    )


def resolve_config_path(cli_path: Optional[str]) -> str:
    """命令行 > 环境变量(可来自 .env) > 默认路径"""
    if cli_path:
        return cli_path
    load_dotenv()
    return os.getenv(CONFIG_ENV, DEFAULT_CONFIG_PATH)


def load_settings(cli_path: Optional[str] = None) -> Settings:
    path = resolve_config_path(cli_path)
    if not os.path.exists(path):
        if cli_path:
            raise FileNotFoundError(f"配置文件不存在: {path}")
        logger.info(f"配置文件 {path} 不存在，使用内置默认值")
        return Settings()
    logger.info(f"使用配置文件: {path}")
    try:
        return settings_from_config(load_config(path))
    except configparser.Error as e:
        raise ValueError(f"配置项无效: {e}") from e
