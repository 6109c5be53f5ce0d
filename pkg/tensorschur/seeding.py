"""
确定性随机源。

流水线:
    1. 64 位种子经 splitmix64 与流编号混合得到子种子 (Seed.derive)；
    2. 子种子直接作为 Philox4x64 计数器型生成器的 key (不经 SeedSequence 哈希)；
    3. Philox.random_raw 输出的 64 位整数取高 53 位映射为 (0, 1] 上的均匀数 u；
    4. 相邻两个均匀数 (u1, u2) 经 Box–Muller 变换得到 r·cos(2πu2) 与 r·sin(2πu2)，
       r = √(−2 ln u1)，分别作实部与虚部，再除以 √2 得到 E|z|² = 1 的标准复高斯数。
只用到 bit generator 的原始输出，不依赖 numpy Generator 各分布方法的实现。
相同种子在同一版本内产生逐位相同的序列，与线程调度无关。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """splitmix64 的终结混合函数"""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Seed:
    """64 位无符号种子"""

    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"种子必须是整数，得到 {type(self.value).__name__}")
        if not 0 <= self.value <= MASK64:
            raise ValueError(f"种子必须在 [0, 2^64) 内，得到 {self.value}")

    def derive(self, *stream: int) -> Seed:
        """按流编号派生子种子，(seed, a, b) 与 (seed, b, a) 互不相同"""
        value = self.value
        for index in stream:
            value = splitmix64(value ^ splitmix64(index & MASK64))
        return Seed(value)

    def __str__(self) -> str:
        return f"0x{self.value:016x}"


SeedLike = Union[Seed, int, str]


def parse_seed(text: str) -> Seed:
    """解析十进制或 0x 开头的十六进制种子字符串"""
    cleaned = text.strip().lower().replace("_", "")
    try:
        value = int(cleaned, 16) if cleaned.startswith("0x") else int(cleaned, 10)
    except ValueError:
        raise ValueError(f"无法解析种子: {text!r}") from None
    return Seed(value)


def as_seed(seed: SeedLike) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, str):
        return parse_seed(seed)
    return Seed(seed)


def bit_generator(seed: SeedLike) -> np.random.Philox:
    return np.random.Philox(key=as_seed(seed).value)


def uniform(bits: np.random.Philox, count: int) -> np.ndarray:
    """count 个 (0, 1] 上的均匀数，取每个 64 位输出的高 53 位"""
    raw = np.asarray(bits.random_raw(count), dtype=np.uint64)
    return ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def integer(bits: np.random.Philox, low: int, high: int) -> int:
    """[low, high] 上的整数 (取模，span 很小时偏差可以忽略)"""
    if high < low:
        raise ValueError(f"空区间 [{low}, {high}]")
    span = high - low + 1
    return low + int(int(bits.random_raw()) % span)


def complex_gaussian(bits: np.random.Philox, shape: Tuple[int, ...]) -> np.ndarray:
    """独立同分布的标准复高斯数组 (Box–Muller)"""
    count = int(np.prod(shape, dtype=np.int64))
    u = uniform(bits, 2 * count)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = (radius * np.cos(angle) + 1j * (radius * np.sin(angle))) / np.sqrt(2.0)
    return z.reshape(shape)
