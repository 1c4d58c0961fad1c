"""交互元组生成模块

按二进制掩码枚举 t 个参数的组合, 再为每个组合装入全部取值组合,
得到以掩码为键的未覆盖元组集合。
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional

import numpy as np

from ..config import get_settings
from ..data.models import CAConfig
from ..data.tuple_store import TupleStore
from ..utils import get_logger
from ..utils.errors import ConfigurationError, TupleSpaceError

logger = get_logger(__name__)


@dataclass
class MaskEnumerator:
    """按整数升序产生所有恰含 t 个 1 的 k 位掩码"""
    k: int
    t: int
    current: int = field(default=0, init=False)

    def __post_init__(self):
        if not 1 <= self.t <= self.k:
            raise ConfigurationError(f"strength t={self.t} must lie in [1, k={self.k}]",
                                     config_key="strength", value=self.t)
        self.current = 0

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        # index 0 never has t >= 1 ones, and 2^k - 1 must be reachable when t == k
        limit = 1 << self.k
        self.current += 1
        while self.current < limit:
            if bin(self.current).count("1") == self.t:
                return self.current
            self.current += 1
        raise StopIteration


def enumerate_masks(k: int, t: int) -> List[int]:
    """Return the C(k, t) masks with popcount t in ascending order."""
    if t > k:
        raise ConfigurationError(f"strength t={t} exceeds parameter count k={k}",
                                 config_key="strength", value=t)
    if t < 2:
        raise ConfigurationError("strength must be at least 2",
                                 config_key="strength", value=t)
    return list(MaskEnumerator(k, t))


def build_store(config: CAConfig, max_tuples: Optional[int] = None) -> TupleStore:
    """生成全部 t-way 交互元组并装入哈希集合

    Args:
        config: 问题实例
        max_tuples: 元组数上限, 默认取配置中的 max_tuples

    Returns:
        TupleStore: remaining 等于闭式元组总数

    Raises:
        TupleSpaceError: 元组数超过上限或平台整数宽度
    """
    limit = max_tuples if max_tuples is not None else get_settings().max_tuples
    count = config.tuple_count
    if count > np.iinfo(np.intp).max or count > limit:
        raise TupleSpaceError(
            f"{count} interaction tuples exceed the allowed maximum",
            tuple_count=count, limit=limit)

    masks = enumerate_masks(config.k, config.strength)
    store = TupleStore(config, masks)
    logger.debug(f"Built tuple store: {len(masks)} masks, {store.remaining} tuples")
    return store
