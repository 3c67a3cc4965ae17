from utils.accumulate import KahanSum, compensated_sum
from utils.logger import LoggerFactory
from utils.seeding import block_slices, derive_child_seed, derive_rng
from utils.singleton_meta import SingletonMeta

__all__ = [
    "KahanSum",
    "LoggerFactory",
    "SingletonMeta",
    "block_slices",
    "compensated_sum",
    "derive_child_seed",
    "derive_rng",
]
