import hashlib
from typing import List

import numpy as np

MASK_64 = (1 << 64) - 1


def tag_to_int(tag: str) -> int:
    """Stable 64-bit integer digest of a purpose tag."""
    return int.from_bytes(hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest(), "little")


def derive_seed_sequence(master: int, tag: str, index: int = 0) -> np.random.SeedSequence:
    """Counter-based child seed: ``stream = hash(master, tag, index)``.

    The result depends only on its three arguments, never on the order in
    which streams are requested, so parallel schedules cannot change it.

    Args:
        master (int): The 64-bit master seed of the run.
        tag (str): Purpose tag, e.g. ``"twa/noise"`` or ``"trajectories/jumps"``.
        index (int): Member, block or grid-point index.

    Returns:
        np.random.SeedSequence: The derived seed sequence.
    """
    if index < 0:
        raise ValueError(f"stream index must be non-negative, got {index}")
    return np.random.SeedSequence([master & MASK_64, tag_to_int(tag), index])


def derive_rng(master: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(master, tag, index))


def derive_child_seed(master: int, tag: str, index: int = 0) -> int:
    """64-bit integer seed for a sub-computation that takes its own master seed."""
    state = derive_seed_sequence(master, tag, index).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def block_slices(n_items: int, block_size: int) -> List[slice]:
    """Fixed partition of ``range(n_items)`` into consecutive blocks."""
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    return [slice(start, min(start + block_size, n_items)) for start in range(0, n_items, block_size)]
