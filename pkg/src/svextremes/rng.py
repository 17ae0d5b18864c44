"""Reproducible random number streams.

All randomness in the toolkit flows through an RngSeed: a (master_seed,
stream_id) pair that is expanded into independent substreams through
numpy's SeedSequence spawning. The underlying bit generator is Philox,
a counter-based generator, so a stream is fully determined by its key
and never depends on how much another stream has consumed. Parallel
code partitions work into fixed-size chunks, gives every chunk its own
substream, and reduces results in chunk order; the thread count can
then never change a result, only the wall-clock time.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = ["RngSeed", "chunk_sizes", "chunked_map"]

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    """Seed for one logical random stream.

    master_seed identifies the whole experiment, stream_id one stream
    inside it. Substreams for internal purposes (noise sequences,
    Monte Carlo chunks, calibration runs) are derived with generator(),
    which appends a path of integers to the spawn key.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise TypeError(f"{name} must be an integer")
            if not 0 <= int(v) <= _U64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self, *path: int) -> np.random.Generator:
        """Generator for the substream addressed by `path`."""
        ss = np.random.SeedSequence(int(self.master_seed),
                                    spawn_key=(int(self.stream_id), *map(int, path)))
        return np.random.Generator(np.random.Philox(ss))

    def with_stream(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.master_seed, stream_id)

    def child(self, *path: int) -> "RngSeed":
        """Derived seed for a nested component that itself needs an RngSeed.

        The child key is produced by the same SeedSequence expansion as
        generator(), so children at distinct paths are independent and the
        derivation is deterministic.
        """
        ss = np.random.SeedSequence(int(self.master_seed),
                                    spawn_key=(int(self.stream_id), *map(int, path)))
        st = ss.generate_state(2, np.uint64)
        return RngSeed(int(st[0]), int(st[1]))

    def to_json(self) -> dict:
        return {"master_seed": int(self.master_seed), "stream_id": int(self.stream_id)}

    @staticmethod
    def from_json(obj: dict) -> "RngSeed":
        return RngSeed(int(obj["master_seed"]), int(obj.get("stream_id", 0)))


def chunk_sizes(total: int, chunk: int) -> list[int]:
    """Split `total` into fixed chunks. The split depends only on the
    arguments, never on the number of workers."""
    if total < 0 or chunk < 1:
        raise ValueError("need total >= 0 and chunk >= 1")
    full, rem = divmod(total, chunk)
    out = [chunk] * full
    if rem:
        out.append(rem)
    return out


def chunked_map(fn, n_chunks: int, threads: int = 1) -> list:
    """Evaluate fn(0..n_chunks-1) and return results in index order.

    With threads > 1 the calls run on a thread pool; the caller must make
    fn(i) depend only on i (e.g. by deriving a substream from i), so the
    result list is identical for every thread count.
    """
    if n_chunks == 0:
        return []
    if threads <= 1 or n_chunks == 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=min(threads, n_chunks)) as ex:
        return list(ex.map(fn, range(n_chunks)))
