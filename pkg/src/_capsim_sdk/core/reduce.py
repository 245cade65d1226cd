from concurrent.futures import ThreadPoolExecutor
from typing import Callable
from typing import List
from typing import Sequence
from typing import Tuple

import numpy as np
from boltons.iterutils import chunk_ranges

# evaluates rows [start, stop) and returns a (stop - start, K) block
BlockFn = Callable[[int, int], np.ndarray]


class ChunkReducer:
    """
    Sums per-event spend blocks over an index range with a result that does not depend on thread count.

    The range is cut into chunks of `chunk_size` rows aligned at the range start. Each chunk is summed on its own
    (possibly on a worker thread) and the chunk sums are folded strictly in chunk order, starting from zeros.
    Two ranges with the same start therefore share chunk boundaries, which lets callers reuse chunk sums computed
    for a longer range when reducing a shorter one.

    **Parameters**:

    * **chunk_size**: `int` - Rows per chunk.
    * **workers**: `int` - Threads evaluating chunks. `1` evaluates inline.
    """

    def __init__(self, chunk_size: int = 4096, workers: int = 1):
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}.")
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}.")
        self.chunk_size = chunk_size
        self.workers = workers

    def __repr__(self):
        return f"ChunkReducer(chunk_size={self.chunk_size}, workers={self.workers})"

    @classmethod
    def from_settings(cls, settings):
        return cls(chunk_size=settings.chunk_size, workers=settings.workers)

    def ranges(self, start: int, stop: int) -> List[Tuple[int, int]]:
        if stop <= start:
            return []
        return list(chunk_ranges(stop - start, self.chunk_size, input_offset=start))

    def chunk_sums(self, fn: BlockFn, start: int, stop: int, width: int) -> np.ndarray:
        """Returns an (n_chunks, width) array of per-chunk column sums over rows [start, stop)."""
        ranges = self.ranges(start, stop)
        if not ranges:
            return np.zeros((0, width))

        def _sum(bounds):
            return np.asarray(fn(*bounds), dtype=np.float64).sum(axis=0)

        if self.workers == 1 or len(ranges) == 1:
            sums = [_sum(r) for r in ranges]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                sums = list(pool.map(_sum, ranges))
        return np.vstack(sums).reshape(len(ranges), width)

    def reduce(self, fn: BlockFn, start: int, stop: int, width: int) -> np.ndarray:
        return fold(self.chunk_sums(fn, start, stop, width), width)


def fold(partials: Sequence[np.ndarray], width: int) -> np.ndarray:
    """Adds `partials` left to right into a fresh zero vector."""
    total = np.zeros(width)
    for p in partials:
        total += p
    return total
