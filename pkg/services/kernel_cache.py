from collections import OrderedDict
from typing import Tuple

from fields.grid import Grid
from logging_config import get_logger
from operators.kernels import KernelTable

logger = get_logger("kernel_cache")


class KernelCacheService:
    """
    A service for caching KernelTables in memory.

    This service implements the Cache-Aside pattern. Steppers and benches
    ask the cache for the table of a (grid, t) pair; on a miss the table is
    built, stored, and returned. Tables are immutable, so one instance can
    be shared by every consumer in the process. The least recently used
    table is evicted once `max_size` is reached.
    """

    def __init__(self, max_size: int = 16):
        """
        Initializes the cache.

        Args:
            max_size: Number of tables kept in memory.
        """
        if max_size < 1:
            raise ValueError(f"max_size must be >= 1, got {max_size}")
        self.max_size = max_size
        self._tables: "OrderedDict[Tuple[Grid, float], KernelTable]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _get_cache_key(grid: Grid, t: float) -> Tuple[Grid, float]:
        return (grid, float(t))

    def get(self, grid: Grid, t: float) -> KernelTable:
        """
        Returns the KernelTable for (grid, t), building it on a miss.

        Args:
            grid: Half-plane grid.
            t: Kernel time.
        """
        key = self._get_cache_key(grid, t)
        table = self._tables.get(key)
        if table is not None:
            self._tables.move_to_end(key)
            self.hits += 1
            logger.debug(
                f"Kernel cache HIT for t={t:.3e} on N1={grid.N1}, N2={grid.N2}"
            )
            return table

        self.misses += 1
        logger.debug(f"Kernel cache MISS for t={t:.3e} on N1={grid.N1}, N2={grid.N2}")
        table = KernelTable.build(grid, t)
        self.set(grid, t, table)
        return table

    def set(self, grid: Grid, t: float, table: KernelTable) -> None:
        """Stores a table, evicting the least recently used one if full."""
        key = self._get_cache_key(grid, t)
        self._tables[key] = table
        self._tables.move_to_end(key)
        while len(self._tables) > self.max_size:
            evicted, _ = self._tables.popitem(last=False)
            logger.debug(f"Evicted kernel table t={evicted[1]:.3e}")

    def __len__(self) -> int:
        return len(self._tables)

    def __call__(self, grid: Grid, t: float) -> KernelTable:
        return self.get(grid, t)
