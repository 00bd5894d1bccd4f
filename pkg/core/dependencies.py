from functools import lru_cache
from pathlib import Path
from typing import Optional

from .config import Settings
from services.kernel_cache import KernelCacheService
from services.run_service import RunService


@lru_cache
def get_settings() -> Settings:
    """
    Returns a cached instance of the process settings.
    The settings are loaded from environment variables and/or a .env file.
    Using lru_cache ensures the settings are loaded only once.
    """
    return Settings()


# One kernel cache per process; worker processes build their own.
_kernel_cache: Optional[KernelCacheService] = None


def get_kernel_cache(settings: Optional[Settings] = None) -> KernelCacheService:
    """
    Provides the process-wide KernelTable cache.

    It is created on first use with `KERNEL_CACHE_SIZE` entries.
    """
    global _kernel_cache
    if _kernel_cache is None:
        settings = settings or get_settings()
        _kernel_cache = KernelCacheService(max_size=settings.KERNEL_CACHE_SIZE)
    return _kernel_cache


def get_run_service(
    root: Optional[Path] = None, settings: Optional[Settings] = None
) -> RunService:
    """Returns a RunService rooted at `root` or at the configured OUTPUT_DIR."""
    settings = settings or get_settings()
    return RunService(root if root is not None else settings.OUTPUT_DIR)
