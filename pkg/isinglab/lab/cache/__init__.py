from .manager import CacheBackend, CacheManager, cache_key

__all__ = ["CacheBackend", "CacheManager", "cache_key"]
