import hashlib
import json
import logging
from abc import ABC, abstractmethod
from collections import OrderedDict
from typing import Any, Callable, Optional

logger = logging.getLogger(__name__)


def cache_key(namespace: str, params: Any) -> str:
    """sha224 of the canonical JSON of ``params``, prefixed by ``namespace``."""
    raw = json.dumps(params, sort_keys=True, separators=(",", ":"), default=str)
    return f"{namespace}:{hashlib.sha224(raw.encode()).hexdigest()}"


class CacheBackend(ABC):
    """Abstract base class for memo backends.

    Values stored here are immutable lab objects (enumerated measures,
    generator bundles, eigendecompositions). A backend never copies them.
    """

    @abstractmethod
    def get(self, key: str) -> Optional[Any]:
        pass

    @abstractmethod
    def set(self, key: str, value: Any):
        pass

    @abstractmethod
    def delete(self, key: str):
        pass

    @abstractmethod
    def clear(self):
        pass

    def get_or_build(self, key: str, build: Callable[[], Any]) -> Any:
        hit = self.get(key)
        if hit is not None:
            logger.debug(f"Cache hit: {key}")
            return hit
        value = build()
        self.set(key, value)
        return value


class CacheManager(CacheBackend):
    """Bounded in-memory LRU cache.

    Usage:
        cache = CacheManager(max_entries=32)
        measure = cache.get_or_build(cache_key("measure", params), lambda: enumerate_measure(...))
    """

    def __init__(self, max_entries: int = 64):
        if max_entries < 1:
            raise ValueError("max_entries must be positive")
        self.max_entries = max_entries
        self._store: "OrderedDict[str, Any]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def get(self, key: str) -> Optional[Any]:
        if key not in self._store:
            self.misses += 1
            return None
        self.hits += 1
        self._store.move_to_end(key)
        return self._store[key]

    def set(self, key: str, value: Any):
        self._store[key] = value
        self._store.move_to_end(key)
        while len(self._store) > self.max_entries:
            evicted, _ = self._store.popitem(last=False)
            logger.debug(f"Evicted {evicted}")

    def delete(self, key: str):
        self._store.pop(key, None)

    def clear(self):
        self._store.clear()

    def __len__(self) -> int:
        return len(self._store)
