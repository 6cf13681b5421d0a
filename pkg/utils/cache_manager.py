"""
Structure Constant Cache
Location: abw_lab/utils/cache_manager.py
Memoizes products of basis classes so repeated ring computations are cheap

SAVES IT TO (only when a cache_dir is configured):
Folder: config.CACHE_DIR
File: structure_constants.json

Reads are lock-free; writes are serialized by a lock. Inserts only mark the
table dirty; save() writes the JSON copy once per batch of work.
"""

import hashlib
import json
import os
import threading
from typing import Dict, Optional, Sequence, Tuple

CACHE_FORMAT_VERSION = 1

# (degree, parts) -> coefficient, flattened for JSON as [[d, [parts...], coeff], ...]
Product = Dict[Tuple[int, Tuple[int, ...]], int]


class StructureConstantCache:
    """Caches basis products keyed by (kind, n, r, lambda, mu)"""

    def __init__(self, cache_dir: Optional[str] = None, verbose: bool = False):
        """
        Initialize the cache

        Args:
            cache_dir: Directory for the JSON copy (None = memory only)
            verbose: Print status lines
        """
        self.cache_dir = cache_dir
        self.verbose = verbose
        self.cache: Dict[str, Product] = {}
        self.hits = 0
        self.misses = 0
        self._dirty = False
        self._lock = threading.Lock()

        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            self._load_cache()

        if verbose:
            print(f" Structure constant cache initialized (entries: {len(self.cache)})")

    @staticmethod
    def _generate_key(kind: str, n: int, r: int, lam: Sequence[int], mu: Sequence[int]) -> str:
        """Key from product kind, ambient Grassmannian and the two partitions"""
        # Products are commutative; normalize the order
        a, b = sorted([tuple(lam), tuple(mu)])
        key_string = f"{kind}|{n}|{r}|{list(a)}|{list(b)}"
        return hashlib.md5(key_string.encode()).hexdigest()

    def get(self, kind: str, n: int, r: int, lam: Sequence[int], mu: Sequence[int]) -> Optional[Product]:
        """Cached product or None"""
        key = self._generate_key(kind, n, r, lam, mu)
        entry = self.cache.get(key)
        if entry is None:
            self.misses += 1
            return None
        self.hits += 1
        return entry

    def set(self, kind: str, n: int, r: int, lam: Sequence[int], mu: Sequence[int], product: Product):
        """Store a product"""
        key = self._generate_key(kind, n, r, lam, mu)
        with self._lock:
            self.cache[key] = dict(product)
            self._dirty = True

    def save(self) -> bool:
        """Flush new entries to structure_constants.json; True when a file was written"""
        with self._lock:
            if not (self.cache_dir and self._dirty):
                return False
            self._save_cache()
            self._dirty = False
        if self.verbose:
            print(f" Saved {len(self.cache)} structure constants")
        return True

    def clear(self):
        """Clear entire cache"""
        with self._lock:
            self.cache = {}
            self.hits = 0
            self.misses = 0
            self._dirty = False
            if self.cache_dir:
                self._save_cache()
        if self.verbose:
            print(" Structure constant cache cleared")

    def get_stats(self) -> Dict:
        """Cache statistics"""
        lookups = self.hits + self.misses
        return {
            'total_entries': len(self.cache),
            'hits': self.hits,
            'misses': self.misses,
            'hit_rate': round(self.hits / lookups * 100, 2) if lookups else 0,
            'persistent': bool(self.cache_dir),
        }

    def _save_cache(self):
        """Persist cache to disk (caller holds the lock)"""
        filepath = os.path.join(self.cache_dir, "structure_constants.json")
        payload = {
            'version': CACHE_FORMAT_VERSION,
            'entries': {
                key: [[d, list(parts), coeff] for (d, parts), coeff in product.items()]
                for key, product in self.cache.items()
            },
        }
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(payload, f)

    def _load_cache(self):
        """Load cache from disk"""
        filepath = os.path.join(self.cache_dir, "structure_constants.json")
        if not os.path.exists(filepath):
            return

        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                payload = json.load(f)
            if payload.get('version') != CACHE_FORMAT_VERSION:
                return
            self.cache = {
                key: {(d, tuple(parts)): coeff for d, parts, coeff in rows}
                for key, rows in payload['entries'].items()
            }
        except (OSError, ValueError, KeyError) as e:
            print(f" Error loading structure constant cache: {e}")
            self.cache = {}


_default_cache: Optional[StructureConstantCache] = None
_default_lock = threading.Lock()


def get_default_cache() -> StructureConstantCache:
    """Process-wide cache configured from config.py"""
    global _default_cache
    if _default_cache is None:
        with _default_lock:
            if _default_cache is None:
                from config import CACHE_DIR, VERBOSE
                _default_cache = StructureConstantCache(cache_dir=CACHE_DIR, verbose=VERBOSE)
    return _default_cache
