"""cachefx: quantitative security evaluation of cache designs.

Simulates nine cache architectures behind one line-granular access interface
and measures how much they leak: eviction-entropy profiling, eviction-set
construction, and end-to-end attacks on cryptographic victims.
"""

from .cache import DESIGNS, POLICIES, Cache, make_cache
from .core import AccessKind, AccessOutcome, AddressSpace, CacheStatistics, MemoryRegion

__all__ = [
    "AccessKind",
    "AccessOutcome",
    "AddressSpace",
    "Cache",
    "CacheStatistics",
    "DESIGNS",
    "MemoryRegion",
    "POLICIES",
    "make_cache",
]

__version__ = "0.1.0"
