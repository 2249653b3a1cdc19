"""Reference replacement-policy state machines, in plain Python.

These mirror the jitted policy logic one way per method call, with no shared
code: the test suite replays identical traces through both routes and demands
identical victim choices.  They model a single way range of one set.
"""

from __future__ import annotations


class LruPolicy:
    """True least-recently-used over ``ways`` slots."""

    def __init__(self, ways: int):
        self.ways = ways
        self._stamp = [0] * ways
        self._clock = 0

    def touch(self, way: int) -> None:
        self._clock += 1
        self._stamp[way] = self._clock

    def victim(self) -> int:
        return min(range(self.ways), key=lambda w: self._stamp[w])


class BitPlruPolicy:
    """One MRU bit per way; all bits clear when the last one would be set."""

    def __init__(self, ways: int):
        self.ways = ways
        self._mru = [0] * ways

    def touch(self, way: int) -> None:
        self._mru[way] = 1
        if all(self._mru):
            self._mru = [0] * self.ways
            self._mru[way] = 1

    def victim(self) -> int:
        return self._mru.index(0)


class TreePlruPolicy:
    """Binary-tree pseudo-LRU; requires a power-of-two way count.

    Node bit 1 means the next victim lies in the right subtree.
    """

    def __init__(self, ways: int):
        if ways & (ways - 1):
            raise ValueError("tree-PLRU needs a power-of-two way count")
        self.ways = ways
        self._bits = [0] * max(ways - 1, 1)

    def touch(self, way: int) -> None:
        node, low, size = 0, 0, self.ways
        while size > 1:
            half = size // 2
            if way < low + half:
                self._bits[node] = 1
                node = 2 * node + 1
            else:
                self._bits[node] = 0
                node = 2 * node + 2
                low += half
            size = half

    def victim(self) -> int:
        node, low, size = 0, 0, self.ways
        while size > 1:
            half = size // 2
            if self._bits[node] == 0:
                node = 2 * node + 1
            else:
                node = 2 * node + 2
                low += half
            size = half
        return low


class ReferenceSet:
    """One cache set driven by a reference policy: fills lowest free way
    first, then asks the policy for a victim."""

    def __init__(self, ways: int, policy):
        self.ways = ways
        self.policy = policy
        self.lines: list[int | None] = [None] * ways

    def access(self, addr: int) -> tuple[bool, int | None]:
        """Returns (hit, evicted_addr)."""
        if addr in self.lines:
            way = self.lines.index(addr)
            self.policy.touch(way)
            return True, None
        for way in range(self.ways):
            if self.lines[way] is None:
                self.lines[way] = addr
                self.policy.touch(way)
                return False, None
        way = self.policy.victim()
        evicted = self.lines[way]
        self.lines[way] = addr
        self.policy.touch(way)
        return False, evicted
