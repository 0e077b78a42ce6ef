"""Append-only rooted trees with skip links for logarithmic ancestor queries.

A node at depth ``d`` keeps one shortcut per trailing zero of ``d`` written
in base ``s``: the j-th shortcut jumps ``s**j`` levels up.  With ``s = 2`` a
node at depth 12 (``1100``) therefore stores shortcuts to depths 10 and 8.
"""

from __future__ import annotations

from typing import NamedTuple

from qpor.errors import DepthOutOfRange, DifferentTrees

ROOT = 0


def trailing_zeros(n: int, base: int) -> int:
    if n == 0:
        return 0
    z = 0
    while n % base == 0:
        n //= base
        z += 1
    return z


def hop_bound(distance: int, s: int) -> int:
    """Upper bound on the hops ``ancestor_at_depth`` needs to climb ``distance`` levels."""
    if distance <= 0:
        return 0
    digits = 0
    while distance:
        distance //= s
        digits += 1
    return 2 * (s - 1) * digits


class SkipTree:
    """Tree over dense integer node ids; node 0 is the root at depth 0."""

    def __init__(self, step: int = 4):
        if step < 2:
            raise ValueError("skip step must be at least 2")
        self.step = step
        self.parent: list[int] = [-1]
        self.depth: list[int] = [0]
        self.links: list[tuple[int, ...]] = [()]
        self.hops = 0  # total hops taken by ancestor_at_depth
        self.last_hops = 0

    def __len__(self) -> int:
        return len(self.parent)

    def add(self, parent: int) -> int:
        if not 0 <= parent < len(self.parent):
            raise IndexError(f"no node {parent}")
        d = self.depth[parent] + 1
        node = len(self.parent)
        self.parent.append(parent)
        self.depth.append(d)
        links = []
        dist = self.step
        for _ in range(trailing_zeros(d, self.step)):
            links.append(self._climb(parent, d - dist))
            dist *= self.step
        self.links.append(tuple(links))
        return node

    def _climb(self, node: int, g: int) -> int:
        depth, links, parent = self.depth, self.links, self.parent
        hops = 0
        d = depth[node]
        while d > g:
            nxt = parent[node]
            dist = self.step
            for target in links[node]:
                if d - dist < g:
                    break
                nxt = target
                dist *= self.step
            node = nxt
            d = depth[node]
            hops += 1
        self.last_hops = hops
        return node

    def ancestor_at_depth(self, node: int, g: int) -> int:
        if not 0 <= g <= self.depth[node]:
            raise DepthOutOfRange(f"depth {g} outside [0, {self.depth[node]}]")
        n = self._climb(node, g)
        self.hops += self.last_hops
        return n

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff ``a`` is ``b`` or an ancestor of ``b``."""
        da = self.depth[a]
        if da >= self.depth[b]:
            return a == b
        return self.ancestor_at_depth(b, da) == a


class TreeNode(NamedTuple):
    tree: SkipTree
    index: int

    @property
    def depth(self) -> int:
        return self.tree.depth[self.index]


def is_ancestor(n: TreeNode, n2: TreeNode) -> bool:
    if n.tree is not n2.tree:
        raise DifferentTrees("nodes belong to different trees")
    return n.tree.is_ancestor(n.index, n2.index)
