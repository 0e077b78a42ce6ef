"""Causality and conflict queries over thread trees and lock trees.

Every event owns a node in the tree of its thread (parent: its same-thread
predecessor).  Lock and unlock events also own a node in the tree of their
mutex (parent: the previous event on that mutex).  Within one tree, ancestry
is causality and branching is conflict.  Events of different threads are
compared through ``tmax`` (latest event of each thread in the history) and
``lmax`` (latest event of each mutex in the history).
"""

from __future__ import annotations

from qpor.skiptree import ROOT, SkipTree

BOTTOM = 0


class CausalityIndex:
    """Per-event tree nodes plus the ``tmax``/``lmax`` summaries.

    Event ids are dense and start at 0, which is the virtual bottom event.
    """

    def __init__(self, nthreads: int, nmutexes: int, step: int = 4):
        self.step = step
        self.thread_trees = [SkipTree(step) for _ in range(nthreads)]
        self.lock_trees = [SkipTree(step) for _ in range(nmutexes)]
        self.thread: list[int] = [-1]
        self.mutex: list[int | None] = [None]
        self.tnode: list[int] = [ROOT]
        self.lnode: list[int] = [ROOT]
        self.tmax: list[tuple[int, ...]] = [(BOTTOM,) * nthreads]
        self.lmax: list[dict[int, int]] = [{}]
        self.size: list[int] = [0]

    def tdepth(self, e: int) -> int:
        if e == BOTTOM:
            return 0
        return self.thread_trees[self.thread[e]].depth[self.tnode[e]]

    def ldepth(self, e: int) -> int:
        if e == BOTTOM:
            return 0
        return self.lock_trees[self.mutex[e]].depth[self.lnode[e]]

    def add(self, e: int, thread: int, mutex: int | None, pt: int, pm: int | None) -> None:
        assert e == len(self.thread), "events must be added densely"
        ttree = self.thread_trees[thread]
        self.thread.append(thread)
        self.mutex.append(mutex)
        self.tnode.append(ttree.add(self.tnode[pt] if pt else ROOT))
        if mutex is not None:
            ltree = self.lock_trees[mutex]
            self.lnode.append(ltree.add(self.lnode[pm] if pm else ROOT))
        else:
            self.lnode.append(-1)

        tm = list(self.tmax[pt])
        lm = dict(self.lmax[pt])
        if pm:
            for i, x in enumerate(self.tmax[pm]):
                if self.tdepth(x) > self.tdepth(tm[i]):
                    tm[i] = x
            for m, x in self.lmax[pm].items():
                y = lm.get(m)
                if y is None or self.ldepth(x) > self.ldepth(y):
                    lm[m] = x
        tm[thread] = e
        if mutex is not None:
            lm[mutex] = e
        self.tmax.append(tuple(tm))
        self.lmax.append(lm)
        self.size.append(sum(self.tdepth(x) for x in tm))

    # -- queries -----------------------------------------------------------

    def causally_less(self, a: int, b: int) -> bool:
        """Strict causality ``a < b``; bottom is below every real event."""
        if a == b or b == BOTTOM:
            return False
        if a == BOTTOM:
            return True
        i = self.thread[a]
        x = self.tmax[b][i]
        if x == BOTTOM:
            return False
        return self.thread_trees[i].is_ancestor(self.tnode[a], self.tnode[x])

    def leq(self, a: int, b: int) -> bool:
        return a == b or self.causally_less(a, b)

    def in_conflict(self, a: int, b: int) -> bool:
        if a == b or a == BOTTOM or b == BOTTOM:
            return False
        ta, tb = self.thread[a], self.thread[b]
        if ta == tb:
            tree = self.thread_trees[ta]
            na, nb = self.tnode[a], self.tnode[b]
            return not (tree.is_ancestor(na, nb) or tree.is_ancestor(nb, na))
        la, lb = self.lmax[a], self.lmax[b]
        if len(lb) < len(la):
            la, lb = lb, la
        for m, x in la.items():
            y = lb.get(m)
            if y is None or y == x:
                continue
            tree = self.lock_trees[m]
            nx, ny = self.lnode[x], self.lnode[y]
            if not (tree.is_ancestor(nx, ny) or tree.is_ancestor(ny, nx)):
                return True
        return False
