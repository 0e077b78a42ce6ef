"""Brute-force reference implementations used to validate the explorer.

Nothing here shares code with the event store or the explorer beyond the
program interpreter: runs are enumerated directly on the transition system,
trace classes come from dependency graphs, and the reference unfolding is
built by the literal fixpoint over explicitly enumerated configurations with
events named by ``(action, history)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from qpor.errors import OracleLimitExceeded
from qpor.program import Action, Program, independent

# ---------------------------------------------------------------------------
# Runs and Mazurkiewicz classes
# ---------------------------------------------------------------------------


def enumerate_runs(program: Program, limit: int = 10_000) -> list[tuple[Action, ...]]:
    """Every maximal run (ending where nothing is enabled)."""
    out: list[tuple[Action, ...]] = []
    stack = [(program.initial_state(), ())]
    while stack:
        state, run = stack.pop()
        acts = program.enabled(state)
        if not acts:
            out.append(run)
            if len(out) > limit:
                raise OracleLimitExceeded(f"more than {limit} runs")
            continue
        for a in reversed(acts):
            stack.append((program.execute(state, a.thread)[0], run + (a,)))
    return out


@dataclass(frozen=True)
class TraceClass:
    """A Mazurkiewicz trace, represented by its least linearization."""

    canonical_run: tuple
    edges: frozenset = field(compare=False, hash=False, default=frozenset())

    def __len__(self) -> int:
        return len(self.canonical_run)


def dependency_graph(run: Sequence[Action]) -> set[tuple[int, int]]:
    """Edges ``i -> j`` (``i < j``) between dependent positions of ``run``."""
    edges = set()
    for j, b in enumerate(run):
        for i in range(j):
            if not independent(run[i], b):
                edges.add((i, j))
    return edges


def canonicalize(run: Sequence[Action], program: Program | None = None) -> TraceClass:
    """Greedy least linearization: always fire the ready occurrence of the smallest thread."""
    run = tuple(run)
    edges = dependency_graph(run)
    preds = [0] * len(run)
    succ: list[list[int]] = [[] for _ in run]
    for i, j in edges:
        preds[j] += 1
        succ[i].append(j)
    ready = [i for i in range(len(run)) if preds[i] == 0]
    order = []
    while ready:
        # the same thread never has two ready occurrences (program order is a chain)
        i = min(ready, key=lambda x: run[x].thread)
        ready.remove(i)
        order.append(i)
        for j in succ[i]:
            preds[j] -= 1
            if preds[j] == 0:
                ready.append(j)
    canon = tuple(run[i] for i in order)
    pos = {i: k for k, i in enumerate(order)}
    return TraceClass(canon, frozenset((pos[i], pos[j]) for i, j in edges))


def enumerate_classes(program: Program, limit: int = 10_000) -> list[tuple[Action, ...]]:
    """One run per Mazurkiewicz class of maximal runs: its lexicographic normal form.

    A prefix is extended by ``b`` only if ``b`` cannot commute left past an
    action of a larger thread, which keeps exactly the least linearization of
    every class.
    """
    out: list[tuple[Action, ...]] = []
    stack = [(program.initial_state(), ())]
    while stack:
        state, run = stack.pop()
        acts = program.enabled(state)
        if not acts:
            out.append(run)
            if len(out) > limit:
                raise OracleLimitExceeded(f"more than {limit} trace classes")
            continue
        for b in reversed(acts):
            ok = True
            for a in reversed(run):
                if not independent(a, b):
                    break
                if b.thread < a.thread:
                    ok = False
                    break
            if ok:
                stack.append((program.execute(state, b.thread)[0], run + (b,)))
    return out


def count_classes(program: Program, limit: int = 10_000) -> int:
    return len(enumerate_classes(program, limit))


# ---------------------------------------------------------------------------
# Reference unfolding (literal fixpoint)
# ---------------------------------------------------------------------------


@dataclass
class RefUnfolding:
    program: Program
    labels: list[Action] = field(default_factory=list)
    histories: list[frozenset] = field(default_factory=list)  # strict causes
    immediate: list[frozenset] = field(default_factory=list)
    direct: list[set] = field(default_factory=list)          # direct conflicts
    maximal: list[frozenset] = field(default_factory=list)   # maximal configurations
    configurations: int = 0
    _index: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.labels)

    def local(self, e: int) -> frozenset:
        return self.histories[e] | {e}

    def find(self, action: Action, history: frozenset) -> int | None:
        return self._index.get((action, history))


def _maximal_of(H: frozenset, immediate: list[frozenset]) -> frozenset:
    below: set[int] = set()
    for x in H:
        below |= immediate[x]
    return H - below


def ref_unfold(program: Program, max_events: int = 2_000, max_configs: int = 500_000) -> RefUnfolding:
    """Build the unfolding by the fixpoint: attach every enabled action that is
    dependent with all maximal events of a configuration as a new event."""
    U = RefUnfolding(program)
    children: dict[int, list[int]] = {-1: []}  # -1 collects events with empty history
    seen: dict[frozenset, object] = {frozenset(): program.initial_state()}
    work = deque([frozenset()])

    def add_event(a: Action, H: frozenset) -> int:
        e = len(U.labels)
        U.labels.append(a)
        U.histories.append(H)
        imm = _maximal_of(H, U.immediate)
        U.immediate.append(imm)
        U.direct.append(set())
        U._index[(a, H)] = e
        for x in range(e):
            if x not in H and not independent(a, U.labels[x]):
                U.direct[e].add(x)
                U.direct[x].add(e)
        for p in imm or (-1,):
            children.setdefault(p, []).append(e)
        if len(U.labels) > max_events:
            raise OracleLimitExceeded(f"more than {max_events} reference events")
        return e

    while work:
        X = work.popleft()
        state = seen[X]
        U.configurations += 1
        if U.configurations > max_configs:
            raise OracleLimitExceeded(f"more than {max_configs} configurations")
        mx = _maximal_of(X, U.immediate)
        for a in program.enabled(state):
            if all(not independent(a, U.labels[x]) for x in mx) and (a, X) not in U._index:
                e = add_event(a, X)
                Y = X | {e}
                if Y not in seen:
                    seen[Y] = program.execute(state, a.thread)[0]
                    work.append(Y)
        candidates = set(children[-1])
        for x in X:
            candidates.update(children.get(x, ()))
        extended = False
        for e in sorted(candidates):
            if e in X or not U.histories[e] <= X or U.direct[e] & X:
                continue
            extended = True
            Y = X | {e}
            if Y not in seen:
                seen[Y] = program.execute(state, U.labels[e].thread)[0]
                work.append(Y)
        if not extended:
            U.maximal.append(X)
    return U


def ref_relations(U: RefUnfolding) -> tuple[np.ndarray, np.ndarray]:
    """Strict causality and (inherited) conflict as boolean matrices."""
    n = len(U)
    less = np.zeros((n, n), dtype=bool)
    for e, H in enumerate(U.histories):
        if H:
            less[list(H), e] = True
    direct = np.zeros((n, n), dtype=np.float32)
    for e, xs in enumerate(U.direct):
        if xs:
            direct[e, list(xs)] = 1.0
    leq = (less | np.eye(n, dtype=bool)).astype(np.float32)
    conflict = (leq.T @ direct @ leq) > 0
    return less, conflict


def ref_cex(U: RefUnfolding, X: frozenset, conflict: np.ndarray) -> set[int]:
    """Extensions of ``X`` that are in conflict with some member."""
    members = list(X)
    out = set()
    for e in range(len(U)):
        if e in X or not U.histories[e] <= X:
            continue
        if members and conflict[e, members].any():
            out.add(e)
    return out


def has_maximal_avoiding(U: RefUnfolding, C: Iterable[int], D: Iterable[int]) -> bool:
    """Is there a maximal configuration containing ``C`` and disjoint from ``D``?"""
    C, D = set(C), set(D)
    return any(C <= M and not (M & D) for M in U.maximal)


# ---------------------------------------------------------------------------
# Canonical names shared by both implementations
# ---------------------------------------------------------------------------


class NameTable:
    """Interns recursive event names ``(action, {names of immediate causes})``."""

    def __init__(self):
        self._ids: dict[tuple, int] = {}

    def intern(self, action: Action, preds: Iterable[int]) -> int:
        key = (action, frozenset(preds))
        n = self._ids.get(key)
        if n is None:
            n = self._ids[key] = len(self._ids)
        return n

    def names_of_ref(self, U: RefUnfolding) -> list[int]:
        names: list[int] = []
        for e in range(len(U)):  # events are created after their causes
            names.append(self.intern(U.labels[e], (names[p] for p in U.immediate[e])))
        return names

    def names_of_store(self, store) -> dict[int, int]:
        names: dict[int, int] = {}
        for e in store.events():
            names[e] = self.intern(store.labels[e], (names[p] for p in store.predecessors(e)))
        return names
