"""Interned events of the program unfolding and immutable configurations.

An event is named by its action and its immediate predecessors: ``pt`` (the
previous event of the same thread) and, for lock and unlock actions, ``pm``
(the previous event on the same mutex).  Under the structural independence
these two events generate the whole causal history, so the triple
``(label, pt, pm)`` is a canonical name and interning is a dict lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from qpor.causality import BOTTOM, CausalityIndex
from qpor.errors import ExecutionError, InconsistentPredecessors, TooLarge
from qpor.program import Action, Effect, Program, State


@dataclass(frozen=True)
class Event:
    id: int
    label: Action
    pt: int
    pm: int | None


class EventStore:
    """Arena of interned events plus the live set ``U`` used by exploration."""

    def __init__(self, program: Program, step: int = 4):
        self.program = program
        self.index = CausalityIndex(program.nthreads, program.nmutexes, step)
        self.labels: list[Action | None] = [None]
        self.pt: list[int] = [BOTTOM]
        self.pm: list[int | None] = [None]
        self._keys: dict[tuple, int] = {}
        self._history: dict[int, frozenset] = {BOTTOM: frozenset()}
        self.live: set[int] = set()
        self.cexp_iterations = 0

    def __len__(self) -> int:
        """Number of real events interned so far (bottom excluded)."""
        return len(self.labels) - 1

    def __getitem__(self, e: int) -> Event:
        return Event(e, self.labels[e], self.pt[e], self.pm[e])

    def events(self) -> range:
        return range(1, len(self.labels))

    def lookup(self, label: Action, pt: int, pm: int | None = None) -> int | None:
        return self._keys.get((label, pt, pm))

    def intern(self, label: Action, pt: int, pm: int | None = None) -> int:
        key = (label, pt, pm)
        e = self._keys.get(key)
        if e is not None:
            return e
        self._validate(label, pt, pm)
        e = len(self.labels)
        self.labels.append(label)
        self.pt.append(pt)
        self.pm.append(pm)
        self._keys[key] = e
        self.index.add(e, label.thread, label.mutex, pt, pm)
        return e

    def _validate(self, label: Action, pt: int, pm: int | None) -> None:
        n = len(self.labels)
        if not 0 <= pt < n or (pm is not None and not 0 <= pm < n):
            raise InconsistentPredecessors(f"unknown predecessor for {label}")
        if pt != BOTTOM and self.labels[pt].thread != label.thread:
            raise InconsistentPredecessors(f"pt={pt} is not an event of thread {label.thread}")
        if label.effect is Effect.LOCAL:
            if pm is not None:
                raise InconsistentPredecessors("local events have no mutex predecessor")
            return
        if pm is None:
            raise InconsistentPredecessors(f"{label} needs a mutex predecessor (possibly bottom)")
        if pm != BOTTOM:
            prev = self.labels[pm]
            want = Effect.UNLOCK if label.effect is Effect.LOCK else Effect.LOCK
            if prev.effect is not want or prev.mutex != label.mutex:
                raise InconsistentPredecessors(f"pm={pm} cannot precede {label} on its mutex")

    # -- order and conflict ---------------------------------------------

    def causally_less(self, a: int, b: int) -> bool:
        return self.index.causally_less(a, b)

    def leq(self, a: int, b: int) -> bool:
        return self.index.leq(a, b)

    def in_conflict(self, a: int, b: int) -> bool:
        return self.index.in_conflict(a, b)

    def size(self, e: int) -> int:
        """``|[e]|``, the number of events in the local configuration of ``e``."""
        return self.index.size[e]

    def predecessors(self, e: int) -> tuple[int, ...]:
        """Immediate causal predecessors of ``e`` (bottom omitted)."""
        pt, pm = self.pt[e], self.pm[e]
        out = []
        if pt and not (pm and self.causally_less(pt, pm)):
            out.append(pt)
        if pm and not self.leq(pm, pt):
            out.append(pm)
        return tuple(out)

    def history(self, e: int) -> frozenset:
        """Member set of ``[e]``."""
        h = self._history.get(e)
        if h is not None:
            return h
        stack = [e]
        while stack:  # fill the cache bottom-up without recursion
            x = stack[-1]
            missing = [p for p in (self.pt[x], self.pm[x]) if p and p not in self._history]
            if missing:
                stack.extend(missing)
                continue
            stack.pop()
            if x in self._history:
                continue
            acc = {x}
            for p in (self.pt[x], self.pm[x]):
                if p:
                    acc |= self._history[p]
            self._history[x] = frozenset(acc)
        return self._history[e]

    def local_config(self, e: int) -> Configuration:
        return Configuration.from_events(self, self.history(e))

    def label_str(self, e: int) -> str:
        return self.program.format_action(self.labels[e])


@dataclass(frozen=True)
class Configuration:
    """A causally closed, conflict-free event set with its cut and state."""

    store: EventStore = field(repr=False, compare=False)
    members: frozenset
    tcut: tuple
    mcut: tuple
    state: State = field(compare=False)

    @classmethod
    def empty(cls, store: EventStore) -> Configuration:
        p = store.program
        return cls(store, frozenset(), (BOTTOM,) * p.nthreads, (BOTTOM,) * p.nmutexes, p.initial_state())

    @classmethod
    def from_events(cls, store: EventStore, events: Iterable[int]) -> Configuration:
        """Build a configuration by firing ``events`` in a causal order.

        Raises ValueError if the set is not causally closed or not conflict-free.
        """
        c = cls.empty(store)
        for e in sorted(set(events)):  # ids are allocated after their predecessors
            c = c.add(e)[0]
        return c

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, e: int) -> bool:
        return e in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def add(self, e: int) -> tuple[Configuration, bool]:
        """Extend by an enabled event; returns the new configuration and whether
        the fired action was a failing assert."""
        s = self.store
        label = s.labels[e]
        t = label.thread
        if s.pt[e] != self.tcut[t]:
            raise ValueError(f"event {e} does not extend the thread-{t} cut of this configuration")
        mcut = self.mcut
        if label.effect is not Effect.LOCAL:
            if s.pm[e] != mcut[label.mutex]:
                raise ValueError(f"event {e} does not extend the mutex cut of this configuration")
            mcut = mcut[:label.mutex] + (e,) + mcut[label.mutex + 1:]
        if s.program.next_action(self.state, t) != label or label not in s.program.enabled(self.state):
            raise ValueError(f"event {e} is not enabled in this configuration")
        state, failed = s.program.execute(self.state, t)
        tcut = self.tcut[:t] + (e,) + self.tcut[t + 1:]
        return Configuration(s, self.members | {e}, tcut, mcut, state), failed

    def union(self, events: Iterable[int]) -> Configuration:
        return Configuration.from_events(self.store, self.members | set(events))

    def maximal_events(self) -> set[int]:
        return {e for e in self.tcut if e != BOTTOM}

    # -- extensions ----------------------------------------------------

    def enabled_actions(self) -> list[Action]:
        return self.store.program.enabled(self.state)

    def en(self) -> list[int]:
        """Interned events for the actions enabled at this configuration."""
        s = self.store
        out = []
        for a in s.program.enabled(self.state):
            pm = None if a.effect is Effect.LOCAL else self.mcut[a.mutex]
            out.append(s.intern(a, self.tcut[a.thread], pm))
        return out

    def cexp(self) -> set[int]:
        """Conflicting extensions: lock events that could have fired earlier.

        For every lock event of ``C`` the mutex chain below it is walked back
        one lock/unlock pair at a time, emitting the same lock action placed
        right after each earlier unlock.  Threads whose *next* action is a
        lock get the same walk from the current mutex cut, since their lock
        may also be placed after an earlier unlock even though it has not
        fired in ``C``.
        """
        s = self.store
        labels, pt, pm = s.labels, s.pt, s.pm
        leq = s.leq
        out: set[int] = set()
        iters = 0

        def walk(lab: Action, et: int, em: int, at_lock: bool) -> None:
            nonlocal iters
            if at_lock:  # em is the lock currently holding the mutex
                if em == BOTTOM or leq(em, et):
                    return
                em = pm[em]
                out.add(s.intern(lab, et, em))
            while not leq(em, et):
                iters += 1
                em = pm[em]  # the lock released by that unlock
                if em == BOTTOM or leq(em, et):
                    break
                em = pm[em]
                out.add(s.intern(lab, et, em))

        for e in self.members:
            lab = labels[e]
            if lab.effect is Effect.LOCK:
                walk(lab, pt[e], pm[e], False)
        prog = s.program
        locks = self.state.locks
        for t in range(prog.nthreads):
            a = prog.next_action(self.state, t)
            if a is not None and a.effect is Effect.LOCK:
                walk(a, self.tcut[t], self.mcut[a.mutex], bool(locks[a.mutex]))
        s.cexp_iterations += iters
        return out

    def extensions(self) -> tuple[list[int], set[int]]:
        en = self.en()
        cex = self.cexp()
        assert not cex.intersection(en), "en and cex overlap"
        return en, cex

    def interleavings(self, bound: int = 10) -> set[tuple[Action, ...]]:
        if len(self.members) > bound:
            raise TooLarge(f"{len(self.members)} events exceed the interleaving bound {bound}")
        s = self.store
        preds = {e: set(s.predecessors(e)) & self.members for e in self.members}
        out: set[tuple[Action, ...]] = set()

        def go(done: list[int], left: set[int]) -> None:
            if not left:
                out.add(tuple(s.labels[e] for e in done))
                return
            for e in sorted(left):
                if preds[e] <= set(done):
                    done.append(e)
                    go(done, left - {e})
                    done.pop()

        go([], set(self.members))
        return out


def en(C: Configuration) -> list[int]:
    return C.en()


def cexp(C: Configuration) -> set[int]:
    return C.cexp()


def extensions(C: Configuration) -> set[int]:
    e, c = C.extensions()
    return set(e) | c


def state_of(C: Configuration) -> State:
    return C.state


def configurations_of(store: EventStore, events: Iterable[int]) -> Iterator[Configuration]:
    """All configurations made of the given events, grown one event at a time
    from the empty configuration (exponential; meant for tests)."""
    pool = sorted(set(events))
    start = Configuration.empty(store)
    seen = {start.members}
    todo = [start]
    while todo:
        C = todo.pop()
        yield C
        for e in pool:
            if e in C.members:
                continue
            try:
                D = C.add(e)[0]
            except (ValueError, ExecutionError):
                continue
            if D.members not in seen:
                seen.add(D.members)
                todo.append(D)
