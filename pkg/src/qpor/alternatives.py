"""Clues and k-partial alternatives computed with a comb.

Given a configuration ``C`` and disabled events ``D``, pick up to ``k`` events
of ``D``; for each one collect the live events in conflict with it (a spike),
drop candidates whose history clashes with ``C`` or touches ``D``, and search
for one candidate per spike such that no two candidates conflict.  The union
of their local configurations is the clue handed to the right branch.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from qpor.events import Configuration, EventStore

INFINITE = math.inf


def parse_k(text: str | int | float) -> float | int:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinite", "optimal"):
        return INFINITE
    k = int(text)
    if k < 1:
        raise ValueError("k must be a positive integer or 'inf'")
    return k


@dataclass
class AltConfig:
    k: float | int = INFINITE
    prefer_unresolved: bool = True  # pick D-events not already in conflict with C first

    def __post_init__(self):
        if self.k != INFINITE and (int(self.k) != self.k or self.k < 1):
            raise ValueError("k must be a positive integer or infinite")

    @property
    def optimal(self) -> bool:
        return self.k == INFINITE


@dataclass
class Comb:
    targets: tuple          # the selected events of D, one per spike
    spikes: list[list[int]]

    def __len__(self) -> int:
        return len(self.spikes)


@dataclass
class AltCounters:
    calls: int = 0
    found: int = 0
    visits: int = 0          # partial combinations examined by the search
    spike_events: int = 0
    build_s: float = 0.0
    search_s: float = 0.0
    last_visits: int = 0


def _conflicts_with_config(store: EventStore, e: int, C: Configuration) -> bool:
    conflict = store.in_conflict
    return any(conflict(e, c) for c in C.tcut if c)


def _touches(store: EventStore, e: int, D: Iterable[int]) -> bool:
    leq = store.leq
    return any(leq(d, e) for d in D)


def select_targets(store: EventStore, C: Configuration, D: Sequence[int], cfg: AltConfig) -> tuple:
    """The events of ``D`` the alternative must conflict with, most recent first."""
    recent = list(reversed(D))
    if cfg.k == INFINITE or cfg.k >= len(recent):
        return tuple(recent)
    if cfg.prefer_unresolved:
        open_ = [d for d in recent if not _conflicts_with_config(store, d, C)]
        done = [d for d in recent if d not in open_]
        recent = open_ + done
    return tuple(recent[:int(cfg.k)])


def build_comb(store: EventStore, C: Configuration, D: Sequence[int], cfg: AltConfig,
               candidates: Iterable[int] | None = None) -> Comb:
    targets = select_targets(store, C, D, cfg)
    pool = list(store.live if candidates is None else candidates)
    conflict = store.in_conflict
    size = store.size
    dset = set(D)
    ok: dict[int, bool] = {}
    spikes = []
    for t in targets:
        spike = []
        for x in pool:
            if not conflict(x, t):
                continue
            good = ok.get(x)
            if good is None:
                good = x not in dset and not _conflicts_with_config(store, x, C) and not _touches(store, x, dset)
                ok[x] = good
            if good:
                spike.append(x)
        spike.sort(key=lambda x: (size(x), x))
        spikes.append(spike)
    order = sorted(range(len(spikes)), key=lambda i: len(spikes[i]))
    return Comb(tuple(targets[i] for i in order), [spikes[i] for i in order])


def search_comb(store: EventStore, comb: Comb, counters: AltCounters | None = None) -> list[int] | None:
    """First pairwise conflict-free combination, or None."""
    spikes = comb.spikes
    if any(not s for s in spikes):
        return None
    conflict = store.in_conflict
    chosen: list[int] = []
    visits = 0
    # iterative backtracking: pos[i] is the next index to try in spike i
    pos = [0] * len(spikes)
    i = 0
    while i >= 0:
        if i == len(spikes):
            break
        spike = spikes[i]
        while pos[i] < len(spike):
            x = spike[pos[i]]
            pos[i] += 1
            visits += 1
            if all(x == y or not conflict(x, y) for y in chosen):
                chosen.append(x)
                break
        else:
            pos[i] = 0
            i -= 1
            if chosen:
                chosen.pop()
            continue
        i += 1
    if counters is not None:
        counters.visits += visits
        counters.last_visits = visits
    return chosen if i == len(spikes) else None


def alt(store: EventStore, C: Configuration, D: Sequence[int], cfg: AltConfig,
        counters: AltCounters | None = None) -> frozenset | None:
    """A clue to ``D`` after ``C`` in the live set, or None if the comb has no solution.

    ``D`` is ordered by the time each event was disabled (oldest first).
    """
    if not D:
        raise ValueError("alt needs a nonempty D")
    t0 = time.perf_counter()
    comb = build_comb(store, C, D, cfg)
    t1 = time.perf_counter()
    picked = search_comb(store, comb, counters)
    t2 = time.perf_counter()
    if counters is not None:
        counters.calls += 1
        counters.build_s += t1 - t0
        counters.search_s += t2 - t1
        counters.spike_events += sum(len(s) for s in comb.spikes)
    if picked is None:
        return None
    J: set[int] = set()
    for x in picked:
        J |= store.history(x)
    if counters is not None:
        counters.found += 1
    return frozenset(J)


def is_configuration(store: EventStore, events: Iterable[int]) -> bool:
    ev = set(events)
    for e in ev:
        if not store.history(e) <= ev:
            return False
    ordered = sorted(ev)
    conflict = store.in_conflict
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if conflict(a, b):
                return False
    return True


def is_clue(store: EventStore, J: Iterable[int], C: Iterable[int], D: Iterable[int]) -> bool:
    J, C, D = set(J), set(C), set(D)
    return is_configuration(store, J) and is_configuration(store, C | J) and not (J & D)


def is_alternative(store: EventStore, J: Iterable[int], C: Iterable[int], D: Iterable[int]) -> bool:
    J = set(J)
    if not is_clue(store, J, C, D):
        return False
    conflict = store.in_conflict
    return all(any(conflict(d, j) for j in J) for d in D)
