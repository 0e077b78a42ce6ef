from __future__ import annotations

import pytest

from qpor.benchmarks import load_bundled
from qpor.events import EventStore
from qpor.program import Action, Effect

L, K, U = Effect.LOCAL, Effect.LOCK, Effect.UNLOCK
M, M2 = 0, 1

# The 19 events of the three-thread example, numbered as in its figure:
# (thread, effect, mutex, pt, pm)
FIG2_EVENTS = [
    (0, L, None, 0, None),   # 1  x = 0
    (0, K, M, 1, 0),         # 2  lock m
    (0, L, None, 2, None),   # 3  if (y == 0), taken
    (0, U, M, 3, 2),         # 4  unlock m
    (1, K, M, 0, 4),         # 5
    (1, L, None, 5, None),   # 6
    (1, U, M, 6, 5),         # 7
    (1, K, M, 0, 0),         # 8
    (1, L, None, 8, None),   # 9  y = 1
    (1, U, M, 9, 8),         # 10
    (0, K, M, 1, 10),        # 11
    (0, L, None, 11, None),  # 12 if (y == 0), not taken
    (0, K, M2, 12, 0),       # 13
    (0, L, None, 13, None),  # 14 z = 2
    (2, K, M2, 0, 0),        # 15
    (2, L, None, 15, None),  # 16
    (2, U, M2, 16, 15),      # 17
    (0, K, M2, 12, 17),      # 18
    (0, L, None, 18, None),  # 19
]


def build_fig2_store(step: int = 4) -> EventStore:
    src = load_bundled("fig2")
    store = EventStore(src.program, step)
    for i, (t, eff, m, pt, pm) in enumerate(FIG2_EVENTS, start=1):
        assert store.intern(Action(t, eff, m), pt, pm) == i
    store.live.update(store.events())
    return store


@pytest.fixture
def fig2():
    return load_bundled("fig2")


@pytest.fixture
def fig2_store():
    return build_fig2_store()
