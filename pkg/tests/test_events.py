from __future__ import annotations

import pytest

from qpor.errors import InconsistentPredecessors, TooLarge
from qpor.events import Configuration, EventStore, cexp, configurations_of, en, extensions, state_of
from qpor.program import Action, Effect


def conf(store, *events):
    return Configuration.from_events(store, events)


def test_interning_is_injective(fig2_store):
    s = fig2_store
    n = len(s)
    assert s.intern(Action(0, Effect.LOCK, 0), 1, 10) == 11
    assert s.intern(Action(0, Effect.LOCAL), 0) == 1
    assert len(s) == n


def test_inconsistent_predecessors(fig2):
    s = EventStore(fig2.program)
    e1 = s.intern(Action(0, Effect.LOCAL), 0)
    with pytest.raises(InconsistentPredecessors):
        s.intern(Action(1, Effect.LOCAL), e1)          # pt of another thread
    with pytest.raises(InconsistentPredecessors):
        s.intern(Action(0, Effect.LOCK, 0), e1)         # lock without pm
    with pytest.raises(InconsistentPredecessors):
        s.intern(Action(0, Effect.LOCAL), e1, 0)        # local with pm
    lock = s.intern(Action(0, Effect.LOCK, 0), e1, 0)
    with pytest.raises(InconsistentPredecessors):
        s.intern(Action(1, Effect.LOCK, 0), 0, lock)    # lock after lock


def test_enabled_events(fig2_store):
    s = fig2_store
    assert set(en(conf(s))) == {1, 8, 15}
    assert set(en(conf(s, 1, 8))) == {9, 15}
    assert set(en(conf(s, 1, 8, 9, 10))) == {11, 15}


def test_conflicting_extensions(fig2_store):
    s = fig2_store
    assert cexp(conf(s, 1, 8)) == {2}
    assert cexp(conf(s, *s.history(11))) == {2}
    assert cexp(conf(s, 1, 2, 15)) == {8}
    assert cexp(conf(s, *s.history(13))) == {2, 15}
    assert extensions(conf(s, 1, 8)) == {2, 9, 15}


def test_cexp_returns_only_locks(fig2_store):
    s = fig2_store
    for C in configurations_of(s, s.events()):
        for e in cexp(C):
            assert s.labels[e].effect is Effect.LOCK


def test_configuration_checks(fig2_store):
    s = fig2_store
    with pytest.raises(ValueError):
        conf(s, 2)           # not causally closed
    with pytest.raises(ValueError):
        conf(s, 1, 2, 8)     # 2 # 8
    C = conf(s, 1, 8)
    assert 8 in C and len(C) == 2
    assert C.maximal_events() == {1, 8}


def test_state_of_local_configuration(fig2_store):
    s = fig2_store
    st = state_of(s.local_config(11))
    p = s.program
    assert p.value(st, "y") == 1 and p.value(st, "x") == 0
    assert st.locks == (1, 0)


def test_interleavings(fig2_store):
    s = fig2_store
    runs = s.local_config(11).interleavings()
    # event 1 commutes with 8, 9 and 10 but must precede 11
    assert len(runs) == 4
    for r in runs:
        s.program.run(r)
    with pytest.raises(TooLarge):
        s.local_config(19).interleavings(bound=3)


def test_maximal_configurations_of_fig2(fig2_store):
    s = fig2_store
    maximal = {C.members for C in configurations_of(s, s.events()) if not C.en()}
    assert maximal == {
        frozenset(s.history(7) | s.history(17)),
        frozenset(s.history(14)),
        frozenset(s.history(19)),
    }
