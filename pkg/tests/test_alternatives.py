from __future__ import annotations

import pytest

from qpor.alternatives import (
    INFINITE, AltConfig, AltCounters, alt, build_comb, is_alternative, is_clue, parse_k, search_comb,
)
from qpor.events import Configuration


def conf(store, *events):
    return Configuration.from_events(store, events)


def test_alt_after_first_event(fig2_store):
    s = fig2_store
    C = conf(s, 1)
    J = alt(s, C, (2,), AltConfig(INFINITE))
    assert J - C.members == {8}
    assert is_alternative(s, J, C.members, {2})


def test_alt_with_two_disabled_events(fig2_store):
    s = fig2_store
    C = s.local_config(12)
    D = (2, 13)
    J = alt(s, C, D, AltConfig(INFINITE))
    assert J - C.members == {15}
    assert is_clue(s, J, C.members, D)
    assert is_alternative(s, J, C.members, D)


def test_one_partial_alternative_targets_most_recent(fig2_store):
    s = fig2_store
    C = s.local_config(12)
    comb = build_comb(s, C, (2, 13), AltConfig(1))
    # 2 already conflicts with 8 in C, so the open event 13 is the target
    assert comb.targets == (13,)
    assert comb.spikes[0][0] == 15             # smallest history first
    assert set(comb.spikes[0]) == {15, 16, 17, 18, 19}


def test_no_alternative_when_every_path_is_blocked(fig2_store):
    s = fig2_store
    C = conf(s)
    # every maximal configuration contains 1
    assert alt(s, C, (1,), AltConfig(INFINITE)) is None


def test_clue_examples(fig2_store):
    s = fig2_store
    C = {1}
    assert is_clue(s, {8}, C, {2})
    assert not is_clue(s, {2}, C, {2})            # meets D
    assert not is_clue(s, {9}, C, {2})            # not causally closed
    assert not is_clue(s, {8, 9, 10, 11}, C, {2})  # 11 needs 1, so J alone is not closed
    assert is_clue(s, {15}, C, {2})
    assert not is_alternative(s, {15}, C, {2})    # does not conflict with 2


def test_search_counts_visits(fig2_store):
    s = fig2_store
    C = s.local_config(12)
    counters = AltCounters()
    comb = build_comb(s, C, (2, 13), AltConfig(INFINITE))
    picked = search_comb(s, comb, counters)
    assert picked is not None and set(picked) == {8, 15}
    assert counters.visits == counters.last_visits == 2


def test_k_validation():
    with pytest.raises(ValueError):
        AltConfig(0)
    with pytest.raises(ValueError):
        AltConfig(1.5)
    with pytest.raises(ValueError):
        parse_k("0")
    assert parse_k("inf") == INFINITE and parse_k("3") == 3
    assert AltConfig().optimal and not AltConfig(2).optimal


def test_alt_rejects_empty_d(fig2_store):
    with pytest.raises(ValueError):
        alt(fig2_store, conf(fig2_store), (), AltConfig())
