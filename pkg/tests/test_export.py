from __future__ import annotations

import json

from qpor.dsl import parse
from qpor.events import EventStore
from qpor.explorer import explore
from qpor.export import STATS_KEYS, dotted_edges, export_dot, stats_dict, stats_json
from qpor.program import Action, Effect


def test_fig2_dotted_edges(fig2_store):
    dot = export_dot(fig2_store)
    assert dotted_edges(dot) == {(2, 8), (13, 15)}
    assert '"11: <0, lock m>"' in dot
    assert "e10 -> e11;" in dot and "e1 -> e11;" in dot


def test_dot_is_deterministic(fig2_store):
    assert export_dot(fig2_store) == export_dot(fig2_store)


def test_single_event_and_chain():
    p = parse("var x\nthread t {\n  x = 1\n  x = 2\n}\n").program
    s = EventStore(p)
    e1 = s.intern(Action(0, Effect.LOCAL), 0)
    one = export_dot(s)
    assert one.count("[label=") == 1 and "->" not in one
    s.intern(Action(0, Effect.LOCAL), e1)
    two = export_dot(s)
    assert two.count(" -> ") == 1 and "e1 -> e2;" in two


def test_stats_schema(fig2):
    st = explore(fig2.program)
    d = stats_dict(st, fig2.program)
    assert set(STATS_KEYS) <= set(d)
    assert set(d["phase_ms"]) == {"execute", "extensions", "comb_build", "comb_search"}
    assert d["max_configs"] == 3 and d["ssbs"] == 0
    assert json.loads(stats_json(st, fig2.program)) == d
