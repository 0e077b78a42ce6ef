"""DOT rendering of event stores and the JSON statistics format."""

from __future__ import annotations

import json
from typing import Iterable

from qpor.events import EventStore
from qpor.explorer import ExplorationStats
from qpor.program import Effect

STATS_KEYS = ("max_configs", "ssbs", "events", "assert_violations", "blocked_deadlocks", "time_ms", "phase_ms")


def _node_label(store: EventStore, e: int) -> str:
    a = store.labels[e]
    if a.effect is Effect.LOCAL:
        eff = "local"
    else:
        name = store.program.mutex_names[a.mutex]
        eff = ("lock " if a.effect is Effect.LOCK else "unlock ") + name
    return f"{e}: <{a.thread}, {eff}>"


def export_dot(store: EventStore, events: Iterable[int] | None = None) -> str:
    """Solid arrows for immediate causality, dotted lines between events
    that extend the same lock-tree node (immediate lock conflicts)."""
    chosen = sorted(store.events() if events is None else set(events))
    keep = set(chosen)
    out = ["digraph unfolding {", "  node [shape=box];"]
    for e in chosen:
        out.append(f'  e{e} [label="{_node_label(store, e)}"];')
    for e in chosen:
        for p in store.predecessors(e):
            if p in keep:
                out.append(f"  e{p} -> e{e};")
    siblings: dict[tuple, list[int]] = {}
    for e in chosen:
        a = store.labels[e]
        if a.effect is not Effect.LOCAL:
            siblings.setdefault((a.mutex, store.pm[e]), []).append(e)
    pairs = []
    for group in siblings.values():
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                pairs.append((x, y))
    for x, y in sorted(pairs):
        out.append(f"  e{x} -> e{y} [style=dotted, dir=none, constraint=false];")
    out.append("}")
    return "\n".join(out) + "\n"


def dotted_edges(dot: str) -> set[tuple[int, int]]:
    edges = set()
    for line in dot.splitlines():
        if "style=dotted" in line:
            lhs, rhs = line.strip().split(" [")[0].split(" -> ")
            edges.add((int(lhs[1:]), int(rhs[1:])))
    return edges


def stats_dict(stats: ExplorationStats, program=None) -> dict:
    d = {
        "max_configs": stats.max_configs,
        "ssbs": stats.ssbs,
        "events": stats.events,
        "assert_violations": stats.assert_violations,
        "blocked_deadlocks": stats.blocked_deadlocks,
        "time_ms": round(stats.time_s * 1000, 3),
        "phase_ms": {
            "execute": round(stats.execute_s * 1000, 3),
            "extensions": round(stats.extensions_s * 1000, 3),
            "comb_build": round(stats.comb_build_s * 1000, 3),
            "comb_search": round(stats.comb_search_s * 1000, 3),
        },
        "counters": {
            "frames": stats.frames,
            "alt_calls": stats.alt_calls,
            "alt_found": stats.alt_found,
            "comb_visits": stats.comb_visits,
            "cexp_iterations": stats.cexp_iterations,
        },
    }
    fmt = program.format_action if program is not None else str
    d["violations"] = [
        {"thread": v.thread, "line": v.line, "statement": v.text, "witness": [fmt(a) for a in v.witness]}
        for v in stats.violations
    ]
    return d


def stats_json(stats: ExplorationStats, program=None) -> str:
    return json.dumps(stats_dict(stats, program), indent=2)
