"""Depth-first exploration of the unfolding with left/right branching.

Each frame holds a configuration ``C``, the ordered disabled set ``D`` and the
guide set ``A``.  The left child adds one enabled event ``e``; the right child
keeps ``C``, disables ``e`` and follows the clue returned by ``alt``.  The
recursion is run on an explicit stack so deep programs do not hit Python's
recursion limit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from qpor.alternatives import AltConfig, AltCounters, alt, is_alternative, is_clue
from qpor.errors import FrameLimitExceeded, StepLimitExceeded
from qpor.events import Configuration, EventStore
from qpor.program import Program


@dataclass
class Violation:
    thread: int
    line: int
    text: str
    members: frozenset
    witness: tuple  # actions of one run reaching the maximal configuration


@dataclass
class ExplorationStats:
    max_configs: int = 0
    ssbs: int = 0
    events: int = 0
    violations: list[Violation] = field(default_factory=list)
    blocked_deadlocks: int = 0
    frames: int = 0
    time_s: float = 0.0
    execute_s: float = 0.0
    extensions_s: float = 0.0
    comb_build_s: float = 0.0
    comb_search_s: float = 0.0
    alt_calls: int = 0
    alt_found: int = 0
    comb_visits: int = 0
    cexp_iterations: int = 0

    @property
    def assert_violations(self) -> int:
        return len(self.violations)


@dataclass
class _Frame:
    C: Configuration
    D: tuple
    Dset: frozenset
    A: frozenset
    failed: tuple  # (event, thread, line, text) of failing asserts in C
    e: int = 0
    stage: int = 0


class Explorer:
    """Exhaustive explorer; one instance performs one exploration.

    Callbacks: ``on_visit(C, D, A)`` for every call, ``on_maximal(C)`` for
    every maximal configuration, ``on_alt(C, D, J)`` after every ``alt`` call
    (``J`` is None when no clue was found).
    """

    def __init__(self, program: Program, cfg: AltConfig | None = None, *, step: int = 4,
                 prune: bool = True, choice: str = "min", max_steps: int = 100_000,
                 max_frames: int = 1_000_000, debug: bool = False,
                 on_visit: Callable | None = None, on_maximal: Callable | None = None,
                 on_alt: Callable | None = None):
        if choice not in ("min", "max"):
            raise ValueError("choice must be 'min' or 'max'")
        self.program = program
        self.cfg = cfg or AltConfig()
        self.store = EventStore(program, step)
        self.prune_enabled = prune
        self.pick = min if choice == "min" else max
        self.max_steps = max_steps
        self.max_frames = max_frames
        self.debug = debug
        self.on_visit = on_visit
        self.on_maximal = on_maximal
        self.on_alt = on_alt
        self.counters = AltCounters()
        self.stats = ExplorationStats()

    def run(self) -> ExplorationStats:
        start = time.perf_counter()
        try:
            self._explore()
        finally:
            st = self.stats
            st.events = len(self.store)
            st.time_s = time.perf_counter() - start
            st.comb_build_s = self.counters.build_s
            st.comb_search_s = self.counters.search_s
            st.alt_calls = self.counters.calls
            st.alt_found = self.counters.found
            st.comb_visits = self.counters.visits
            st.cexp_iterations = self.store.cexp_iterations
        return self.stats

    def _explore(self) -> None:
        store, st = self.store, self.stats
        live = store.live
        clock = time.perf_counter
        stack = [_Frame(Configuration.empty(store), (), frozenset(), frozenset(), ())]
        while stack:
            f = stack[-1]
            if f.stage == 0:
                st.frames += 1
                if st.frames > self.max_frames:
                    raise FrameLimitExceeded(self.max_frames, self._run_of(f.C))
                t0 = clock()
                en, cex = f.C.extensions()
                st.extensions_s += clock() - t0
                live.update(en)
                live.update(cex)
                if self.debug:
                    self._check_frame(f, en, cex)
                if self.on_visit is not None:
                    self.on_visit(f.C, f.D, f.A)
                if f.Dset.issuperset(en):
                    stack.pop()
                    if en:
                        st.ssbs += 1
                    else:
                        self._maximal(f)
                    continue
                if f.A:
                    candidates = [e for e in en if e in f.A]
                else:
                    candidates = [e for e in en if e not in f.Dset]
                e = self.pick(candidates)
                f.e, f.stage = e, 1
                t0 = clock()
                C2, failed = f.C.add(e)
                st.execute_s += clock() - t0
                if C2.state.steps > self.max_steps:
                    raise StepLimitExceeded(self.max_steps, self._run_of(C2))
                fails = f.failed
                if failed:
                    ins = self.program.code[store.labels[e].thread][f.C.state.pcs[store.labels[e].thread]]
                    fails = fails + ((e, store.labels[e].thread, ins.line, ins.text),)
                stack.append(_Frame(C2, f.D, f.Dset, f.A - {e}, fails))
            elif f.stage == 1:
                f.stage = 2
                D2 = f.D + (f.e,)
                J = alt(store, f.C, D2, self.cfg, self.counters)
                if self.on_alt is not None:
                    self.on_alt(f.C, D2, J)
                if J is not None:
                    if self.debug:
                        assert is_clue(store, J, f.C.members, D2), "alt returned a non-clue"
                        if self.cfg.optimal:
                            assert is_alternative(store, J, f.C.members, D2), "alt returned a non-alternative"
                    stack.append(_Frame(f.C, D2, f.Dset | {f.e}, J - f.C.members, f.failed))
            else:
                if self.prune_enabled:
                    self.prune(f.C, f.D)
                stack.pop()

    def _maximal(self, f: _Frame) -> None:
        st = self.stats
        st.max_configs += 1
        prog = self.program
        state = f.C.state
        if any(not prog.is_terminated(state, t) for t in range(prog.nthreads)):
            st.blocked_deadlocks += 1
        if f.failed:
            witness = self._run_of(f.C)
            seen = set()
            for _, thread, line, text in f.failed:
                if (thread, line, text) in seen:
                    continue
                seen.add((thread, line, text))
                st.violations.append(Violation(thread, line, text, f.C.members, witness))
        if self.on_maximal is not None:
            self.on_maximal(f.C)

    def _run_of(self, C: Configuration) -> tuple:
        return tuple(self.store.labels[e] for e in sorted(C.members))

    def prune(self, C: Configuration, D: tuple) -> None:
        """Keep only ``C``, ``D`` and live events in conflict with one of them."""
        store = self.store
        conflict = store.in_conflict
        keep = C.members.union(D)
        anchors = [c for c in C.tcut if c] + list(D)
        drop = [u for u in store.live
                if u not in keep and not any(conflict(u, x) for x in anchors)]
        store.live.difference_update(drop)

    def _check_frame(self, f: _Frame, en: list[int], cex: set[int]) -> None:
        members = f.C.members
        ex = set(en) | cex
        assert not (members & f.Dset), "C and D intersect"
        assert f.Dset <= ex, "D is not a subset of ex(C)"
        assert not (members & f.A), "C and A intersect"
        if f.A:
            Configuration.from_events(self.store, members | f.A)


def explore(program: Program, cfg: AltConfig | None = None, **kwargs) -> ExplorationStats:
    return Explorer(program, cfg, **kwargs).run()
