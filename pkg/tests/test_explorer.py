from __future__ import annotations

import pytest

from qpor.alternatives import INFINITE, AltConfig
from qpor.benchmarks import BUNDLED, generate_writers, load_bundled
from qpor.dsl import parse
from qpor.errors import FrameLimitExceeded, StepLimitExceeded
from qpor.explorer import Explorer, explore


@pytest.mark.parametrize("k", [1, 2, 3, INFINITE])
def test_fig2_counts(fig2, k):
    st = explore(fig2.program, AltConfig(k), debug=True)
    assert st.max_configs == 3
    assert st.ssbs == 0
    assert st.events == 19
    assert st.blocked_deadlocks == 1     # t2 waits for m2 forever in one of them
    assert st.assert_violations == 0


def test_fig2_maximal_configurations_are_distinct(fig2):
    seen = []
    ex = Explorer(fig2.program, on_maximal=lambda C: seen.append(C.members))
    ex.run()
    assert len(seen) == len(set(seen)) == 3
    assert sorted(len(m) for m in seen) == [8, 10, 11]


@pytest.mark.parametrize("n", range(1, 6))
def test_writers_law(n):
    st = explore(generate_writers(n).program, AltConfig(INFINITE))
    assert st.max_configs == 2 * n
    assert st.ssbs == 0


def test_one_partial_alternatives_waste_work_on_writers():
    p = generate_writers(3).program
    one = explore(p, AltConfig(1))
    two = explore(p, AltConfig(2))
    assert one.max_configs == two.max_configs == 6
    assert one.ssbs > two.ssbs == 0


@pytest.mark.parametrize("name", ["fig2", "pool", "philosophers", "mpat"])
def test_choice_does_not_change_results(name):
    p = load_bundled(name).program
    a = explore(p, AltConfig(INFINITE), choice="min")
    b = explore(p, AltConfig(INFINITE), choice="max")
    assert (a.max_configs, a.events, a.blocked_deadlocks) == (b.max_configs, b.events, b.blocked_deadlocks)
    assert a.ssbs == b.ssbs == 0


def test_pruning_keeps_counts(fig2):
    a = explore(load_bundled("producer_consumer").program, prune=True)
    b = explore(load_bundled("producer_consumer").program, prune=False)
    assert a.max_configs == b.max_configs
    assert a.events == b.events


def test_assert_violation_found_once():
    src = load_bundled("asserts")
    st = explore(src.program)
    assert st.assert_violations == 1
    v = st.violations[0]
    assert src.program.thread_names[v.thread] == "w2"
    assert v.text == "assert(x[2] == 0)"
    state = src.program.run(v.witness)  # the witness is a real run
    assert src.program.value(state, "i") == 2    # master reached x[2] first
    assert src.program.value(state, "x", 2) == 9


def test_single_thread_is_a_chain():
    st = explore(load_bundled("single").program)
    assert st.max_configs == 1 and st.ssbs == 0 and st.events == 5


def test_step_guard():
    p = parse("var x\nthread t {\n  while (1) {\n    x = x + 1\n  }\n}\n").program
    with pytest.raises(StepLimitExceeded) as info:
        explore(p, max_steps=50)
    assert len(info.value.prefix) == 51


def test_frame_guard():
    with pytest.raises(FrameLimitExceeded):
        explore(generate_writers(3).program, max_frames=5)


def test_bad_choice():
    with pytest.raises(ValueError):
        Explorer(load_bundled("single").program, choice="random")


@pytest.mark.parametrize("name", BUNDLED)
def test_optimal_mode_has_no_blocked_leaves(name):
    # debug mode also asserts C∩D=∅, D⊆ex(C), C∩A=∅ and C∪A a configuration at every frame
    st = explore(load_bundled(name).program, AltConfig(INFINITE), debug=True)
    assert st.ssbs == 0
    assert st.max_configs >= 1


def test_prune_keeps_c_d_and_their_conflicts(fig2, fig2_store):
    from qpor.events import Configuration
    ex = Explorer(fig2.program)
    ex.store = fig2_store
    C = Configuration.from_events(fig2_store, {1, 8})
    ex.prune(C, (2,))
    live = fig2_store.live
    assert {1, 8, 2} <= live
    assert 5 in live and 11 in live      # conflict with 2 through the mutex chain
    assert 15 not in live and 16 not in live  # concurrent with everything in C and D
