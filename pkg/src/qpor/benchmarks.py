"""Benchmark generators and the bundled example programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from qpor.dsl import SourceProgram, parse


def generate_writers_source(n: int) -> str:
    """``n`` writers of ``x[j]``, a counter thread and a master writing ``x[c]``.

    Every access to shared data is wrapped in the lock of that variable, so
    the program is race free and the only dependencies are lock conflicts.
    """
    if n < 1:
        raise ValueError("writers needs n >= 1")
    lines = [f"# {n} writers, one counter, one master", f"array x[{n}]", "var c", "var i"]
    lines += [f"mutex mx{j}" for j in range(n)]
    lines.append("mutex mc")
    for j in range(n):
        lines += ["", f"thread w{j} {{", f"  lock(mx{j})", f"  x[{j}] = {j + 7}", f"  unlock(mx{j})", "}"]
    lines += ["", "thread count {"]
    for _ in range(n - 1):
        lines += ["  lock(mc)", "  c = c + 1", "  unlock(mc)"]
    lines += ["}", "", "thread master {", "  lock(mc)", "  i = c", "  unlock(mc)"]

    def chain(j: int, pad: str) -> list[str]:
        if j == n - 1:
            return [f"{pad}lock(mx{j})", f"{pad}x[i] = 0", f"{pad}unlock(mx{j})"]
        inner = pad + "  "
        return ([f"{pad}if (i == {j}) {{", f"{inner}lock(mx{j})", f"{inner}x[i] = 0",
                 f"{inner}unlock(mx{j})", f"{pad}}} else {{"] + chain(j + 1, inner) + [f"{pad}}}"])

    lines += chain(0, "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"


def generate_writers(n: int) -> SourceProgram:
    return parse(generate_writers_source(n), f"<writers {n}>")


@dataclass
class Formula3Sat:
    """CNF formula over variables ``0..nvars-1``; literals are (variable, polarity)."""

    nvars: int
    clauses: list[tuple[tuple[int, bool], ...]] = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        for j, c in enumerate(self.clauses):
            if not 1 <= len(c) <= 3:
                raise ValueError(f"malformed-formula: clause {j} has {len(c)} literals")
            seen: dict[int, bool] = {}
            for v, pol in c:
                if not 0 <= v < self.nvars:
                    raise ValueError(f"malformed-formula: clause {j} uses unknown variable {v}")
                if seen.get(v, pol) != pol:
                    raise ValueError(f"malformed-formula: clause {j} has v{v} with both polarities")
                seen[v] = pol

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment[v] == pol for v, pol in c) for c in self.clauses)


def generate_3sat_source(phi: Formula3Sat) -> str:
    """Program whose unfolding encodes ``phi``.

    Threads ``t_i``/``f_i`` race on the lock of variable ``i``; the winner
    decides its value.  Each clause ``j`` has a thread ``d_j`` and one thread
    ``r_{i,j}`` per literal, all competing for the clause lock.  A literal
    thread may only start once the matching ``t_i``/``f_i`` has released its
    start mutex (declared initially held).
    """
    lines = [f"# 3-SAT encoding: {phi.nvars} variables, {len(phi.clauses)} clauses"]
    lines += [f"mutex lv{i}" for i in range(phi.nvars)]
    lines += [f"mutex lc{j}" for j in range(len(phi.clauses))]
    starts: dict[tuple[int, bool], list[str]] = {}
    for j, c in enumerate(phi.clauses):
        for v, pol in c:
            name = f"s{'p' if pol else 'n'}{v}_{j}"
            starts.setdefault((v, pol), []).append(name)
            lines.append(f"mutex {name} = 1")
    for i in range(phi.nvars):
        for pol in (True, False):
            lines += ["", f"thread {'t' if pol else 'f'}{i} {{", f"  lock(lv{i})"]
            lines += [f"  unlock({s})" for s in starts.get((i, pol), [])]
            lines.append("}")
    for j in range(len(phi.clauses)):
        lines += ["", f"thread d{j} {{", f"  lock(lc{j})", "}"]
    for j, c in enumerate(phi.clauses):
        for v, pol in c:
            name = f"s{'p' if pol else 'n'}{v}_{j}"
            lines += ["", f"thread r{'p' if pol else 'n'}{v}_{j} {{", f"  lock({name})", f"  lock(lc{j})", "}"]
    return "\n".join(lines) + "\n"


def generate_3sat(phi: Formula3Sat) -> SourceProgram:
    return parse(generate_3sat_source(phi), "<3sat>")


# Example formula: (v0 | !v1 | v2) & (!v0 | v1) & (v1 | !v2)
EXAMPLE_FORMULA = Formula3Sat(3, [((0, True), (1, False), (2, True)),
                                  ((0, False), (1, True)),
                                  ((1, True), (2, False))])


def hard_formula(m: int) -> Formula3Sat:
    """``m`` independent satisfiable clauses followed by an unsatisfiable core.

    The core uses three fresh variables and all eight sign patterns, so no
    assignment satisfies it, but a search that fixes clauses in order only
    notices this after trying the combinations of the first ``m`` clauses.
    """
    clauses = [((3 * j, True), (3 * j + 1, True), (3 * j + 2, True)) for j in range(m)]
    base = 3 * m
    for mask in range(8):
        clauses.append(tuple((base + b, bool(mask >> b & 1)) for b in range(3)))
    return Formula3Sat(3 * m + 3, clauses)


BUNDLED = (
    "fig2", "nested_locks", "producer_consumer", "dispatcher", "philosophers",
    "pool", "pi", "mpat", "lock_chain", "readers", "asserts", "single",
)


def bundled_source(name: str) -> str:
    return resources.files("qpor.programs").joinpath(f"{name}.qp").read_text(encoding="utf-8")


def load_bundled(name: str) -> SourceProgram:
    return parse(bundled_source(name), f"{name}.qp")


def intern_3sat_unfolding(store, phi: Formula3Sat) -> list[int]:
    """Intern the whole unfolding of ``generate_3sat(phi)`` into ``store`` directly.

    The encoding has no unlock of a variable or clause lock, so every event
    has a single placement and the unfolding can be written down instead of
    explored.  Returns the clause events ``d_j`` in clause order.
    """
    from qpor.causality import BOTTOM
    from qpor.program import Action, Effect

    prog = store.program
    tid = {name: t for t, name in enumerate(prog.thread_names)}
    mid = prog.mutex_id
    released: dict[str, int] = {}
    for i in range(phi.nvars):
        for pol in (True, False):
            t = tid[f"{'t' if pol else 'f'}{i}"]
            e = store.intern(Action(t, Effect.LOCK, mid(f"lv{i}")), BOTTOM, BOTTOM)
            for j, c in enumerate(phi.clauses):
                if (i, pol) in c:
                    name = f"s{'p' if pol else 'n'}{i}_{j}"
                    e = store.intern(Action(t, Effect.UNLOCK, mid(name)), e, BOTTOM)
                    released[name] = e
    ds = []
    for j in range(len(phi.clauses)):
        ds.append(store.intern(Action(tid[f"d{j}"], Effect.LOCK, mid(f"lc{j}")), BOTTOM, BOTTOM))
    for j, c in enumerate(phi.clauses):
        for v, pol in c:
            name = f"s{'p' if pol else 'n'}{v}_{j}"
            t = tid[f"r{'p' if pol else 'n'}{v}_{j}"]
            e = store.intern(Action(t, Effect.LOCK, mid(name)), BOTTOM, released[name])
            store.intern(Action(t, Effect.LOCK, mid(f"lc{j}")), e, BOTTOM)
    store.live.update(store.events())
    return ds
