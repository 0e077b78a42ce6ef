"""Programs, their interleaving semantics, and the structural independence relation.

A program is a fixed set of threads over shared integer variables (scalars and
fixed-size arrays) and mutexes.  Every thread is compiled to a flat list of
instructions; each instruction that can execute is one *action* of the
labelled transition system:

* ``LOCAL``   assignments, asserts and branch-condition evaluations,
* ``LOCK m``  enabled only while ``m`` is free,
* ``UNLOCK m``.

States are immutable, so they can be hashed, cached and shared freely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence, Union

from qpor.errors import ActionNotEnabled, ExecutionError, NotARun


class Effect(enum.IntEnum):
    LOCAL = 0
    LOCK = 1
    UNLOCK = 2


class Action(NamedTuple):
    """An LTS action: the acting thread and the synchronisation effect."""

    thread: int
    effect: Effect
    mutex: int | None = None

    def __str__(self) -> str:
        if self.effect is Effect.LOCAL:
            return f"<{self.thread},local>"
        name = "lock" if self.effect is Effect.LOCK else "unlock"
        return f"<{self.thread},{name} {self.mutex}>"


def independent(a: Action, b: Action) -> bool:
    """Structural independence between two actions.

    Actions of different threads commute unless both touch the same mutex.
    """
    if a.thread == b.thread:
        return False
    if a.effect is Effect.LOCAL or b.effect is Effect.LOCAL:
        return True
    return a.mutex != b.mutex


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Index:
    name: str
    index: "Expr"


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Name, Index, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    target: Union[Name, Index]
    value: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Lock:
    mutex: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unlock:
    mutex: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assert:
    cond: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple
    line: int = field(default=0, compare=False)


Stmt = Union[Assign, Lock, Unlock, Assert, If, While]


@dataclass(frozen=True)
class VarDecl:
    name: str
    size: int | None = None  # None for scalars
    init: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MutexDecl:
    name: str
    locked: bool = False
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ThreadDef:
    name: str
    body: tuple
    line: int = field(default=0, compare=False)


def count_statements(body: Iterable[Stmt]) -> int:
    n = 0
    for s in body:
        n += 1
        if isinstance(s, If):
            n += count_statements(s.then) + count_statements(s.orelse)
        elif isinstance(s, While):
            n += count_statements(s.body)
    return n


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

_ASSIGN, _LOCK, _UNLOCK, _ASSERT, _BRANCH, _JUMP = range(6)


@dataclass(slots=True)
class Instr:
    kind: int
    line: int
    text: str
    next: int = -1
    # ASSIGN: write(memory_list) ; ASSERT/BRANCH: cond(memory) -> int
    write: Callable | None = None
    cond: Callable | None = None
    mutex: int | None = None
    target_false: int = -1


def _cdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


@dataclass(frozen=True, slots=True)
class State:
    """Memory valuation, lock bits, per-thread program counters, and step count."""

    memory: tuple
    locks: tuple
    pcs: tuple
    steps: int = 0


class Program:
    """A deterministic multithreaded program over shared variables and mutexes."""

    def __init__(self, variables: Sequence[VarDecl], mutexes: Sequence[MutexDecl],
                 threads: Sequence[ThreadDef]):
        self.variables = tuple(variables)
        self.mutexes = tuple(mutexes)
        self.threads = tuple(threads)
        self._layout: dict[str, tuple[int, int | None]] = {}
        self._mutex_index: dict[str, int] = {}
        init: list[int] = []
        for v in self.variables:
            if v.name in self._layout or v.name in self._mutex_index:
                raise ExecutionError("duplicate-declaration", f"'{v.name}' declared twice", line=v.line)
            self._layout[v.name] = (len(init), v.size)
            width = 1 if v.size is None else v.size
            if len(v.init) > width:
                raise ExecutionError("bad-initializer", f"too many initial values for '{v.name}'", line=v.line)
            init.extend(v.init)
            init.extend([0] * (width - len(v.init)))
        for m in self.mutexes:
            if m.name in self._layout or m.name in self._mutex_index:
                raise ExecutionError("duplicate-declaration", f"'{m.name}' declared twice", line=m.line)
            self._mutex_index[m.name] = len(self._mutex_index)
        self._initial = State(
            memory=tuple(init),
            locks=tuple(1 if m.locked else 0 for m in self.mutexes),
            pcs=tuple(0 for _ in self.threads),
        )
        compiled = [self._compile_thread(i, t) for i, t in enumerate(self.threads)]
        self.code: list[list[Instr]] = [c for c, _ in compiled]
        self._entry = tuple(entry for _, entry in compiled)

    # -- naming -----------------------------------------------------------

    @property
    def nthreads(self) -> int:
        return len(self.threads)

    @property
    def nmutexes(self) -> int:
        return len(self.mutexes)

    @property
    def thread_names(self) -> list[str]:
        return [t.name for t in self.threads]

    @property
    def mutex_names(self) -> list[str]:
        return [m.name for m in self.mutexes]

    def mutex_id(self, name: str) -> int:
        return self._mutex_index[name]

    def initially_locked(self, mutex: int) -> bool:
        return bool(self._initial.locks[mutex])

    def format_action(self, a: Action) -> str:
        if a.effect is Effect.LOCAL:
            return f"<{a.thread},local>"
        name = "lock" if a.effect is Effect.LOCK else "unlock"
        return f"<{a.thread},{name} {self.mutexes[a.mutex].name}>"

    def value(self, state: State, name: str, index: int | None = None) -> int:
        off, size = self._layout[name]
        if size is None:
            return state.memory[off]
        return state.memory[off + (index or 0)]

    def values(self, state: State) -> dict[str, int | tuple]:
        out: dict[str, int | tuple] = {}
        for name, (off, size) in self._layout.items():
            out[name] = state.memory[off] if size is None else tuple(state.memory[off:off + size])
        return out

    # -- compilation ------------------------------------------------------

    def _compile_expr(self, e: Expr, tid: int, line: int) -> Callable[[Sequence[int]], int]:
        if isinstance(e, Num):
            v = e.value
            return lambda m: v
        if isinstance(e, Name):
            off, size = self._lookup(e.name, tid, line)
            if size is not None:
                raise ExecutionError("type-error", f"array '{e.name}' used without index", tid, line)
            return lambda m: m[off]
        if isinstance(e, Index):
            off, size = self._lookup(e.name, tid, line)
            if size is None:
                raise ExecutionError("type-error", f"scalar '{e.name}' cannot be indexed", tid, line)
            idx = self._compile_expr(e.index, tid, line)
            name = e.name

            def load(m):
                i = idx(m)
                if not 0 <= i < size:
                    raise ExecutionError("array-index-out-of-bounds",
                                         f"{name}[{i}] outside [0, {size})", tid, line)
                return m[off + i]
            return load
        if isinstance(e, Unary):
            x = self._compile_expr(e.operand, tid, line)
            if e.op == "-":
                return lambda m: -x(m)
            if e.op == "!":
                return lambda m: 0 if x(m) else 1
            raise ExecutionError("syntax-error", f"unknown unary operator {e.op}", tid, line)
        if isinstance(e, Binary):
            lhs = self._compile_expr(e.left, tid, line)
            rhs = self._compile_expr(e.right, tid, line)
            op = e.op
            if op == "&&":
                return lambda m: 1 if lhs(m) and rhs(m) else 0
            if op == "||":
                return lambda m: 1 if lhs(m) or rhs(m) else 0
            if op in ("/", "%"):
                def divide(m):
                    a, b = lhs(m), rhs(m)
                    if b == 0:
                        raise ExecutionError("division-by-zero", f"{a} {op} 0", tid, line)
                    q = _cdiv(a, b)
                    return q if op == "/" else a - b * q
                return divide
            fn = _BINOPS.get(op)
            if fn is None:
                raise ExecutionError("syntax-error", f"unknown operator {op}", tid, line)
            return lambda m: fn(lhs(m), rhs(m))
        raise TypeError(f"not an expression: {e!r}")

    def _lookup(self, name: str, tid: int, line: int) -> tuple[int, int | None]:
        try:
            return self._layout[name]
        except KeyError:
            raise ExecutionError("undeclared-identifier", f"'{name}' is not a variable", tid, line) from None

    def _mutex(self, name: str, tid: int, line: int) -> int:
        try:
            return self._mutex_index[name]
        except KeyError:
            raise ExecutionError("undeclared-identifier", f"'{name}' is not a mutex", tid, line) from None

    def _compile_thread(self, tid: int, thread: ThreadDef) -> tuple[list[Instr], int]:
        from qpor.dsl import format_expr, format_stmt_head

        code: list[Instr] = []

        def emit(ins: Instr) -> int:
            code.append(ins)
            return len(code) - 1

        def block(stmts: tuple) -> None:
            for s in stmts:
                stmt(s)

        def stmt(s: Stmt) -> None:
            text = format_stmt_head(s)
            if isinstance(s, Assign):
                value = self._compile_expr(s.value, tid, s.line)
                if isinstance(s.target, Name):
                    off, size = self._lookup(s.target.name, tid, s.line)
                    if size is not None:
                        raise ExecutionError("type-error", f"cannot assign to array '{s.target.name}'", tid, s.line)

                    def write(m, off=off):
                        m[off] = value(m)
                else:
                    off, size = self._lookup(s.target.name, tid, s.line)
                    if size is None:
                        raise ExecutionError("type-error", f"scalar '{s.target.name}' cannot be indexed",
                                             tid, s.line)
                    idx = self._compile_expr(s.target.index, tid, s.line)
                    name, line = s.target.name, s.line

                    def write(m, off=off, size=size):
                        i = idx(m)
                        if not 0 <= i < size:
                            raise ExecutionError("array-index-out-of-bounds",
                                                 f"{name}[{i}] outside [0, {size})", tid, line)
                        m[off + i] = value(m)
                i = emit(Instr(_ASSIGN, s.line, text, write=write))
                code[i].next = len(code)
            elif isinstance(s, (Lock, Unlock)):
                kind = _LOCK if isinstance(s, Lock) else _UNLOCK
                i = emit(Instr(kind, s.line, text, mutex=self._mutex(s.mutex, tid, s.line)))
                code[i].next = len(code)
            elif isinstance(s, Assert):
                i = emit(Instr(_ASSERT, s.line, text, cond=self._compile_expr(s.cond, tid, s.line)))
                code[i].next = len(code)
            elif isinstance(s, If):
                b = emit(Instr(_BRANCH, s.line, text, cond=self._compile_expr(s.cond, tid, s.line)))
                code[b].next = len(code)
                block(s.then)
                if s.orelse:
                    j = emit(Instr(_JUMP, s.line, "jump"))
                    code[b].target_false = len(code)
                    block(s.orelse)
                    code[j].next = len(code)
                else:
                    code[b].target_false = len(code)
            elif isinstance(s, While):
                b = emit(Instr(_BRANCH, s.line, text, cond=self._compile_expr(s.cond, tid, s.line)))
                code[b].next = len(code)
                block(s.body)
                j = emit(Instr(_JUMP, s.line, "jump"))
                code[j].next = b
                code[b].target_false = len(code)
            else:
                raise TypeError(f"not a statement: {s!r}")

        block(thread.body)
        end = len(code)

        def resolve(pc: int) -> int:
            while pc < end and code[pc].kind == _JUMP:
                pc = code[pc].next
            return pc

        for ins in code:
            ins.next = resolve(ins.next)
            if ins.kind == _BRANCH:
                ins.target_false = resolve(ins.target_false)
        return code, resolve(0)

    # -- semantics --------------------------------------------------------

    def initial_state(self) -> State:
        return State(self._initial.memory, self._initial.locks, self._entry)

    def instruction(self, state: State, tid: int) -> Instr | None:
        code = self.code[tid]
        pc = state.pcs[tid]
        return code[pc] if pc < len(code) else None

    def is_terminated(self, state: State, tid: int) -> bool:
        return state.pcs[tid] >= len(self.code[tid])

    def next_action(self, state: State, tid: int) -> Action | None:
        """The action thread ``tid`` would perform next, ignoring lock availability."""
        ins = self.instruction(state, tid)
        if ins is None:
            return None
        if ins.kind == _LOCK:
            return Action(tid, Effect.LOCK, ins.mutex)
        if ins.kind == _UNLOCK:
            return Action(tid, Effect.UNLOCK, ins.mutex)
        return Action(tid, Effect.LOCAL)

    def enabled(self, state: State) -> list[Action]:
        out = []
        for tid in range(len(self.code)):
            a = self.next_action(state, tid)
            if a is None:
                continue
            if a.effect is Effect.LOCK and state.locks[a.mutex]:
                continue
            out.append(a)
        return out

    def execute(self, state: State, tid: int) -> tuple[State, bool]:
        """Fire the next action of ``tid``.

        Returns the successor state and whether the action was a failing assert.
        """
        ins = self.instruction(state, tid)
        if ins is None:
            raise ActionNotEnabled(f"<{tid},terminated>", tid)
        pcs = list(state.pcs)
        failed = False
        memory, locks = state.memory, state.locks
        kind = ins.kind
        if kind == _ASSIGN:
            mem = list(memory)
            ins.write(mem)
            memory = tuple(mem)
            pcs[tid] = ins.next
        elif kind == _BRANCH:
            pcs[tid] = ins.next if ins.cond(memory) else ins.target_false
        elif kind == _ASSERT:
            failed = not ins.cond(memory)
            pcs[tid] = ins.next
        elif kind == _LOCK:
            if locks[ins.mutex]:
                raise ActionNotEnabled(Action(tid, Effect.LOCK, ins.mutex), tid)
            locks = locks[:ins.mutex] + (1,) + locks[ins.mutex + 1:]
            pcs[tid] = ins.next
        elif kind == _UNLOCK:
            if not locks[ins.mutex]:
                raise ExecutionError("unlock-of-free-mutex",
                                     f"mutex '{self.mutexes[ins.mutex].name}' is not locked", tid, ins.line)
            locks = locks[:ins.mutex] + (0,) + locks[ins.mutex + 1:]
            pcs[tid] = ins.next
        else:  # pragma: no cover - jumps are resolved at compile time
            raise AssertionError("landed on a jump")
        return State(memory, locks, tuple(pcs), state.steps + 1), failed

    def step(self, state: State, action: Action) -> State:
        if action not in self.enabled(state):
            raise ActionNotEnabled(action, action.thread)
        return self.execute(state, action.thread)[0]

    def run(self, sequence: Iterable[Action]) -> State:
        state = self.initial_state()
        for i, a in enumerate(sequence):
            if a not in self.enabled(state):
                raise NotARun(i, a)
            state = self.execute(state, a.thread)[0]
        return state


_BINOPS: dict[str, Callable[[int, int], int]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
}


def enabled(state: State, program: Program) -> list[Action]:
    return program.enabled(state)


def step(state: State, action: Action, program: Program) -> State:
    return program.step(state, action)


def run(program: Program, sequence: Iterable[Action]) -> State:
    return program.run(sequence)
