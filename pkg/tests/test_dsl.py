from __future__ import annotations

import pytest

from qpor.benchmarks import BUNDLED, bundled_source, generate_writers_source
from qpor.dsl import format_expr, format_program, parse, tokenize
from qpor.errors import ParseError
from qpor.program import count_statements


def test_fig2_shape(fig2):
    p = fig2.program
    assert p.nthreads == 3 and p.nmutexes == 2
    assert [count_statements(t.body) for t in p.threads] == [6, 3, 3]
    assert p.thread_names == ["t0", "t1", "t2"]


def test_empty_thread_is_valid():
    p = parse("var x\nthread a {\n}\nthread b {\n  x = 1\n}\n").program
    assert p.nthreads == 2
    assert p.is_terminated(p.initial_state(), 0)
    assert len(p.enabled(p.initial_state())) == 1


def _error(text: str) -> ParseError:
    with pytest.raises(ParseError) as info:
        parse(text, "t.qp")
    return info.value


def test_undeclared_lock_reports_span():
    err = _error("mutex m\nthread t {\n  lock(q)\n}\n")
    assert err.kind == "undeclared-identifier"
    assert (err.line, err.col) == (3, 8)
    assert str(err).startswith("t.qp:3:8:")


@pytest.mark.parametrize("text, kind", [
    ("var x\nvar x\nthread t {\n}\n", "duplicate-declaration"),
    ("thread t {\n}\nthread t {\n}\n", "duplicate-declaration"),
    ("mutex m\nthread t {\n  lock()\n}\n", "lock-arity"),
    ("mutex m\nmutex n\nthread t {\n  lock(m, n)\n}\n", "lock-arity"),
    ("var v\nthread t {\n  unlock(v)\n}\n", "lock-arity"),
    ("var x\nthread t {\n  x = 1 x = 2\n}\n", "syntax-error"),
    ("var x\nthread t {\n  x = (1\n}\n", "syntax-error"),
    ("var x\n", "syntax-error"),
    ("var x\nthread t {\n  y = 1\n}\n", "undeclared-identifier"),
    ("mutex m\nthread t {\n  m = 1\n}\n", "type-error"),
])
def test_parse_errors(text, kind):
    assert _error(text).kind == kind


def test_comments_and_initial_values():
    src = parse("# header\nvar x = 3  # trailing\narray a[3] = {1, -2}\nthread t {\n  x = a[1]\n}\n")
    p = src.program
    s = p.initial_state()
    assert p.value(s, "x") == 3
    assert p.values(s)["a"] == (1, -2, 0)


def test_precedence():
    p = parse("var x\nthread t {\n  x = 1 + 2 * 3 - 4 / 2 % 3\n}\n").program
    s, _ = p.execute(p.initial_state(), 0)
    assert p.value(s, "x") == 1 + 6 - (2 % 3)
    e = p.threads[0].body[0].value
    assert format_expr(e) == "1 + 2 * 3 - 4 / 2 % 3"


def test_boolean_operators():
    p = parse("var x\nvar y = 2\nthread t {\n  x = !(y > 1) || y == 2 && y != 3\n}\n").program
    s, _ = p.execute(p.initial_state(), 0)
    assert p.value(s, "x") == 1


@pytest.mark.parametrize("name", BUNDLED)
def test_round_trip_bundled(name):
    first = parse(bundled_source(name)).program
    printed = format_program(first)
    second = parse(printed).program
    assert second.threads == first.threads
    assert format_program(second) == printed


def test_round_trip_parenthesised_right_operand():
    text = "var x\nthread t {\n  x = 10 - (3 - 2) * -(x + 1)\n}\n"
    p = parse(text).program
    again = parse(format_program(p)).program
    assert again.threads == p.threads
    s1, _ = p.execute(p.initial_state(), 0)
    assert p.value(s1, "x") == 10 - 1 * -1


def test_round_trip_generated_writers():
    text = generate_writers_source(4)
    p = parse(text).program
    assert parse(format_program(p)).program.threads == p.threads


def test_tokenize_positions():
    toks = tokenize("var x\n  lock(m)")
    words = [(t.text, t.line, t.col) for t in toks if t.kind != "nl"]
    assert words[:4] == [("var", 1, 1), ("x", 1, 5), ("lock", 2, 3), ("(", 2, 7)]
