import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_program, corpus_suite
from ppdgfl.graphs import analyze
from ppdgfl.minilang import parse
from ppdgfl.ppdg import assign_state_spaces, transform_pdg, validate_trace
from ppdgfl.tracer import TestCase, TestSuite, Verdict, evaluate, execute, golden_suite, run_suite

INT_MAX = 2**31 - 1


def build(src):
    ast = parse(src) if isinstance(src, str) else src
    tpdg = transform_pdg(analyze(ast)[2])
    return ast, tpdg


def test_sign_of_negative_value():
    ast, tpdg = build("x = 0 - 3; print(x);")
    r = execute(ast, tpdg, TestCase("t", {}, (-3,)))
    assert r.verdict is Verdict.PASS
    assert [tuple(e) for e in r.trace.events] == [(1, "NEG"), (2, "NEG")]
    assert r.output == (-3,)


def test_countdown_states():
    ast, tpdg = build("input n; while (n > 0) { n = n - 1; }")
    to_loop = next(a for a, t in tpdg.aux_target.items() if t == 1)
    to_body = next(a for a, t in tpdg.aux_target.items() if t == 2)
    r = execute(ast, tpdg, TestCase("t", {"n": 2}, ()))
    loop = [s for n, s in r.trace.events if n == 1]
    body = [s for n, s in r.trace.events if n == 2]
    assert loop == ["TRUE", "TRUE", "FALSE"]
    assert body == ["POS", "ZERO"]
    # aux events precede each re-execution and carry the latest value of n
    assert [tuple(e) for e in r.trace.events] == [
        (1, "TRUE"), (2, "POS"), (to_loop, "POS"), (1, "TRUE"),
        (to_body, "POS"), (2, "ZERO"), (to_loop, "ZERO"), (1, "FALSE"),
    ]


def test_division_by_zero_crashes():
    ast, tpdg = build("y = 5; x = 1 / 0; print(x);")
    r = execute(ast, tpdg, TestCase("t", {}, ()))
    assert r.verdict is Verdict.CRASH and r.verdict.failing
    assert "zero" in r.fault
    assert [tuple(e) for e in r.trace.events] == [(1, "POS")]
    assert r.trace.verdict == "CRASH"


def test_modulo_by_zero_crashes():
    ast, tpdg = build("input a; x = 7 % a;")
    assert execute(ast, tpdg, TestCase("t", {"a": 0}, ())).verdict is Verdict.CRASH


def test_step_budget_turns_divergence_into_crash():
    ast, tpdg = build("x = 1; while (x > 0) { x = x + 0; }")
    r = execute(ast, tpdg, TestCase("t", {}, ()), step_budget=100)
    assert r.verdict is Verdict.CRASH
    assert r.steps == 100


@pytest.mark.parametrize(
    "expr, expected",
    [
        ("7 / 2", 3),
        ("0 - 7 / 2", -3),
        ("(0 - 7) / 2", -3),
        ("(0 - 7) % 3", -1),
        ("7 % (0 - 3)", 1),
        (f"{INT_MAX} + 1", -(2**31)),
        ("65536 * 65536", 0),
        ("3 < 4", 1),
        ("!5", 0),
        ("2 && 0 || 3", 1),
    ],
)
def test_integer_semantics(expr, expected):
    ast = parse(f"x = {expr};")
    assert evaluate(ast.body[0].expr, {}) == expected


@settings(max_examples=200, deadline=None)
@given(st.integers(-(2**31), 2**31 - 1), st.integers(-(2**31), 2**31 - 1).filter(bool))
def test_division_truncates_toward_zero(a, b):
    ast = parse("input a, b; q = a / b; r = a % b;")
    env = {"a": a, "b": b}
    q = evaluate(ast.body[0].expr, env)
    r = evaluate(ast.body[1].expr, env)
    if not (a == -(2**31) and b == -1):
        sign = -1 if (a < 0) != (b < 0) else 1
        assert q == sign * (abs(a) // abs(b))
        assert q * b + r == a
    assert abs(r) < abs(b)
    assert r == 0 or (r < 0) == (a < 0)


def test_missing_input_binding():
    ast, tpdg = build("input a; print(a);")
    with pytest.raises(ValueError, match="does not bind"):
        execute(ast, tpdg, TestCase("t", {}, ()))


def test_suite_with_one_failing_case():
    ast, tpdg = build("input a; print(a * 2);")
    suite = TestSuite("double", (
        TestCase("ok1", {"a": 1}, (2,)),
        TestCase("bad", {"a": 2}, (5,)),
        TestCase("ok2", {"a": -4}, (-8,)),
    ))
    results = run_suite(ast, tpdg, suite)
    assert [r.verdict for r in results] == [Verdict.PASS, Verdict.FAIL, Verdict.PASS]
    assert run_suite(ast, tpdg, TestSuite("empty", ())) == []


def test_run_suite_is_deterministic_and_order_free(corpus_name):
    ast, tpdg = build(corpus_program(corpus_name))
    suite = corpus_suite(corpus_name)
    first = run_suite(ast, tpdg, suite, 5000)
    assert first == run_suite(ast, tpdg, suite, 5000)
    backwards = run_suite(ast, tpdg, tuple(reversed(suite.cases)), 5000)
    assert list(reversed(backwards)) == first


def test_corpus_goldens_pass_and_conform(corpus_name):
    ast, tpdg = build(corpus_program(corpus_name))
    skel = assign_state_spaces(tpdg, ast)
    for r in run_suite(ast, tpdg, corpus_suite(corpus_name), 5000):
        assert r.verdict is Verdict.PASS
        validate_trace(r.trace, skel)
        statements = {n for n, _ in r.trace.events if n not in tpdg.aux_of}
        assert statements == r.covered


def test_crash_coverage_includes_the_faulting_statement():
    ast, tpdg = build("input a; x = 1; y = x / a;")
    r = execute(ast, tpdg, TestCase("t", {"a": 0}, ()))
    assert r.covered == {1, 2}
    assert {n for n, _ in r.trace.events} == {1}


def test_golden_suite_records_outputs():
    ast = parse("input a; print(a + 1); print(a * a);")
    suite = golden_suite(ast, [("c1", {"a": 3}), ("c2", {"a": -2})], "sq")
    assert [c.expected for c in suite.cases] == [(4, 9), (-1, 4)]
    with pytest.raises(ValueError, match="crashed"):
        golden_suite(parse("input a; print(1 / a);"), [("z", {"a": 0})])


def test_suite_json_round_trip(tmp_path):
    suite = corpus_suite("triangle")
    suite.save(tmp_path / "s.json")
    assert TestSuite.load(tmp_path / "s.json") == suite
