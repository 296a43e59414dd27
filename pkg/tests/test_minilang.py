import pytest
from hypothesis import given, settings

from conftest import corpus_program, programs
from oracles import definite_assignment_violation
from ppdgfl.graphs import build_cfg
from ppdgfl.minilang import (
    Assign,
    BinOp,
    MiniLangError,
    ParseError,
    Print,
    SourceProgram,
    UseBeforeAssignmentError,
    Var,
    While,
    list_statements,
    parse,
    replace_node,
    source_tokens,
    tokenize,
    unparse,
)


def ids(ast):
    return [s.id for s in ast.statements()]


def test_two_statements():
    ast = parse("x = 1; print(x);")
    assert ids(ast) == [1, 2]
    assert isinstance(ast.body[0], Assign) and isinstance(ast.body[1], Print)


def test_preorder_numbering_while():
    ast = parse("input n; while (n > 0) { n = n - 1; } print(n);")
    loop, out = ast.body
    assert isinstance(loop, While) and loop.id == 1
    assert loop.body[0].id == 2
    assert out.id == 3


def test_inputs_supplied_outside_the_source():
    ast = parse("while (n > 0) { n = n - 1; } print(n);", inputs=["n"])
    assert ast.inputs == ("n",)
    assert ids(ast) == [1, 2, 3]
    assert ast == parse("input n; while (n > 0) { n = n - 1; } print(n);")
    assert parse(unparse(ast).text) == ast
    assert parse("input a; print(a + b);", inputs=["b", "a"]).inputs == ("a", "b")
    with pytest.raises(UseBeforeAssignmentError):
        parse("print(y);", inputs=["n"])


def test_use_before_assignment():
    with pytest.raises(UseBeforeAssignmentError) as err:
        parse("print(y);")
    assert err.value.line == 1 and err.value.col == 1


def test_assignment_only_in_one_branch_is_rejected():
    with pytest.raises(UseBeforeAssignmentError):
        parse("input c;\nif (c) { x = 1; }\nprint(x);")
    parse("input c;\nif (c) { x = 1; } else { x = 2; }\nprint(x);")


def test_loop_body_assignment_not_definite_after_loop():
    with pytest.raises(UseBeforeAssignmentError):
        parse("input n; while (n > 0) { y = n; n = n - 1; } print(y);")


def test_duplicate_input_declaration():
    with pytest.raises(ParseError, match="duplicate input"):
        parse("input a, a; print(a);")


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("x = ;", 1, 5),
        ("x = 1\nprint(x);", 2, 1),
        ("while (1) { x = 1;", 1, 19),
        ("x = 1 $ 2;", 1, 7),
    ],
)
def test_syntax_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == (line, col)


def test_precedence():
    ast = parse("input a, b, c; x = a + b * c < a || !b && c;")
    expr = ast.body[0].expr
    assert expr.op == "||"
    assert expr.left.op == "<" and expr.left.left.op == "+" and expr.left.left.right.op == "*"
    assert expr.right.op == "&&" and expr.right.left.op == "!"


def test_unparse_round_trip_simple():
    ast = parse("x = 1;")
    text = unparse(ast).text
    assert parse(text) == ast


def test_unparse_round_trip_nested():
    src = """
    input n, m;
    while (n > 0) {
        if (n % 2 == 0) { m = m + n; } else { while (m > 10) { m = m - -3; } }
        n = n - 1;
    }
    print(-(m * (n + 1)));
    """
    ast = parse(src)
    again = parse(unparse(ast))
    assert again == ast
    assert ids(again) == ids(ast)


def test_corpus_round_trip(corpus_name):
    ast = corpus_program(corpus_name)
    once = parse(unparse(ast))
    assert once == ast
    assert parse(unparse(once)) == once
    assert ids(ast) == list(range(1, len(ast) + 1))


@settings(max_examples=150, deadline=None)
@given(programs())
def test_round_trip_property(ast):
    text = unparse(ast).text
    assert parse(text) == ast


def _token_diff(a, b):
    ta = [t.text for t in tokenize(a)]
    tb = [t.text for t in tokenize(b)]
    assert len(ta) == len(tb)
    return [i for i, (x, y) in enumerate(zip(ta, tb)) if x != y]


def test_operator_swap_changes_exactly_one_token():
    ast = parse("input a, b, c; x = a + b * c; print(x);")
    mul = next(t.origin for t in source_tokens(ast) if t.text == "*")
    mutated = replace_node(ast, mul, BinOp("+", mul.left, mul.right))
    diff = _token_diff(unparse(ast).text, unparse(mutated).text)
    assert len(diff) == 1
    assert parse(unparse(mutated)) == mutated


def test_source_tokens_match_lexer():
    ast = corpus_program("bubblesort")
    toks = [t.text for t in source_tokens(ast)]
    lexed = [t.text for t in tokenize(unparse(ast).text) if t.kind != "EOF"]
    assert toks == lexed


def test_list_statements():
    ast = parse("input y, z; x = y + z; while (x > 0) { x = x - 1; }")
    rows = list_statements(ast)
    assert len(rows) == 3
    assert rows[0].used == {"y", "z"} and rows[0].defined == "x"
    assert rows[1].kind == "while" and rows[1].is_predicate and rows[1].defined is None
    assert not rows[2].is_predicate


def test_source_program_name_is_kept():
    ast = parse(SourceProgram("print(1);", "demo"))
    assert ast.name == "demo"
    assert unparse(ast).name == "demo"


def test_replace_node_requires_presence():
    ast = parse("x = 1;")
    with pytest.raises(ValueError):
        replace_node(ast, Var("x"), Var("y"))


def test_errors_share_base_class():
    assert issubclass(ParseError, MiniLangError)
    assert issubclass(UseBeforeAssignmentError, MiniLangError)


@settings(max_examples=200, deadline=None)
@given(programs(max_stmts=7, inputs=("a",)))
def test_definite_assignment_matches_path_enumeration(ast):
    """Rejection happens exactly when some CFG path reads a variable before writing it."""
    from ppdgfl.minilang import StatementInfo, expr_vars, stmt_expr, stmt_kind

    rows = [
        StatementInfo(s.id, stmt_kind(s), frozenset(expr_vars(stmt_expr(s))), getattr(s, "target", None))
        for s in ast.statements()
    ]
    violation = definite_assignment_violation(build_cfg(ast), rows, ast.inputs)
    text = unparse(ast).text
    if violation is None:
        parse(text)
    else:
        with pytest.raises(UseBeforeAssignmentError):
            parse(text)
