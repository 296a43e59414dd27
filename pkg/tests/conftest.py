import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from ppdgfl.experiment import CORPUS_DIR
from ppdgfl.minilang import Assign, Ast, BinOp, If, Num, Print, UnOp, Var, While, parse_file
from ppdgfl.tracer import TestSuite

sys.path.insert(0, str(Path(__file__).parent))

CORPUS_NAMES = sorted(p.stem for p in CORPUS_DIR.glob("*.mini"))

ACCEPTANCE_LINES = []


def corpus_program(name):
    return parse_file(CORPUS_DIR / f"{name}.mini")


def corpus_suite(name):
    return TestSuite.load(CORPUS_DIR / f"{name}.suite.json")


@pytest.fixture(params=CORPUS_NAMES)
def corpus_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --------------------------------------------------------------------------
# Random MiniLang programs
# --------------------------------------------------------------------------

VARS = ("a", "b", "c")


def exprs(names=VARS):
    leaves = st.one_of(st.integers(0, 9).map(Num), st.sampled_from(names).map(Var))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(BinOp, st.sampled_from(["+", "-", "*", "<", "==", "&&", "||", ">="]), sub, sub),
            st.builds(UnOp, st.sampled_from(["-", "!"]), sub),
        ),
        max_leaves=4,
    )


@st.composite
def programs(draw, max_stmts=8, inputs=VARS, names=VARS):
    """Random programs with ids assigned in pre-order.  With the default inputs every read is defined."""
    budget = [draw(st.integers(1, max_stmts))]
    counter = [0]

    def block(depth):
        stmts = []
        n = draw(st.integers(0 if depth else 1, 3))
        for _ in range(n):
            if budget[0] <= 0:
                break
            budget[0] -= 1
            counter[0] += 1
            sid = counter[0]
            kind = draw(st.sampled_from(["assign", "assign", "print", "if", "while"] if depth < 2 else ["assign", "print"]))
            if kind == "assign":
                stmts.append(Assign(sid, draw(st.sampled_from(names)), draw(exprs(names))))
            elif kind == "print":
                stmts.append(Print(sid, draw(exprs(names))))
            elif kind == "if":
                cond = draw(exprs(names))
                then = block(depth + 1)
                orelse = block(depth + 1)
                stmts.append(If(sid, cond, then, orelse))
            else:
                cond = draw(exprs(names))
                stmts.append(While(sid, cond, block(depth + 1)))
        return tuple(stmts)

    return Ast(tuple(inputs), block(0), "random")
