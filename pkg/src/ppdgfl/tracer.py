"""Execute MiniLang programs on test cases and record node-state traces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .minilang import Assign, Ast, If, Num, Print, UnOp, Var, While
from .ppdg import SIGN, Event, NodeStateTrace, StatePolicy, TransformedPdg

DEFAULT_STEP_BUDGET = 10**6

_INT_MIN = -(2**31)


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    CRASH = "CRASH"

    @property
    def failing(self) -> bool:
        return self is not Verdict.PASS


@dataclass(frozen=True)
class TestCase:
    __test__ = False

    id: str
    inputs: dict
    expected: tuple = ()

    def to_json(self) -> dict:
        return {"id": self.id, "inputs": dict(self.inputs), "expected": list(self.expected)}

    @classmethod
    def from_json(cls, obj: dict) -> "TestCase":
        return cls(str(obj["id"]), {k: int(v) for k, v in obj.get("inputs", {}).items()},
                   tuple(int(v) for v in obj.get("expected", ())))


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    program: str
    cases: tuple

    def __len__(self):
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    def to_json(self) -> dict:
        return {"program": self.program, "cases": [c.to_json() for c in self.cases]}

    @classmethod
    def from_json(cls, obj: dict) -> "TestSuite":
        return cls(obj.get("program", ""), tuple(TestCase.from_json(c) for c in obj["cases"]))

    @classmethod
    def load(cls, path) -> "TestSuite":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class ExecutionResult:
    test_id: str
    output: tuple
    verdict: Verdict
    trace: NodeStateTrace
    steps: int
    covered: frozenset = field(default_factory=frozenset)  # statements whose evaluation started
    fault: Optional[str] = None


class _Crash(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _wrap(value: int) -> int:
    # 32-bit two's complement, like Java int
    return (value - _INT_MIN) % 2**32 + _INT_MIN


def _div(a: int, b: int) -> int:
    if b == 0:
        raise _Crash("division by zero")
    q = abs(a) // abs(b)
    return _wrap(q if (a < 0) == (b < 0) else -q)


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise _Crash("modulo by zero")
    r = abs(a) % abs(b)
    return r if a >= 0 else -r


_COMPARE = {
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
}
_ARITH = {
    "+": lambda a, b: _wrap(a + b),
    "-": lambda a, b: _wrap(a - b),
    "*": lambda a, b: _wrap(a * b),
    "/": _div,
    "%": _mod,
}


def compile_expr(expr):
    """Turn an expression tree into a closure over the variable environment."""
    if isinstance(expr, Num):
        value = _wrap(expr.value)
        return lambda env: value
    if isinstance(expr, Var):
        name = expr.name
        return lambda env: env[name]
    if isinstance(expr, UnOp):
        operand = compile_expr(expr.operand)
        if expr.op == "-":
            return lambda env: _wrap(-operand(env))
        return lambda env: int(operand(env) == 0)
    left, right = compile_expr(expr.left), compile_expr(expr.right)
    if expr.op == "&&":
        return lambda env: int(left(env) != 0 and right(env) != 0)
    if expr.op == "||":
        return lambda env: int(left(env) != 0 or right(env) != 0)
    fn = _ARITH.get(expr.op) or _COMPARE[expr.op]
    return lambda env: fn(left(env), right(env))


def evaluate(expr, env: dict) -> int:
    return compile_expr(expr)(env)


class _Run:
    def __init__(self, aux_before: dict, budget: int, policy: StatePolicy):
        self.budget = budget
        self.policy = policy
        self.steps = 0
        self.events: list = []
        self.output: list = []
        self.covered: set = set()
        self.last: dict = {}
        self.aux_before = aux_before

    def emit(self, node: int, state: str) -> None:
        self.events.append(Event(node, state))
        self.last[node] = state

    def enter(self, sid: int) -> None:
        if self.steps >= self.budget:
            raise _Crash("step budget exhausted")
        self.steps += 1
        self.covered.add(sid)
        aux = self.aux_before.get(sid)
        if aux:
            for node, source in aux:
                if source in self.last:
                    self.emit(node, self.last[source])


def _compile_block(stmts) -> list:
    return [_compile_stmt(s) for s in stmts]


def _run_block(block, run, env) -> None:
    for step in block:
        step(run, env)


def _compile_stmt(stmt):
    sid = stmt.id
    if isinstance(stmt, (Assign, Print)):
        expr = compile_expr(stmt.expr)
        target = stmt.target if isinstance(stmt, Assign) else None

        def simple(run, env):
            run.enter(sid)
            value = expr(env)
            if target is None:
                run.output.append(value)
            else:
                env[target] = value
            run.emit(sid, run.policy.abstract_value(value))

        return simple
    cond = compile_expr(stmt.cond)
    if isinstance(stmt, If):
        then, orelse = _compile_block(stmt.then), _compile_block(stmt.orelse)

        def branch(run, env):
            run.enter(sid)
            taken = cond(env) != 0
            run.emit(sid, run.policy.abstract_branch(taken))
            _run_block(then if taken else orelse, run, env)

        return branch
    if isinstance(stmt, While):
        body = _compile_block(stmt.body)

        def loop(run, env):
            while True:
                run.enter(sid)
                taken = cond(env) != 0
                run.emit(sid, run.policy.abstract_branch(taken))
                if not taken:
                    break
                _run_block(body, run, env)

        return loop
    raise TypeError(stmt)  # pragma: no cover


class CompiledProgram:
    """An AST prepared for repeated execution, with aux-event emission points resolved."""

    def __init__(self, ast: Ast, tpdg: Optional[TransformedPdg] = None):
        self.ast = ast
        self.block = _compile_block(ast.body)
        self.aux_before: dict = {}
        if tpdg is not None:
            for aux in sorted(tpdg.aux_of):
                self.aux_before.setdefault(tpdg.aux_target[aux], []).append((aux, tpdg.aux_of[aux][0]))


def execute(ast: Ast, tpdg: Optional[TransformedPdg], case: TestCase,
            step_budget: int = DEFAULT_STEP_BUDGET, policy: StatePolicy = SIGN,
            compiled: Optional[CompiledProgram] = None) -> ExecutionResult:
    """Run one test case.  Runtime faults produce a ``CRASH`` verdict instead of raising."""
    missing = [v for v in ast.inputs if v not in case.inputs]
    if missing:
        raise ValueError(f"test case {case.id!r} does not bind input(s) {', '.join(missing)}")
    env = {v: _wrap(case.inputs[v]) for v in ast.inputs}
    program = compiled if compiled is not None else CompiledProgram(ast, tpdg)
    run = _Run(program.aux_before, step_budget, policy)
    fault = None
    try:
        _run_block(program.block, run, env)
    except _Crash as crash:
        fault = crash.reason
    output = tuple(run.output)
    if fault is not None:
        verdict = Verdict.CRASH
    elif output == tuple(case.expected):
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    trace = NodeStateTrace(tuple(run.events), case.id, verdict.value)
    return ExecutionResult(case.id, output, verdict, trace, run.steps, frozenset(run.covered), fault)


def run_suite(ast: Ast, tpdg: Optional[TransformedPdg], suite: Iterable[TestCase],
              step_budget: int = DEFAULT_STEP_BUDGET, policy: StatePolicy = SIGN) -> list:
    compiled = CompiledProgram(ast, tpdg)
    return [execute(ast, tpdg, case, step_budget, policy, compiled) for case in suite]


def golden_suite(ast: Ast, inputs: Iterable[tuple], program: str = "",
                 step_budget: int = DEFAULT_STEP_BUDGET) -> TestSuite:
    """Build a suite whose expected outputs come from running ``ast`` itself.

    ``inputs`` yields (case id, bindings) pairs.  Crashing inputs are rejected.
    """
    cases = []
    for case_id, bindings in inputs:
        result = execute(ast, None, TestCase(case_id, dict(bindings)), step_budget)
        if result.verdict is Verdict.CRASH:
            raise ValueError(f"golden run of case {case_id!r} crashed: {result.fault}")
        cases.append(TestCase(case_id, dict(bindings), result.output))
    return TestSuite(program or ast.name, tuple(cases))
