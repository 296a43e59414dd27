"""Single-site mutation operators for seeding faults into MiniLang programs.

Supported operators:

    AOR  arithmetic operator replacement   (+ - * / %)
    ROR  relational operator replacement   (< <= > >= == !=)
    LOR  logical operator replacement      (&& ||)
    CRP  constant replacement              (c + 1, c - 1 when c > 0)
    VRP  variable reference replacement    (another variable definitely assigned at that point)

Memory-allocation faults have no MiniLang counterpart and are not generated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .minilang import (
    ARITH_OPS,
    LOGIC_OPS,
    REL_OPS,
    Ast,
    BinOp,
    Num,
    Var,
    definitely_assigned_before,
    parse,
    replace_node,
    source_tokens,
    unparse,
)
from .tracer import DEFAULT_STEP_BUDGET, TestSuite, run_suite

OPERATORS = ("AOR", "ROR", "LOR", "CRP", "VRP")


@dataclass(frozen=True)
class Mutant:
    base: str
    stmt: int  # faulty statement id
    position: int  # token index in the unparsed base program
    operator: str
    original: str
    replacement: str
    ast: Ast = field(compare=False, repr=False)

    @property
    def id(self) -> str:
        return f"{self.base}:{self.stmt}:{self.position}:{self.operator}:{self.replacement}"

    @property
    def source(self) -> str:
        return unparse(self.ast).text

    def manifest(self) -> dict:
        return {
            "id": self.id,
            "base": self.base,
            "site": {"stmt": self.stmt, "position": self.position},
            "operator": self.operator,
            "original": self.original,
            "replacement": self.replacement,
            "faultyStmtId": self.stmt,
            "sourceText": self.source,
        }

    @classmethod
    def from_manifest(cls, obj: dict) -> "Mutant":
        """Load a generated or hand-written mutant (only base, faultyStmtId and sourceText are required)."""
        site = obj.get("site", {})
        ast = parse(obj["sourceText"], name=obj.get("base", "mutant"))
        return cls(
            obj.get("base", ast.name),
            int(obj["faultyStmtId"]),
            int(site.get("position", -1)),
            obj.get("operator", "HAND"),
            obj.get("original", ""),
            obj.get("replacement", ""),
            ast,
        )


def _replacements(origin, kind: str, in_scope: frozenset) -> list:
    if kind == "AOR" and isinstance(origin, BinOp) and origin.op in ARITH_OPS:
        return [(op, BinOp(op, origin.left, origin.right)) for op in ARITH_OPS if op != origin.op]
    if kind == "ROR" and isinstance(origin, BinOp) and origin.op in REL_OPS:
        return [(op, BinOp(op, origin.left, origin.right)) for op in REL_OPS if op != origin.op]
    if kind == "LOR" and isinstance(origin, BinOp) and origin.op in LOGIC_OPS:
        return [(op, BinOp(op, origin.left, origin.right)) for op in LOGIC_OPS if op != origin.op]
    if kind == "CRP" and isinstance(origin, Num):
        values = [origin.value + 1] + ([origin.value - 1] if origin.value > 0 else [])
        return [(str(v), Num(v)) for v in values]
    if kind == "VRP" and isinstance(origin, Var):
        return [(name, Var(name)) for name in sorted(in_scope) if name != origin.name]
    return []


def enumerate_mutants(ast: Ast, operators: Sequence[str] = OPERATORS) -> list:
    """All single-site mutants, ordered by (statement, token position, operator)."""
    unknown = set(operators) - set(OPERATORS)
    if unknown:
        raise ValueError(f"unknown mutation operator(s): {', '.join(sorted(unknown))}")
    scope = definitely_assigned_before(ast)
    kinds = [k for k in OPERATORS if k in operators]
    mutants = []
    for position, tok in enumerate(source_tokens(ast)):
        if tok.origin is None or tok.stmt is None:
            continue
        for kind in kinds:
            for text, new in _replacements(tok.origin, kind, scope[tok.stmt]):
                mutants.append(
                    Mutant(ast.name, tok.stmt, position, kind, tok.text, text, replace_node(ast, tok.origin, new))
                )
    mutants.sort(key=lambda m: (m.stmt, m.position, OPERATORS.index(m.operator)))
    return mutants


class MutantClass(str, Enum):
    KILLED = "KILLED"
    EQUIVALENT_ON_SUITE = "EQUIVALENT_ON_SUITE"
    NO_PASSING = "NO_PASSING"


@dataclass(frozen=True)
class Classification:
    kind: MutantClass
    failing: tuple  # test ids
    passing: tuple
    results: tuple = field(default=(), compare=False, repr=False)


def classify_results(results: Iterable) -> Classification:
    results = tuple(results)
    failing = tuple(r.test_id for r in results if r.verdict.failing)
    passing = tuple(r.test_id for r in results if not r.verdict.failing)
    if not failing:
        kind = MutantClass.EQUIVALENT_ON_SUITE
    elif not passing:
        kind = MutantClass.NO_PASSING
    else:
        kind = MutantClass.KILLED
    return Classification(kind, failing, passing, results)


def classify_mutant(mutant: Mutant, suite: TestSuite, tpdg=None,
                    step_budget: int = DEFAULT_STEP_BUDGET) -> Classification:
    """Run the suite (golden outputs from the base program) against the mutant."""
    return classify_results(run_suite(mutant.ast, tpdg, suite, step_budget))


def write_manifests(mutants: Iterable[Mutant], out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, m in enumerate(mutants, start=1):
        path = out / f"{m.base}_m{i:03d}.json"
        path.write_text(json.dumps(m.manifest(), indent=1) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def load_manifest(path) -> Mutant:
    return Mutant.from_manifest(json.loads(Path(path).read_text(encoding="utf-8")))


def hand_seeded(source_text: str, faulty_stmt: int, base: Optional[str] = None) -> Mutant:
    """Wrap a hand-written faulty version of a program as a mutant."""
    return Mutant.from_manifest({"base": base or "hand", "faultyStmtId": faulty_stmt, "sourceText": source_text})
