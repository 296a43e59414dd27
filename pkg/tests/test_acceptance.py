"""Acceptance criteria, one test each, with their stated tolerances and time limits.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

import oracles
from conftest import ACCEPTANCE_LINES, CORPUS_NAMES, corpus_program, corpus_suite
from ppdgfl.experiment import bundled_config, run_experiment
from ppdgfl.faultseeder import MutantClass, classify_mutant, enumerate_mutants
from ppdgfl.graphs import EXIT, analyze, build_cfg, compute_postdominators, control_dependences, reaching_definitions
from ppdgfl.localizer import order_ranking, rank_cp, sbi_scores, suspiciousness
from ppdgfl.minilang import While, list_statements, parse, tokenize, unparse
from ppdgfl.ppdg import assign_state_spaces, learn_params, query_prob, transform_pdg
from ppdgfl.tracer import ExecutionResult, Verdict, run_suite

from test_localizer import CONDITIONED, handmade, marginal, trace

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(label, limit=None):
    start = time.perf_counter()
    status, detail = "FAIL", ""
    notes = []
    try:
        yield notes
        elapsed = time.perf_counter() - start
        if limit is not None and elapsed >= limit:
            detail = f"too slow: {elapsed:.2f}s >= {limit}s"
            raise AssertionError(detail)
        status, detail = "PASS", "; ".join(notes + [f"{elapsed:.2f}s"])
    except Exception as exc:
        detail = detail or f"{type(exc).__name__}: {exc}".splitlines()[0][:120]
        raise
    finally:
        line = f"[{status}] {label} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)


def test_ac1_worked_example_structure():
    with criterion("AC1 worked-example structure", limit=1.0):
        ast = corpus_program("linecount")
        cfg, _, pdg = analyze(ast)
        stmt = next(s for s in ast.statements() if isinstance(s, While))
        loop = stmt.id
        # (a) two labeled out-edges: T into the body, F to the exit (the loop ends the program)
        out = sorted(cfg.out_edges(loop), key=lambda e: e[2])
        assert [(d, lbl) for _, d, lbl in out] == [(EXIT, "F"), (stmt.body[0].id, "T")]
        # (b) a loop-carried data edge labeled with its variable
        carried = [(s, d, v) for s, d, v in pdg.data_edges if d <= s]
        assert (7, loop, "line") in carried
        # (c) exactly one aux node parenting the loop predicate
        tpdg = transform_pdg(pdg)
        aux_parents = [p for p in tpdg.parents(loop) if p in tpdg.aux_of]
        assert len(aux_parents) == 1 and tpdg.aux_of[aux_parents[0]] == (7, "line")
        # (d) acyclic
        assert tpdg.is_dag()


def test_ac2_learning_correctness():
    with criterion("AC2 learning correctness", limit=10.0):
        for name in CORPUS_NAMES:
            ast = corpus_program(name)
            tpdg = transform_pdg(analyze(ast)[2])
            skel = assign_state_spaces(tpdg, ast)
            traces = [r.trace for r in run_suite(ast, tpdg, corpus_suite(name), 5000)]
            ppdg = learn_params(traces, skel)
            for node, table in ppdg.counts.items():
                for config in table:
                    total = sum(query_prob(ppdg, node, s, config) for s in ppdg.states[node])
                    assert math.isclose(total, 1.0, abs_tol=1e-9), (name, node, config)
            assert oracles.flatten_counts(ppdg) == oracles.recount(traces, skel.parents), name
            reference = json.dumps(ppdg.to_json())
            rng = random.Random(name)
            for _ in range(3):
                shuffled = traces[:]
                rng.shuffle(shuffled)
                assert json.dumps(learn_params(shuffled, skel).to_json()) == reference, name


def test_ac3_rankcp_behaviour():
    with criterion("AC3 RankCP behaviour"):
        table = {1: 1.0, 2: 1.0, 3: 1.0, 4: 1.0, 5: 0.6, 6: 1.0, 7: 1.0, 8: 0.5, 9: 0.66, 10: 0.4, 11: 0.5}
        ranking = order_ranking({n: (p, n, ()) for n, p in table.items()})
        assert ranking.entries[0].node == 10 and ranking.entries[0].lowest_prob == 0.4
        # three hand-traced traces: tie on index, strictly lower later, repeated minimum
        tie = handmade({1: marginal(100), 2: marginal(30), 3: marginal(100), 4: marginal(30), 5: marginal(100)})
        t = trace((1, "POS"), (3, "POS"), (4, "POS"), (1, "POS"), (3, "POS"), (5, "POS"), (2, "POS"))
        assert [(e.node, e.index) for e in rank_cp(t, tie)] == [(4, 3), (2, 7), (1, 1), (3, 2), (5, 6)]
        cond = handmade(CONDITIONED)
        t = trace((1, "TRUE"), (2, "POS"), (1, "FALSE"), (2, "POS"))
        assert [(e.node, e.lowest_prob, e.index) for e in rank_cp(t, cond)] == [(2, 0.2, 4), (1, 0.5, 1)]
        t = trace((1, "TRUE"), (2, "POS"), (1, "FALSE"), (2, "POS"), (1, "FALSE"), (2, "POS"))
        assert [(e.node, e.lowest_prob, e.index) for e in rank_cp(t, cond)] == [(2, 0.2, 4), (1, 0.5, 1)]


SBI_TALLIES = [
    (0, 0), (1, 0), (0, 1), (1, 1), (2, 2), (3, 1), (1, 3), (5, 0), (0, 5), (7, 3),
    (3, 7), (10, 10), (1, 99), (99, 1), (4, 6), (6, 4), (12, 5), (2, 9), (8, 8), (13, 26),
    (25, 0), (0, 25), (17, 3),
]


def _results_for(failed, passed):
    """Executions covering statement 1, plus one passing run that covers only 2."""

    def run(verdict, covered):
        return ExecutionResult("t", (), verdict, None, 0, frozenset(covered), None)

    return [run(Verdict.FAIL, {1})] * failed + [run(Verdict.PASS, {1})] * passed + [run(Verdict.PASS, {2})]


def test_ac4_sbi_formula():
    with criterion("AC4 SBI formula"):
        assert len(SBI_TALLIES) >= 20
        for failed, passed in SBI_TALLIES:
            expected = Fraction(failed, failed + passed) if failed + passed else Fraction(0)
            assert suspiciousness(failed, passed) == expected
            scores = sbi_scores(_results_for(failed, passed), [1, 2])
            assert (scores.failed[1], scores.passed[1]) == (failed, passed)
            assert scores.scores[1] == expected


def test_ac5_comparative_trend():
    with criterion("AC5 comparative trend", limit=120.0) as notes:
        report = run_experiment(bundled_config())
        report.check()
        overall = report.overall
        summary = (
            f"killed={overall['killed']} top5 PPDG={overall['ppdg_hits']} SBI={overall['sbi_hits']} "
            f"mean exam PPDG={float(overall['ppdg_mean_exam']):.4f} SBI={float(overall['sbi_mean_exam']):.4f}"
        )
        notes.append(summary)
        assert not report.errors
        assert overall["killed"] >= 30
        assert overall["ppdg_hits"] >= overall["sbi_hits"], summary
        assert overall["ppdg_mean_exam"] <= overall["sbi_mean_exam"], summary


def test_ac6_mutation_hygiene():
    with criterion("AC6 mutation hygiene", limit=30.0):
        for name in CORPUS_NAMES:
            ast, suite = corpus_program(name), corpus_suite(name)
            base = [t.text for t in tokenize(unparse(ast).text)]
            for m in enumerate_mutants(ast):
                assert parse(m.source) == m.ast, m.id
                toks = [t.text for t in tokenize(m.source)]
                assert len(toks) == len(base)
                assert sum(a != b for a, b in zip(base, toks)) == 1, m.id
                cls = classify_mutant(m, suite, step_budget=5000)
                failing = oracles.rerun_failing_ids(m.ast, suite, 5000)
                assert cls.failing == failing, m.id
                expected = (
                    MutantClass.EQUIVALENT_ON_SUITE if not failing
                    else MutantClass.NO_PASSING if len(failing) == len(suite)
                    else MutantClass.KILLED
                )
                assert cls.kind is expected, m.id


def test_ac7_dependence_oracles():
    with criterion("AC7 dependence-analysis oracles") as notes:
        small = [n for n in CORPUS_NAMES if len(build_cfg(corpus_program(n)).nodes) <= 12]
        assert small
        for name in small:
            ast = corpus_program(name)
            cfg = build_cfg(ast)
            pdt = compute_postdominators(cfg)
            assert pdt.ipdom == oracles.postdominators(cfg), name
            assert control_dependences(cfg, pdt) == oracles.control_dependences(cfg), name
            rows = list_statements(ast)
            assert reaching_definitions(cfg, ast) == oracles.reaching_definitions(cfg, rows, 2), name
            assert oracles.reaching_definitions(cfg, rows, 2) == oracles.reaching_definitions(cfg, rows, 3), name
        notes.append(f"programs: {', '.join(small)}")
