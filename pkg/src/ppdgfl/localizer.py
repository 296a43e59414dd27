"""Statement ranking: RankCP over a failing node-state trace, and the SBI baseline."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from .ppdg import NodeStateTrace, Ppdg, query_prob, validate_trace, walk_configurations


class RankEntry(NamedTuple):
    node: int
    lowest_prob: float
    index: int  # 1-based position in the trace where the minimum was first reached
    configuration: tuple  # ((node, state), (parent, state), ...)


@dataclass(frozen=True)
class Ranking:
    entries: tuple

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def nodes(self) -> list:
        return [e.node for e in self.entries]

    def to_json(self) -> list:
        return [
            {
                "rank": i,
                "node": e.node,
                "prob": e.lowest_prob,
                "index": e.index,
                "configuration": {str(n): s for n, s in e.configuration},
            }
            for i, e in enumerate(self.entries, start=1)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "node", "prob", "index", "configuration"])
        for i, e in enumerate(self.entries, start=1):
            config = ";".join(f"{n}={s}" for n, s in e.configuration)
            writer.writerow([i, e.node, repr(e.lowest_prob), e.index, config])
        return buf.getvalue()


def order_ranking(lowest: Mapping[int, tuple]) -> Ranking:
    """Sort ``node -> (lowest_prob, index, configuration)`` ascending by probability, then index."""
    entries = [RankEntry(node, prob, index, tuple(config)) for node, (prob, index, config) in lowest.items()]
    entries.sort(key=lambda e: (e.lowest_prob, e.index))
    return Ranking(tuple(entries))


def rank_cp(trace: NodeStateTrace, ppdg: Ppdg) -> Ranking:
    """Rank the nodes of one failing execution by their least likely observed state.

    Each node keeps the first trace position at which its conditional
    probability reached its minimum (strictly-lower updates only).
    """
    validate_trace(trace, ppdg)
    lowest: dict = {}
    seen: dict = {}
    for j, node, state, config in walk_configurations(trace, ppdg):
        key = (node, state, config)
        prob = seen.get(key)
        if prob is None:
            prob = seen[key] = query_prob(ppdg, node, state, config)
        if node not in lowest or prob < lowest[node][0]:
            configuration = ((node, state),) + tuple(zip(ppdg.parents[node], config))
            lowest[node] = (prob, j, configuration)
    return order_ranking(lowest)


# --------------------------------------------------------------------------
# SBI
# --------------------------------------------------------------------------


def suspiciousness(failed: int, passed: int) -> Fraction:
    """failed / (passed + failed), with the uncovered 0/0 case defined as 0."""
    total = failed + passed
    return Fraction(failed, total) if total else Fraction(0)


@dataclass(frozen=True)
class SbiScores:
    scores: dict  # statement -> Fraction
    failed: dict
    passed: dict

    def ordered(self) -> list:
        """Statements most suspicious first; ties broken by ascending statement id."""
        return sorted(self.scores, key=lambda s: (-self.scores[s], s))

    def to_json(self) -> list:
        return [
            {
                "rank": i,
                "node": s,
                "score": float(self.scores[s]),
                "exact": str(self.scores[s]),
                "failed": self.failed[s],
                "passed": self.passed[s],
            }
            for i, s in enumerate(self.ordered(), start=1)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "node", "score", "failed", "passed"])
        for i, s in enumerate(self.ordered(), start=1):
            writer.writerow([i, s, str(self.scores[s]), self.failed[s], self.passed[s]])
        return buf.getvalue()


def sbi_scores(results: Iterable, statements: Optional[Iterable[int]] = None) -> SbiScores:
    """Per-statement SBI suspiciousness from execution results.

    ``CRASH`` counts as failing.  ``statements`` lists every statement id so
    that never-covered statements receive a score of 0.
    """
    results = list(results)
    if not results:
        raise ValueError("SBI needs at least one execution result")
    stmts = set(statements or ())
    for r in results:
        stmts |= set(r.covered)
    failed = {s: 0 for s in stmts}
    passed = {s: 0 for s in stmts}
    for r in results:
        tally = failed if r.verdict.failing else passed
        for s in r.covered:
            tally[s] += 1
    scores = {s: suspiciousness(failed[s], passed[s]) for s in sorted(stmts)}
    return SbiScores(scores, failed, passed)


# --------------------------------------------------------------------------
# Rank metrics
# --------------------------------------------------------------------------


class RankMetrics(NamedTuple):
    rank: int
    exam: Fraction


def rank_metrics(ranked: Union[Ranking, SbiScores], faulty: int, total: int) -> RankMetrics:
    """1-based rank of the faulty statement and its exam score (rank / total).

    Only statement nodes (ids 1..total) count toward the rank; auxiliary and
    ENTRY nodes are skipped.  A statement missing from the ranking gets the
    sentinel rank ``total + 1``.
    """
    order = ranked.ordered() if isinstance(ranked, SbiScores) else ranked.nodes()
    order = [n for n in order if 1 <= n <= total]
    rank = order.index(faulty) + 1 if faulty in order else total + 1
    return RankMetrics(rank, Fraction(rank, total))


def best_rank(rankings: Iterable[Ranking], faulty: int, total: int) -> RankMetrics:
    """Minimum rank over several failing executions, each ranked on its own."""
    metrics = [rank_metrics(r, faulty, total) for r in rankings]
    if not metrics:
        return RankMetrics(total + 1, Fraction(total + 1, total))
    return min(metrics)


def dumps_json(obj) -> str:
    return json.dumps(obj.to_json(), indent=1, ensure_ascii=False) + "\n"
