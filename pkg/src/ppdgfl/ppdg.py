"""Probabilistic program dependence graph: skeleton transformation, state spaces and CPT learning."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .graphs import ENTRY, Pdg
from .minilang import Ast

TRUE, FALSE = "TRUE", "FALSE"
NEG, ZERO, POS = "NEG", "ZERO", "POS"
RUN = "RUN"
NOT_EXECUTED = "⊥"

PREDICATE_KINDS = ("if", "while")


class TraceError(ValueError):
    """A node-state trace does not conform to the PPDG skeleton."""


# --------------------------------------------------------------------------
# Abstract state policy
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StatePolicy:
    """How concrete values map onto a value node's abstract states."""

    name: str
    value_states: tuple
    predicate_states: tuple = (TRUE, FALSE)

    def abstract_value(self, value: int) -> str:
        raise NotImplementedError

    def abstract_branch(self, taken: bool) -> str:
        return TRUE if taken else FALSE


class SignPolicy(StatePolicy):
    def __init__(self):
        super().__init__("sign", (NEG, ZERO, POS))

    def abstract_value(self, value: int) -> str:
        if value < 0:
            return NEG
        return ZERO if value == 0 else POS


SIGN = SignPolicy()
POLICIES = {"sign": SIGN}


# --------------------------------------------------------------------------
# Transformed PDG
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformedPdg:
    nodes: tuple
    edges: tuple  # (src, dst, provenance, label); provenance in control|data|aux
    aux_of: dict  # aux node -> (shadowed source node, variable or branch label)
    aux_target: dict  # aux node -> node it parents
    kinds: dict = field(default_factory=dict, compare=False)

    def parents(self, node: int) -> tuple:
        return tuple(sorted({s for s, d, _, _ in self.edges if d == node}))

    def is_dag(self) -> bool:
        return topological_order(self.nodes, [(s, d) for s, d, _, _ in self.edges]) is not None

    def statement_nodes(self) -> list:
        return [n for n in self.nodes if n != ENTRY and n not in self.aux_of]

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": n, "kind": self.kinds.get(n, "stmt")} for n in self.nodes],
            "edges": [{"src": s, "dst": d, "kind": k, "label": lbl} for s, d, k, lbl in self.edges],
            "aux": [
                {"id": a, "shadows": self.aux_of[a][0], "via": self.aux_of[a][1], "target": self.aux_target[a]}
                for a in sorted(self.aux_of)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TransformedPdg":
        return cls(
            tuple(n["id"] for n in obj["nodes"]),
            tuple((e["src"], e["dst"], e["kind"], e["label"]) for e in obj["edges"]),
            {a["id"]: (a["shadows"], a["via"]) for a in obj["aux"]},
            {a["id"]: a["target"] for a in obj["aux"]},
            {n["id"]: n["kind"] for n in obj["nodes"]},
        )


def topological_order(nodes: Iterable[int], edges: Iterable[tuple]) -> Optional[list]:
    """Kahn's algorithm; ``None`` when the graph has a cycle."""
    nodes = list(nodes)
    indeg = {n: 0 for n in nodes}
    succ = {n: [] for n in nodes}
    for s, d in edges:
        succ[s].append(d)
        indeg[d] += 1
    ready = sorted(n for n in nodes if indeg[n] == 0)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for d in succ[n]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
        ready.sort()
    return order if len(order) == len(nodes) else None


def _is_back_edge(src: int, dst: int) -> bool:
    # Statement ids are pre-order, so every dependence that is not loop-carried
    # points to a larger id; ENTRY (0) precedes everything.
    return src != ENTRY and dst <= src


def transform_pdg(pdg: Pdg) -> TransformedPdg:
    """Break PDG cycles by rerouting each loop-carried edge through a fresh aux node.

    A loop predicate's self control dependence is only rerouted when the
    predicate has no loop-carried data dependence of its own: the data aux
    node already distinguishes first evaluation (not executed) from
    re-evaluation, and the self-dependence aux would always shadow ``TRUE``.
    """
    kept = []
    broken = []
    data_back_targets = {d for s, d, _ in pdg.data_edges if _is_back_edge(s, d)}
    for s, d, label in sorted(pdg.control_edges):
        if _is_back_edge(s, d):
            if d not in data_back_targets:
                broken.append((s, d, "control", label))
        else:
            kept.append((s, d, "control", label))
    for s, d, var in sorted(pdg.data_edges):
        if _is_back_edge(s, d):
            broken.append((s, d, "data", var))
        else:
            kept.append((s, d, "data", var))

    next_id = max([n for n in pdg.nodes] + [0]) + 1
    aux_of, aux_target = {}, {}
    kinds = dict(pdg.kinds)
    for s, d, _, label in sorted(broken, key=lambda e: (e[1], e[0], e[2], str(e[3]))):
        aux = next_id
        next_id += 1
        aux_of[aux] = (s, label)
        aux_target[aux] = d
        kinds[aux] = "aux"
        kept.append((aux, d, "aux", label))
    nodes = tuple(pdg.nodes) + tuple(sorted(aux_of))
    edges = tuple(sorted(kept, key=lambda e: (e[0], e[1], e[2], str(e[3]))))
    return TransformedPdg(nodes, edges, aux_of, aux_target, kinds)


# --------------------------------------------------------------------------
# PPDG
# --------------------------------------------------------------------------


@dataclass
class Ppdg:
    skeleton: TransformedPdg
    states: dict  # node -> tuple of abstract states
    parents: dict  # node -> tuple of conditioning parents (ENTRY excluded: it is constant)
    counts: dict = field(default_factory=dict)  # node -> {config tuple -> Counter(state)}
    smoothing: str = "off"
    policy: str = "sign"

    def copy_empty(self) -> "Ppdg":
        return Ppdg(self.skeleton, self.states, self.parents, {}, self.smoothing, self.policy)

    def total_count(self) -> int:
        return sum(sum(c.values()) for table in self.counts.values() for c in table.values())

    def config_of(self, node: int, config) -> tuple:
        if isinstance(config, tuple):
            return config
        if isinstance(config, dict):
            return tuple(config.get(p, NOT_EXECUTED) for p in self.parents[node])
        return tuple(config)

    def distribution(self, node: int, config) -> dict:
        return {s: query_prob(self, node, s, config) for s in self.states[node]}

    def to_json(self) -> dict:
        counts = []
        for node in sorted(self.counts):
            for config in sorted(self.counts[node]):
                for state, n in sorted(self.counts[node][config].items()):
                    counts.append({"node": node, "config": list(config), "state": state, "count": n})
        return {
            "skeleton": self.skeleton.to_json(),
            "policy": self.policy,
            "smoothing": self.smoothing,
            "states": {str(n): list(s) for n, s in sorted(self.states.items())},
            "parents": {str(n): list(p) for n, p in sorted(self.parents.items())},
            "counts": counts,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Ppdg":
        counts: dict = {}
        for row in obj["counts"]:
            table = counts.setdefault(row["node"], {})
            table.setdefault(tuple(row["config"]), Counter())[row["state"]] = row["count"]
        return cls(
            TransformedPdg.from_json(obj["skeleton"]),
            {int(n): tuple(s) for n, s in obj["states"].items()},
            {int(n): tuple(p) for n, p in obj["parents"].items()},
            counts,
            obj.get("smoothing", "off"),
            obj.get("policy", "sign"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Ppdg":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def assign_state_spaces(tpdg: TransformedPdg, ast: Optional[Ast] = None, policy: StatePolicy = SIGN,
                        smoothing: str = "off") -> Ppdg:
    if not tpdg.is_dag():
        raise ValueError("transformed PDG must be acyclic")
    if smoothing not in ("off", "laplace"):
        raise ValueError(f"unknown smoothing mode {smoothing!r}")
    kinds = dict(tpdg.kinds)
    if ast is not None:
        from .minilang import stmt_kind

        kinds.update({s.id: stmt_kind(s) for s in ast.statements()})

    def space(n):
        if n == ENTRY:
            return (RUN,)
        if n in tpdg.aux_of:
            return space(tpdg.aux_of[n][0])
        if kinds.get(n) in PREDICATE_KINDS:
            return policy.predicate_states
        return policy.value_states

    states = {n: space(n) for n in tpdg.nodes}
    parents = {n: tuple(p for p in tpdg.parents(n) if p != ENTRY) for n in tpdg.nodes}
    return Ppdg(tpdg, states, parents, {}, smoothing, policy.name)


# --------------------------------------------------------------------------
# Node-state traces
# --------------------------------------------------------------------------


class Event(NamedTuple):
    node: int
    state: str


@dataclass(frozen=True)
class NodeStateTrace:
    events: tuple
    test_id: str = ""
    verdict: str = "PASS"

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def failing(self) -> bool:
        return self.verdict != "PASS"

    def dumps(self) -> str:
        lines = [json.dumps({"test": self.test_id, "verdict": self.verdict})]
        lines.extend(json.dumps({"node": e.node, "state": e.state}, ensure_ascii=False) for e in self.events)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "NodeStateTrace":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not rows or "verdict" not in rows[0]:
            raise TraceError("trace file must start with a header line {test, verdict}")
        header = rows[0]
        events = tuple(Event(int(r["node"]), str(r["state"])) for r in rows[1:])
        return cls(events, str(header.get("test", "")), header["verdict"])


def write_traces(path, traces: Sequence[NodeStateTrace]) -> None:
    Path(path).write_text("".join(t.dumps() for t in traces), encoding="utf-8")


def read_traces(path) -> list:
    """Read one or more concatenated traces; each begins at a header line."""
    traces, chunk = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if '"verdict"' in line and chunk:
            traces.append(NodeStateTrace.loads("\n".join(chunk)))
            chunk = []
        chunk.append(line)
    if chunk:
        traces.append(NodeStateTrace.loads("\n".join(chunk)))
    return traces


def validate_trace(trace: NodeStateTrace, ppdg: Ppdg) -> None:
    for j, (node, state) in enumerate(trace.events, start=1):
        if node not in ppdg.states:
            raise TraceError(f"event {j}: unknown node {node}")
        if state not in ppdg.states[node]:
            raise TraceError(f"event {j}: state {state!r} not in state space of node {node}")


def walk_configurations(trace: NodeStateTrace, ppdg: Ppdg):
    """Yield (index, node, state, parent configuration) with most-recent-state semantics."""
    last: dict = {}
    for j, (node, state) in enumerate(trace.events, start=1):
        config = tuple(last.get(p, NOT_EXECUTED) for p in ppdg.parents[node])
        yield j, node, state, config
        last[node] = state


# --------------------------------------------------------------------------
# Learning and queries
# --------------------------------------------------------------------------


def learn_params(traces: Iterable[NodeStateTrace], skeleton: Ppdg) -> Ppdg:
    """Count node states per parent configuration over (passing) traces.

    Parentless nodes accumulate under the empty configuration, which makes the
    conditional estimate reduce to the marginal frequency.
    """
    traces = list(traces)
    for trace in traces:
        validate_trace(trace, skeleton)
    ppdg = skeleton.copy_empty()
    for trace in traces:
        for _, node, state, config in walk_configurations(trace, ppdg):
            table = ppdg.counts.setdefault(node, {})
            table.setdefault(config, Counter())[state] += 1
    return ppdg


def merge_counts(parts: Iterable[Ppdg]) -> Ppdg:
    """Sum counts of PPDGs learned from disjoint trace batches over one skeleton."""
    parts = list(parts)
    merged = parts[0].copy_empty()
    for part in parts:
        for node, table in part.counts.items():
            for config, counter in table.items():
                merged.counts.setdefault(node, {}).setdefault(config, Counter()).update(counter)
    return merged


def query_prob(ppdg: Ppdg, node: int, state: str, config: Union[Sequence, Mapping] = ()) -> float:
    """p(node = state | parents = config); 0.0 for a configuration never observed."""
    config = ppdg.config_of(node, config)
    counter = ppdg.counts.get(node, {}).get(config)
    n = counter[state] if counter else 0
    total = sum(counter.values()) if counter else 0
    if ppdg.smoothing == "laplace":
        k = len(ppdg.states[node])
        return (n + 1) / (total + k)
    if total == 0:
        return 0.0
    return n / total
