"""Control flow graphs, postdominators, dependences and the program dependence graph.

Node ids are integers: statements use their pre-order id, ``ENTRY`` is 0 and
``EXIT`` is -1.  Auxiliary nodes added later by the PPDG transformation are
numbered after the last statement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .minilang import Ast, If, While, list_statements, stmt_kind

ENTRY = 0
EXIT = -1


def node_name(node: int) -> str:
    if node == ENTRY:
        return "ENTRY"
    if node == EXIT:
        return "EXIT"
    return str(node)


@dataclass(frozen=True)
class Cfg:
    nodes: frozenset
    edges: tuple  # (src, dst, label) with label in {"T", "F", None}
    predicates: frozenset = frozenset()

    def successors(self, node: int) -> list:
        return [dst for src, dst, _ in self.edges if src == node]

    def predecessors(self, node: int) -> list:
        return [src for src, dst, _ in self.edges if dst == node]

    def out_edges(self, node: int) -> list:
        return [e for e in self.edges if e[0] == node]

    def succ_map(self) -> dict:
        succ = {n: [] for n in self.nodes}
        for src, dst, _ in self.edges:
            succ[src].append(dst)
        return succ

    def pred_map(self) -> dict:
        pred = {n: [] for n in self.nodes}
        for src, dst, _ in self.edges:
            pred[dst].append(src)
        return pred


def build_cfg(ast: Ast) -> Cfg:
    """Statement-level CFG.  Predicates get one ``T`` and one ``F`` out-edge."""
    edges = []
    predicates = set()

    def link(pending, target):
        for src, label in pending:
            edges.append((src, target, label))

    def block(stmts, pending):
        # pending: dangling (src, label) edges waiting for the next node
        for stmt in stmts:
            link(pending, stmt.id)
            if isinstance(stmt, While):
                predicates.add(stmt.id)
                body_exits = block(stmt.body, [(stmt.id, "T")])
                link(body_exits, stmt.id)
                pending = [(stmt.id, "F")]
            elif isinstance(stmt, If):
                predicates.add(stmt.id)
                then_exits = block(stmt.then, [(stmt.id, "T")])
                else_exits = block(stmt.orelse, [(stmt.id, "F")])
                pending = then_exits + else_exits
            else:
                pending = [(stmt.id, None)]
        return pending

    link(block(ast.body, [(ENTRY, None)]), EXIT)
    nodes = frozenset({ENTRY, EXIT} | {s.id for s in ast.statements()})
    return Cfg(nodes, tuple(edges), frozenset(predicates))


# --------------------------------------------------------------------------
# Postdominators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PostDomTree:
    ipdom: dict  # node -> immediate postdominator (EXIT has no entry)

    def postdominators(self, node: int) -> list:
        """``node`` followed by its strict postdominators, nearest first."""
        chain = [node]
        while chain[-1] in self.ipdom:
            chain.append(self.ipdom[chain[-1]])
        return chain


def compute_postdominators(cfg: Cfg) -> PostDomTree:
    """Iterative set-based postdominator computation over the reverse CFG."""
    succ = cfg.succ_map()
    nodes = sorted(cfg.nodes)
    pdom = {n: set(cfg.nodes) for n in nodes}
    pdom[EXIT] = {EXIT}
    changed = True
    while changed:
        changed = False
        for n in nodes:
            if n == EXIT:
                continue
            new = set.intersection(*(pdom[s] for s in succ[n])) | {n}
            if new != pdom[n]:
                pdom[n] = new
                changed = True
    ipdom = {}
    for n in nodes:
        if n == EXIT:
            continue
        strict = pdom[n] - {n}
        # strict postdominators form a chain; the nearest has the largest set
        ipdom[n] = max(strict, key=lambda d: len(pdom[d]))
    return PostDomTree(ipdom)


def control_dependences(cfg: Cfg, pdt: PostDomTree) -> set:
    """(controller, dependent, label) triples; uncontrolled nodes hang off ENTRY with ``T``."""
    deps = set()
    for src, dst, label in cfg.edges:
        if label is None:
            continue
        stop = pdt.ipdom[src]
        node = dst
        while node != stop and node != EXIT:
            deps.add((src, node, label))
            node = pdt.ipdom[node]
    controlled = {d for _, d, _ in deps}
    for n in cfg.nodes:
        if n not in (ENTRY, EXIT) and n not in controlled:
            deps.add((ENTRY, n, "T"))
    return deps


# --------------------------------------------------------------------------
# Reaching definitions
# --------------------------------------------------------------------------


def _defs_and_uses(ast: Ast):
    defs, uses = {}, {}
    for info in list_statements(ast):
        if info.defined is not None:
            defs[info.id] = info.defined
        uses[info.id] = info.used
    return defs, uses


def reaching_in(cfg: Cfg, defs: dict) -> dict:
    """Worklist solver: node -> set of (def node, variable) reaching its entry."""
    pred = cfg.pred_map()
    succ = cfg.succ_map()
    gen = {n: ({(n, defs[n])} if n in defs else set()) for n in cfg.nodes}
    out = {n: set() for n in cfg.nodes}
    in_ = {n: set() for n in cfg.nodes}
    work = sorted(cfg.nodes)
    while work:
        n = work.pop(0)
        in_[n] = set().union(*(out[p] for p in pred[n])) if pred[n] else set()
        if n in defs:
            new_out = gen[n] | {(d, v) for d, v in in_[n] if v != defs[n]}
        else:
            new_out = set(in_[n])
        if new_out != out[n]:
            out[n] = new_out
            work.extend(s for s in succ[n] if s not in work)
    return in_


def reaching_definitions(cfg: Cfg, ast: Ast) -> set:
    """Def-use pairs (def stmt, use stmt, variable) connected by a definition-clear path.

    Reads of input variables with no reaching statement definition produce no pair.
    """
    defs, uses = _defs_and_uses(ast)
    in_ = reaching_in(cfg, defs)
    pairs = set()
    for n, used in uses.items():
        for d, v in in_[n]:
            if v in used:
                pairs.add((d, n, v))
    return pairs


# --------------------------------------------------------------------------
# PDG
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Pdg:
    nodes: tuple
    control_edges: frozenset  # (src, dst, "T"|"F")
    data_edges: frozenset  # (src, dst, variable)
    kinds: dict = field(default_factory=dict, compare=False)  # node -> statement kind

    def parents(self, node: int) -> set:
        return {s for s, d, _ in self.control_edges | self.data_edges if d == node}

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": n, "kind": self.kinds.get(n, "entry" if n == ENTRY else "stmt")} for n in self.nodes],
            "controlEdges": [list(e) for e in sorted(self.control_edges)],
            "dataEdges": [list(e) for e in sorted(self.data_edges)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Pdg":
        return cls(
            tuple(n["id"] for n in obj["nodes"]),
            frozenset(tuple(e) for e in obj["controlEdges"]),
            frozenset(tuple(e) for e in obj["dataEdges"]),
            {n["id"]: n["kind"] for n in obj["nodes"]},
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def build_pdg(ast: Ast, cfg: Optional[Cfg] = None, cds=None, du_pairs=None) -> Pdg:
    cfg = cfg or build_cfg(ast)
    if cds is None:
        cds = control_dependences(cfg, compute_postdominators(cfg))
    if du_pairs is None:
        du_pairs = reaching_definitions(cfg, ast)
    kinds = {ENTRY: "entry"}
    kinds.update({s.id: stmt_kind(s) for s in ast.statements()})
    nodes = tuple(sorted(kinds))
    return Pdg(nodes, frozenset(cds), frozenset(du_pairs), kinds)


def analyze(ast: Ast) -> tuple:
    """Convenience: (cfg, pdt, pdg) for a program."""
    cfg = build_cfg(ast)
    pdt = compute_postdominators(cfg)
    pdg = build_pdg(ast, cfg, control_dependences(cfg, pdt), reaching_definitions(cfg, ast))
    return cfg, pdt, pdg


# --------------------------------------------------------------------------
# DOT export
# --------------------------------------------------------------------------


def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _stmt_labels(ast: Optional[Ast]) -> dict:
    if ast is None:
        return {}
    from .minilang import _join, _layout

    labels = {}
    for _, toks in _layout(ast)[1]:
        sid = toks[0].stmt if toks else None
        if sid is not None and sid not in labels:
            text = _join([t for t in toks if t.text != "{"])
            labels[sid] = f"{sid}: {text}"
    return labels


def export_dot(graph, ast: Optional[Ast] = None, name: Optional[str] = None) -> str:
    """Deterministic Graphviz text for a :class:`Cfg`, :class:`Pdg` or transformed PDG / PPDG.

    Control edges are solid, data edges dashed, auxiliary nodes drawn as grey diamonds.
    """
    from .ppdg import Ppdg, TransformedPdg

    labels = _stmt_labels(ast)
    lines = [f'digraph "{_esc(name or type(graph).__name__.lower())}" {{', "  node [shape=box];"]

    def node_line(n, extra=""):
        label = labels.get(n, node_name(n))
        lines.append(f'  n{_node_key(n)} [label="{_esc(label)}"{extra}];')

    if isinstance(graph, Cfg):
        for n in sorted(graph.nodes):
            node_line(n, ", shape=ellipse" if n in (ENTRY, EXIT) else "")
        for src, dst, label in sorted(graph.edges, key=lambda e: (e[0], e[1], e[2] or "")):
            attr = f' [label="{label}"]' if label else ""
            lines.append(f"  n{_node_key(src)} -> n{_node_key(dst)}{attr};")
    else:
        if isinstance(graph, Ppdg):
            graph = graph.skeleton
        if isinstance(graph, TransformedPdg):
            aux = graph.aux_of
            for n in graph.nodes:
                if n in aux:
                    src, via = aux[n]
                    lines.append(
                        f'  n{_node_key(n)} [label="{n}: aux({node_name(src)}, {_esc(str(via))})",'
                        " shape=diamond, style=filled, fillcolor=lightgrey];"
                    )
                else:
                    node_line(n, ", shape=ellipse" if n == ENTRY else "")
            for src, dst, kind, label in sorted(graph.edges, key=lambda e: (e[0], e[1], e[2], str(e[3]))):
                style = {"control": "solid", "data": "dashed", "aux": "dotted"}[kind]
                lines.append(
                    f'  n{_node_key(src)} -> n{_node_key(dst)} [label="{_esc(str(label))}", style={style}];'
                )
        else:
            for n in graph.nodes:
                node_line(n, ", shape=ellipse" if n == ENTRY else "")
            for src, dst, label in sorted(graph.control_edges):
                lines.append(f'  n{_node_key(src)} -> n{_node_key(dst)} [label="{label}", style=solid];')
            for src, dst, var in sorted(graph.data_edges):
                lines.append(f'  n{_node_key(src)} -> n{_node_key(dst)} [label="{_esc(var)}", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _node_key(n: int) -> str:
    return "EXIT" if n == EXIT else str(n)


def stmt_nodes(ast: Ast) -> list:
    return [s.id for s in ast.statements()]


__all__ = [
    "ENTRY",
    "EXIT",
    "Cfg",
    "PostDomTree",
    "Pdg",
    "analyze",
    "build_cfg",
    "build_pdg",
    "compute_postdominators",
    "control_dependences",
    "export_dot",
    "reaching_definitions",
    "node_name",
]
