"""Command-line front end: ``ppdgfl <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import faultseeder, graphs, localizer
from .experiment import CORPUS_CONFIG, ConfigError, ExperimentConfig, SanityGateError, run_experiment
from .minilang import MiniLangError, list_statements, parse_file
from .ppdg import Ppdg, TraceError, assign_state_spaces, learn_params, read_traces, transform_pdg, write_traces
from .tracer import DEFAULT_STEP_BUDGET, TestSuite, Verdict, run_suite

log = logging.getLogger("ppdgfl")


class CliError(Exception):
    pass


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _build(path, smoothing="off"):
    ast = parse_file(path)
    cfg, pdt, pdg = graphs.analyze(ast)
    tpdg = transform_pdg(pdg)
    return ast, cfg, pdg, tpdg, assign_state_spaces(tpdg, ast, smoothing=smoothing)


def cmd_parse(args) -> int:
    ast = parse_file(args.file)
    print(f"{'id':>4}  {'kind':<6}  {'defines':<10}  uses")
    for info in list_statements(ast):
        kind = info.kind + ("*" if info.is_predicate else "")
        print(f"{info.id:>4}  {kind:<6}  {info.defined or '-':<10}  {','.join(sorted(info.used)) or '-'}")
    print(f"{len(ast)} statements; inputs: {', '.join(ast.inputs) or '-'}")
    return 0


def cmd_graph(args) -> int:
    ast, cfg, pdg, tpdg, ppdg = _build(args.file)
    graph = {"cfg": cfg, "pdg": pdg, "ppdg": tpdg}[args.command]
    if args.json:
        obj = pdg.to_json() if args.command == "pdg" else ppdg.to_json() if args.command == "ppdg" else {
            "nodes": sorted(cfg.nodes), "edges": [list(e) for e in cfg.edges]}
        Path(args.json).write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    _emit(graphs.export_dot(graph, ast, name=f"{ast.name}_{args.command}"), args.dot)
    return 0


def cmd_run(args) -> int:
    ast, _, _, tpdg, _ = _build(args.file)
    results = run_suite(ast, tpdg, TestSuite.load(args.suite), args.step_budget)
    write_traces(args.out, [r.trace for r in results])
    for r in results:
        print(f"{r.test_id}\t{r.verdict.value}\t{r.steps}" + (f"\t{r.fault}" if r.fault else ""))
    return 0


def cmd_train(args) -> int:
    ast, _, _, tpdg, skeleton = _build(args.file, args.smoothing)
    results = run_suite(ast, tpdg, TestSuite.load(args.suite), args.step_budget)
    passing = [r.trace for r in results if r.verdict is Verdict.PASS]
    if not passing:
        raise CliError(
            "no passing executions: PPDG parameters are learned from passing executions only, "
            f"and all {len(results)} test case(s) failed"
        )
    ppdg = learn_params(passing, skeleton)
    ppdg.save(args.out)
    if args.traces:
        write_traces(args.traces, [r.trace for r in results])
    failing = len(results) - len(passing)
    print(f"trained on {len(passing)} passing trace(s); {failing} failing; {ppdg.total_count()} events")
    return 0


def cmd_localize(args) -> int:
    ppdg = Ppdg.load(args.ppdg)
    traces = read_traces(args.trace)
    failing = [t for t in traces if t.failing]
    if not failing:
        raise CliError("trace file holds no failing execution to localize")
    rankings = [(t, localizer.rank_cp(t, ppdg)) for t in failing]
    if args.format == "json":
        body = [{"test": t.test_id, "verdict": t.verdict, "ranking": r.to_json()} for t, r in rankings]
        text = json.dumps(body if len(body) > 1 else body[0], indent=1, ensure_ascii=False) + "\n"
    else:
        text = "".join((f"# test {t.test_id}\n" if len(rankings) > 1 else "") + r.to_csv() for t, r in rankings)
    _emit(text, args.out)
    return 0


def cmd_sbi(args) -> int:
    ast = parse_file(args.file)
    results = run_suite(ast, None, TestSuite.load(args.suite), args.step_budget)
    scores = localizer.sbi_scores(results, range(1, len(ast) + 1))
    _emit(localizer.dumps_json(scores) if args.format == "json" else scores.to_csv(), args.out)
    return 0


def cmd_mutate(args) -> int:
    ast = parse_file(args.file)
    ops = [o.strip().upper() for o in args.ops.split(",") if o.strip()]
    mutants = faultseeder.enumerate_mutants(ast, ops)
    paths = faultseeder.write_manifests(mutants, args.out)
    print(f"{len(paths)} mutant manifest(s) written to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    config = ExperimentConfig.load(args.config or CORPUS_CONFIG)
    out = Path(args.out) if args.out else config.out
    if out is None:
        raise CliError("no output directory: pass --out or set 'out' in the config")
    report = run_experiment(config)
    report.check()
    report.write(out, figures=not args.no_figures)
    total = report.overall
    print(f"mutants={total['mutants']} killed={total['killed']} "
          f"top{report.top_k}: SBI={total['sbi_hits']} PPDG={total['ppdg_hits']}")
    if total["killed"]:
        print(f"mean exam: SBI={float(total['sbi_mean_exam']):.4f} PPDG={float(total['ppdg_mean_exam']):.4f}")
    for err in report.errors:
        print(f"warning: {err['mutant']}: {err['error']}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppdgfl", description="PPDG-based statistical fault localization for MiniLang.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="syntax check and print the statement table")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    for name, what in (("cfg", "control flow graph"), ("pdg", "program dependence graph"),
                       ("ppdg", "transformed (acyclic) PDG skeleton")):
        p = sub.add_parser(name, help=f"build the {what} and export DOT")
        p.add_argument("file")
        p.add_argument("--dot", help="DOT output path (default: stdout)")
        p.add_argument("--json", help="also write the graph as JSON")
        p.set_defaults(func=cmd_graph)

    def suite_args(p):
        p.add_argument("file")
        p.add_argument("--suite", required=True, help="test suite JSON")
        p.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)

    p = sub.add_parser("run", help="execute a suite and write node-state traces (JSON Lines)")
    suite_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("train", help="learn PPDG parameters from the passing executions of a suite")
    suite_args(p)
    p.add_argument("--out", required=True, help="PPDG JSON output")
    p.add_argument("--smoothing", choices=("off", "laplace"), default="off")
    p.add_argument("--traces", help="also write every execution's trace here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("localize", help="rank statements of failing trace(s) with RankCP")
    p.add_argument("ppdg")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("sbi", help="SBI suspiciousness scores")
    suite_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sbi)

    p = sub.add_parser("mutate", help="write single-site mutant manifests")
    p.add_argument("file")
    p.add_argument("--ops", default=",".join(faultseeder.OPERATORS))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("experiment", help="run the SBI-vs-PPDG comparison")
    p.add_argument("--config", help="TOML or JSON config (default: bundled corpus)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, MiniLangError, ConfigError, SanityGateError, TraceError, OSError, ValueError, KeyError) as exc:
        print(f"ppdgfl {args.command}: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, CliError) else 1


if __name__ == "__main__":
    sys.exit(main())
