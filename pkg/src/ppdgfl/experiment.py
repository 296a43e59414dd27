"""SBI-vs-PPDG comparison over mutation-seeded faults."""

from __future__ import annotations

import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .faultseeder import OPERATORS, MutantClass, Mutant, classify_results, enumerate_mutants
from .graphs import analyze
from .localizer import best_rank, rank_cp, rank_metrics, sbi_scores
from .minilang import Ast, parse_file
from .ppdg import assign_state_spaces, learn_params, transform_pdg
from .tracer import DEFAULT_STEP_BUDGET, TestSuite, Verdict, run_suite

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).parent / "corpus"
CORPUS_CONFIG = CORPUS_DIR / "corpus.toml"


class ConfigError(ValueError):
    pass


class SanityGateError(RuntimeError):
    """An unmutated program does not pass its own suite."""


@dataclass
class ProgramSpec:
    path: Path
    suite: Path

    @property
    def name(self) -> str:
        return self.path.stem


@dataclass
class ExperimentConfig:
    programs: list
    operators: tuple = OPERATORS
    top_k: int = 5
    smoothing: str = "off"
    step_budget: int = DEFAULT_STEP_BUDGET
    seed: int = 0  # reserved; every stage is deterministic
    out: Optional[Path] = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError("topK must be >= 1")
        if self.smoothing not in ("off", "laplace"):
            raise ConfigError(f"smoothing must be 'off' or 'laplace', got {self.smoothing!r}")
        bad = set(self.operators) - set(OPERATORS)
        if bad:
            raise ConfigError(f"unknown operators: {', '.join(sorted(bad))}")
        for p in self.programs:
            if p.suite is None:
                raise ConfigError(f"program {p.path} has no suite")

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".toml":
            raw = tomllib.loads(text)
        else:
            raw = json.loads(text)
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path = Path(".")) -> "ExperimentConfig":
        programs = []
        for entry in raw.get("programs", []):
            if isinstance(entry, str):
                entry = {"path": entry}
            prog = base / entry["path"]
            suite = entry.get("suite")
            suite = base / suite if suite else prog.with_suffix(".suite.json")
            if not suite.exists():
                raise ConfigError(f"program {prog} has no suite ({suite} not found)")
            programs.append(ProgramSpec(prog, suite))
        ops = raw.get("operators", list(OPERATORS))
        if isinstance(ops, str):
            ops = [o.strip() for o in ops.split(",") if o.strip()]
        out = raw.get("out")
        return cls(
            programs=programs,
            operators=tuple(ops),
            top_k=int(raw.get("topK", 5)),
            smoothing=raw.get("smoothing", "off"),
            step_budget=int(raw.get("stepBudget", DEFAULT_STEP_BUDGET)),
            seed=int(raw.get("seed", 0)),
            out=base / out if out else None,
        )


# --------------------------------------------------------------------------
# Report
# --------------------------------------------------------------------------

ROW_FIELDS = (
    "program", "mutant", "operator", "stmt", "position", "original", "replacement", "class",
    "passing", "failing", "total_stmts", "ppdg_rank", "sbi_rank", "ppdg_exam", "sbi_exam",
    "ppdg_hit", "sbi_hit",
)

AGG_FIELDS = (
    "program", "mutants", "killed", "equivalent", "no_passing", "ppdg_hits", "sbi_hits",
    "ppdg_mean_exam", "sbi_mean_exam",
)


@dataclass
class ExperimentReport:
    rows: list
    top_k: int
    aggregates: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def __post_init__(self):
        if not self.aggregates:
            self.aggregates = aggregate_rows(self.rows)

    @property
    def overall(self) -> dict:
        return self.aggregates[-1]

    def check(self) -> None:
        """Aggregates must recompute from the detail rows."""
        if aggregate_rows(self.rows) != self.aggregates:
            raise AssertionError("report aggregates do not match detail rows")

    def to_json(self) -> dict:
        return {
            "topK": self.top_k,
            "rows": [_jsonable(r) for r in self.rows],
            "aggregates": [_jsonable(a) for a in self.aggregates],
            "errors": self.errors,
        }

    def write(self, out_dir, figures: bool = True) -> list:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        detail = out / "report.json"
        detail.write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")
        written.append(detail)
        for name, fields, rows in (("summary.csv", AGG_FIELDS, self.aggregates), ("details.csv", ROW_FIELDS, self.rows)):
            path = out / name
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: _cell(row[k]) for k in fields})
            written.append(path)
        if figures:
            from .plotting import render_report_figures

            written.extend(render_report_figures(self, out / "figures"))
        return written


def _cell(value):
    if isinstance(value, Fraction):
        return f"{float(value):.6f}"
    if value is None:
        return ""
    return value


def _jsonable(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, Fraction):
            out[k] = float(v)
            out[k + "_exact"] = str(v)
        else:
            out[k] = v
    return out


def _mean(values: list) -> Optional[Fraction]:
    return sum(values, Fraction(0)) / len(values) if values else None


def aggregate_rows(rows: list) -> list:
    """Per-program aggregates (sorted by program) followed by an ``ALL`` row."""

    def agg(name, group):
        killed = [r for r in group if r["class"] == MutantClass.KILLED.value]
        return {
            "program": name,
            "mutants": len(group),
            "killed": len(killed),
            "equivalent": sum(r["class"] == MutantClass.EQUIVALENT_ON_SUITE.value for r in group),
            "no_passing": sum(r["class"] == MutantClass.NO_PASSING.value for r in group),
            "ppdg_hits": sum(bool(r["ppdg_hit"]) for r in killed),
            "sbi_hits": sum(bool(r["sbi_hit"]) for r in killed),
            "ppdg_mean_exam": _mean([r["ppdg_exam"] for r in killed]),
            "sbi_mean_exam": _mean([r["sbi_exam"] for r in killed]),
        }

    programs = sorted({r["program"] for r in rows})
    result = [agg(p, [r for r in rows if r["program"] == p]) for p in programs]
    result.append(agg("ALL", rows))
    return result


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------


def _pipeline(ast: Ast, smoothing: str):
    _, _, pdg = analyze(ast)
    tpdg = transform_pdg(pdg)
    return tpdg, assign_state_spaces(tpdg, ast, smoothing=smoothing)


def evaluate_mutant(mutant: Mutant, suite: TestSuite, total: int, top_k: int = 5,
                    smoothing: str = "off", step_budget: int = DEFAULT_STEP_BUDGET) -> dict:
    """Classify one mutant and, when killed, rank its faulty statement with both techniques."""
    tpdg, skeleton = _pipeline(mutant.ast, smoothing)
    results = run_suite(mutant.ast, tpdg, suite, step_budget)
    cls = classify_results(results)
    row = {
        "program": mutant.base,
        "mutant": mutant.id,
        "operator": mutant.operator,
        "stmt": mutant.stmt,
        "position": mutant.position,
        "original": mutant.original,
        "replacement": mutant.replacement,
        "class": cls.kind.value,
        "passing": len(cls.passing),
        "failing": len(cls.failing),
        "total_stmts": total,
        "ppdg_rank": None,
        "sbi_rank": None,
        "ppdg_exam": None,
        "sbi_exam": None,
        "ppdg_hit": None,
        "sbi_hit": None,
    }
    if cls.kind is not MutantClass.KILLED:
        return row
    ppdg = learn_params([r.trace for r in results if r.verdict is Verdict.PASS], skeleton)
    rankings = [rank_cp(r.trace, ppdg) for r in results if r.verdict.failing]
    ppdg_metrics = best_rank(rankings, mutant.stmt, total)
    sbi_metrics = rank_metrics(sbi_scores(results, range(1, total + 1)), mutant.stmt, total)
    row.update(
        ppdg_rank=ppdg_metrics.rank,
        sbi_rank=sbi_metrics.rank,
        ppdg_exam=ppdg_metrics.exam,
        sbi_exam=sbi_metrics.exam,
        ppdg_hit=ppdg_metrics.rank <= top_k,
        sbi_hit=sbi_metrics.rank <= top_k,
    )
    return row


def sanity_gate(ast: Ast, suite: TestSuite, step_budget: int = DEFAULT_STEP_BUDGET) -> None:
    bad = [r.test_id for r in run_suite(ast, None, suite, step_budget) if r.verdict is not Verdict.PASS]
    if bad:
        raise SanityGateError(f"{ast.name}: unmutated program fails test(s) {', '.join(bad)}")


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    rows, errors = [], []
    for spec in sorted(config.programs, key=lambda p: (p.name, str(p.path))):
        ast = parse_file(spec.path)
        suite = TestSuite.load(spec.suite)
        sanity_gate(ast, suite, config.step_budget)
        total = len(ast)
        mutants = enumerate_mutants(ast, config.operators)
        log.info("%s: %d mutants", ast.name, len(mutants))
        for mutant in mutants:
            try:
                rows.append(evaluate_mutant(mutant, suite, total, config.top_k, config.smoothing, config.step_budget))
            except Exception as exc:  # isolate per-mutant failures
                log.warning("mutant %s failed: %s", mutant.id, exc)
                errors.append({"mutant": mutant.id, "error": f"{type(exc).__name__}: {exc}"})
    return ExperimentReport(rows, config.top_k, errors=errors)


def bundled_config(**overrides) -> ExperimentConfig:
    config = ExperimentConfig.load(CORPUS_CONFIG)
    for key, value in overrides.items():
        setattr(config, key, value)
    return config
