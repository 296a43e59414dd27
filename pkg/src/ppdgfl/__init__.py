"""Statistical fault localization with probabilistic program dependence graphs."""

from .faultseeder import Mutant, classify_mutant, enumerate_mutants
from .graphs import Cfg, Pdg, analyze, build_cfg, build_pdg, compute_postdominators, control_dependences, export_dot, reaching_definitions
from .localizer import Ranking, SbiScores, rank_cp, rank_metrics, sbi_scores
from .minilang import Ast, SourceProgram, list_statements, parse, unparse
from .ppdg import NodeStateTrace, Ppdg, TransformedPdg, assign_state_spaces, learn_params, query_prob, transform_pdg
from .tracer import ExecutionResult, TestCase, TestSuite, Verdict, execute, run_suite

__version__ = "0.1.0"
