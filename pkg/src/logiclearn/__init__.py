"""Workbench for learning entailment over normal logic programs.

The package pairs an exact symbolic solver with character-level neural
reasoners: it generates 12 classes of synthetic logic programs, labels them
by SLD resolution with negation by failure, trains an iterative
attention-based reasoner end-to-end on the raw text, and ships the analysis
harness (accuracy tiers, multi-hop and symbol-length sweeps, embedding PCA,
attention maps).
"""

from .lp import (
    Atom,
    Literal,
    ParseError,
    Program,
    QueryLine,
    Rule,
    Term,
    parse_program,
    parse_query_line,
    render,
)
from .solver import (
    DepthExceeded,
    FloundersError,
    NotStratified,
    SolverLimits,
    apply_subst,
    entails,
    fixpoint_model,
    solve_literal,
    unify,
)
from .taskgen import (
    DifficultyTier,
    GenConfig,
    Sample,
    TIERS,
    generate_dataset,
    generate_sample,
    generate_samples,
    generate_sweep_programs,
    load_dataset,
    tier_config,
)

__version__ = "0.1.0"
