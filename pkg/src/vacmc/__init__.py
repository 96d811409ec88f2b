"""Explicit-state CTL*/CTL/LTL model checking and bisimulation-vacuity detection."""

from .errors import (
    EncodingError,
    EnumerationBoundError,
    EvalError,
    FormulaSyntaxError,
    KripkeError,
    NotApplicableError,
    PreconditionError,
    VacmcError,
)
from .formula import (
    Analysis,
    Polarity,
    analyze,
    count_occurrences,
    formula_size,
    nnf,
    occurrence_polarity,
    parse_formula,
    render_formula,
    substitute,
)
from .kleene import TruthValue3
from .kripke import (
    KripkeStructure,
    UnrollingMap,
    chi,
    compose_sync,
    duplicate_m,
    is_deterministic,
    isomorphic,
    load_fixture,
    parse_kripke,
    remove_prop,
    render_kripke,
    structurally_equal,
    validate_unrolling_map,
    x_variants,
)
from .mc import StateSet, check_ctl_star, eval_states, explain_path
from .bisim import Relation, bisimilar_over, quotient_bisim, simulates_over
from .vacuity import (
    VacuityStatus,
    VacuityVerdict,
    constant_vacuous,
    decide_bisim_vacuity,
    is_fal_vacuous,
    is_mon_vacuous,
    is_sat_vacuous,
    prop_simplify,
    structure_vacuous,
    syntactic_monotone,
)
from .qctl import QEvalResult, eval_bisimulation, eval_structural, eval_tree, pathify, refute_tree_with_witness
from .three_valued import (
    eval_compositional3,
    is_refinement,
    labeling_completions,
    lift_kx,
    thorough_kx,
    vacuity_via_thorough,
)
from .reductions import PropOrdering, decode_single_prop, ez_encode, f_translate_ctl, g_translate_ctl_star

__version__ = "0.1.0"
