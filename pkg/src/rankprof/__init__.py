"""Finite-horizon first-order rank profiles for regular languages.

The library answers, at desk scale, "how much quantifier nesting does a
first-order sentence over positions and letters need to classify this
language on all words up to length n?" - exactly, with certified upper and
lower bounds, and with the bounded-versus-logarithmic dichotomy decided from
the syntactic monoid.
"""

from .budget import Budget, default_budget
from .errors import (
    AlphabetMismatchError,
    BudgetExceededError,
    CapExceededError,
    HorizonTooLargeError,
    NoCycleWitnessError,
    NotDisjointError,
    RankprofError,
    RegexSyntaxError,
    UnboundVariableError,
)
from .words import Alphabet, Word, ball_size, concat, enumerate_ball, power
from .formulas import (
    And,
    Assignment,
    Bottom,
    Equal,
    Exists,
    ForAll,
    Formula,
    HasLetter,
    Less,
    Not,
    Or,
    Top,
    distance_formula,
    evaluate,
    exact_word_formula,
    free_variables,
    horizon_classifier,
    length_formula,
    parse_sexpr,
    quantifier_rank,
    satisfies,
    satisfying_assignments,
    to_sexpr,
    tree_size,
)
from .eftypes import (
    RankType,
    block_power_shortcut,
    equivalent,
    game_equivalent,
    rank_distance,
    rank_type,
)
from .automata import (
    CycleWitness,
    Dfa,
    EventualCycle,
    FiniteMonoid,
    complement,
    cycle_lower_bound,
    cycle_witnesses,
    dfa_from_json,
    dfa_to_json,
    extract_cycle_witness,
    is_aperiodic,
    load_dfa,
    membership,
    minimize,
    parse_regex,
    save_dfa,
    transition_monoid,
    verify_cycle_witness,
)
from .profiles import (
    DefectPair,
    DefectSet,
    LanguageHandle,
    ProfileReport,
    ProfileRow,
    SeparatorReport,
    builtin_language,
    classify,
    defect_set,
    even_length_unary,
    exact_rank,
    exact_rank_via_defects,
    finite_language,
    language_from_spec,
    min_global_rank,
    modular_unary,
    separator_rank,
    separator_report,
    threshold_unary,
    universal_upper_bound,
)

__version__ = "0.1.0"
