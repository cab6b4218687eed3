"""Neural-guided SLD resolution for definite-clause knowledge bases."""

from .curriculum import (
    EducationError,
    EducationReport,
    Stage,
    StageReport,
    educate,
    parse_schedule,
    train_from_traces,
)
from .encoding import (
    EMPTY,
    EncodingConfig,
    EncodingError,
    TruncationWarning,
    complete_and_flatten,
    decode_ranking,
    encode_literal,
    encode_rule_target,
    normalize_variables,
)
from .knowledge import (
    Goal,
    ParseError,
    Rule,
    RuleSet,
    SymbolSet,
    classify_token,
    parse_goal,
    parse_rule_set,
    parse_symbol_set,
    parse_term,
    render_rule_set,
    render_symbol_set,
    render_term,
    symbol_set_covering,
    validate_coverage,
)
from .network import (
    Layer,
    ModelFormatError,
    Network,
    TrainingParams,
    backprop_update,
    cross_entropy,
    forward,
    init_network,
    layer_init,
    load_network,
    loss_and_gradients,
    networks_equal,
    save_network,
    softmax,
)
from .resolver import (
    Exhaustive,
    Guided,
    ProofResult,
    SearchStats,
    StaticOrder,
    TraceRecord,
    proof_to_dict,
    rank_rules,
    read_trace_file,
    replay_trace,
    resolve_step,
    solve,
    write_trace_file,
)
from .terms import (
    Compound,
    Constant,
    FreshCounter,
    Substitution,
    Term,
    Variable,
    apply_substitution,
    compose,
    rename_apart,
    unify,
)

__version__ = "0.1.0"
