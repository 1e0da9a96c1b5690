"""Lexical-exposure control toolkit for COGS-format datasets.

Transforms compositional-generalization datasets so that context-controlled
lexical items are guaranteed novel to a pretrained model (sampled character
sequences or sentinel tokens), verifies candidate replacements against a
pretraining corpus, generates the Test-Lex diagnostic split, and scores
model predictions with exact match plus the associated diagnostics.
"""

__version__ = "0.1.0"

from .cogs import (  # noqa: F401
    Atom,
    BoundName,
    Example,
    LogicalForm,
    ProperName,
    SplitFile,
    Variable,
    load_split,
    parse_lf,
    parse_split_file,
    print_lf,
    save_split,
    serialize_split_file,
)
from .errors import (  # noqa: F401
    ConsistencyError,
    EvalError,
    FormatError,
    LexControlError,
    LFParseError,
    PlanError,
    ScanError,
)
from .evaluate import (  # noqa: F401
    EvalReport,
    PredictionFile,
    SplitEval,
    aggregate_seeds,
    evaluate_split,
    exact_match,
    overestimation,
    pearson,
    spearman,
    test_lex_gap,
)
from .lexicon import (  # noqa: F401
    ControlledItem,
    ExposureProfile,
    infer_controlled_items,
    load_controlled_items,
)
from .sampler import SamplerConfig, sample_sequences  # noqa: F401
from .scan import ScanReport, filter_absent, scan_corpus  # noqa: F401
from .testlex import TestLexConfig, generate_test_lex, validate_test_lex  # noqa: F401
from .transform import (  # noqa: F401
    SubstitutionPlan,
    VocabularyManifest,
    apply_plan,
    build_plan,
    emit_manifest,
    invert_plan,
)
