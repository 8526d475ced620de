"""agreetrack: agreement-state tracking for two-party negotiation dialogues.

The package models a negotiation's evolving *agreement state* (a mapping from
ontology slots to agreed values), encodes per-turn state changes as
Levenshtein belief spans, derives gold states from dialogue-act annotations
with a rule-based tracker, serializes Gen/Clf training prompts for seq2seq
models, and scores predictions with Joint Slot Accuracy and Joint F1.
"""

from .dialogue import (
    ACCEPT,
    ACT_KINDS,
    CANDIDATE,
    EMPLOYER,
    OFFER,
    OTHER,
    REJECT,
    SPEAKERS,
    AliasTable,
    AnnotatedDialogue,
    CorpusError,
    CorpusReport,
    DialogueAct,
    StatsReport,
    Turn,
    Utterance,
    default_aliases,
    dialogue_stats,
    load_builtin_corpus,
    load_corpus,
    merge_consecutive,
    other_speaker,
    resolve_alias,
    resolve_slot,
    serialize_corpus,
)
from .lev import (
    DOMAINS,
    LEV_GRAMMAR_VERSION,
    EditOp,
    LevParseError,
    LevParseReport,
    LevSpan,
    apply_span,
    diff,
    parse,
    parse_report,
    parse_state,
    render,
    render_state,
)
from .metrics import (
    AlignmentError,
    EvalResult,
    TurnScore,
    aggregate_folds,
    evaluate,
    load_predictions,
    micro_f1,
    score_turn,
)
from .ontology import GPT_NEGOCHAT, Ontology, OntologyError, builtin_ontology, canonicalize, load_ontology
from .prompts import (
    CLF,
    CLF_PREFIX,
    GEN,
    GEN_PREFIX,
    PromptExample,
    build_clf_example,
    build_gen_example,
    emit_dataset,
    iter_examples,
    sample_negative,
)
from .splits import FoldSplit, fold_splits, fractional_subsets, shuffled_ids
from .tracker import (
    PendingOffer,
    Provenance,
    TrackerRun,
    TrackerState,
    step,
    track_dialogue,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # ontology
    "Ontology", "OntologyError", "canonicalize", "load_ontology", "builtin_ontology", "GPT_NEGOCHAT",
    # lev codec
    "EditOp", "LevSpan", "LevParseError", "LevParseReport", "diff", "apply_span",
    "render", "parse", "parse_report", "render_state", "parse_state",
    "DOMAINS", "LEV_GRAMMAR_VERSION",
    # dialogue model
    "EMPLOYER", "CANDIDATE", "SPEAKERS", "OFFER", "ACCEPT", "REJECT", "OTHER", "ACT_KINDS",
    "CorpusError", "Utterance", "DialogueAct", "Turn", "AnnotatedDialogue",
    "AliasTable", "CorpusReport", "StatsReport", "other_speaker", "merge_consecutive",
    "default_aliases", "resolve_slot", "resolve_alias",
    "load_corpus", "serialize_corpus", "load_builtin_corpus", "dialogue_stats",
    # tracker
    "PendingOffer", "Provenance", "TrackerState", "TrackerRun", "step", "track_dialogue",
    # prompts
    "GEN", "CLF", "GEN_PREFIX", "CLF_PREFIX", "PromptExample",
    "build_gen_example", "build_clf_example", "sample_negative", "iter_examples", "emit_dataset",
    # metrics
    "TurnScore", "EvalResult", "AlignmentError", "score_turn", "evaluate",
    "micro_f1", "load_predictions", "aggregate_folds",
    # splits
    "FoldSplit", "fold_splits", "fractional_subsets", "shuffled_ids",
]
