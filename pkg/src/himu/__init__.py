"""Training-free frame selection for long-video question answering.

A question is compiled (elsewhere) into a small logic tree whose leaves
name per-frame evidence channels. This package scores those leaves from
precomputed artifacts, conditions the signals, composes them with fuzzy
temporal operators into one satisfaction curve, and selects a budgeted,
attributable set of frames.
"""
from ._kernels import BACKEND, IMPLEMENTATIONS
from .bench import (
    Event,
    EventScript,
    GeneratedInstance,
    RecallReport,
    ReportEntry,
    generate,
    load_report,
    load_scripts,
    matched_tree_document,
    run_benchmark,
    save_report,
    save_scripts,
)
from .cache import BundleCache, CacheKey, CacheStats
from .compose import (
    AttributionMatrix,
    SatisfactionCurve,
    evaluate,
    op_and,
    op_or,
    op_right_after,
    op_seq,
)
from .config import EngineConfig, config_from_obj, load_config
from .errors import (
    ArityError,
    BenchmarkError,
    BundleFormatError,
    EmptyInputError,
    EmptyQueryError,
    ExpertError,
    HimuError,
    InactiveExpertError,
    InconsistentLengthError,
    InvalidScriptError,
    LeafEvaluationError,
    LengthMismatchError,
    MissingArtifactError,
    MissingBandwidthError,
    MissingLeafSignalError,
    MissingRowError,
    SchemaError,
    SignalError,
    TreeError,
    TreeSyntaxError,
)
from .experts import (
    ExpertBundle,
    OcrFrameText,
    OvdSource,
    ProviderCounters,
    ScoreTable,
    TranscriptSegment,
    bundle_digest,
    evaluate_leaves,
    load_bundle,
    load_ovd_source,
    save_bundle,
    save_ovd_source,
)
from .pipeline import PipelineResult, condition_signals, run_pipeline, select_frames
from .select import (
    PassParams,
    SelectionPhase,
    SelectionResult,
    find_peaks,
    pass_select,
    topk_select,
    uniform_select,
)
from .signals import (
    DEFAULT_BANDWIDTHS,
    NormalizationParams,
    Signal,
    SmoothingParams,
    Stage,
    normalize_joint,
    smooth,
)
from .tree import (
    ExpertKind,
    LogicTree,
    OperatorKind,
    TreeNode,
    leaves_by_expert,
    parse_tree,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "AttributionMatrix",
    "BACKEND",
    "BenchmarkError",
    "BundleCache",
    "BundleFormatError",
    "CacheKey",
    "CacheStats",
    "DEFAULT_BANDWIDTHS",
    "EmptyInputError",
    "EmptyQueryError",
    "EngineConfig",
    "Event",
    "EventScript",
    "ExpertBundle",
    "ExpertError",
    "ExpertKind",
    "GeneratedInstance",
    "HimuError",
    "IMPLEMENTATIONS",
    "InactiveExpertError",
    "InconsistentLengthError",
    "InvalidScriptError",
    "LeafEvaluationError",
    "LengthMismatchError",
    "LogicTree",
    "MissingArtifactError",
    "MissingBandwidthError",
    "MissingLeafSignalError",
    "MissingRowError",
    "NormalizationParams",
    "OcrFrameText",
    "OperatorKind",
    "OvdSource",
    "PassParams",
    "PipelineResult",
    "ProviderCounters",
    "RecallReport",
    "ReportEntry",
    "SatisfactionCurve",
    "SchemaError",
    "ScoreTable",
    "SelectionPhase",
    "SelectionResult",
    "Signal",
    "SignalError",
    "SmoothingParams",
    "Stage",
    "TranscriptSegment",
    "TreeError",
    "TreeNode",
    "TreeSyntaxError",
    "bundle_digest",
    "condition_signals",
    "config_from_obj",
    "evaluate",
    "evaluate_leaves",
    "find_peaks",
    "generate",
    "leaves_by_expert",
    "load_bundle",
    "load_config",
    "load_ovd_source",
    "load_report",
    "load_scripts",
    "matched_tree_document",
    "normalize_joint",
    "op_and",
    "op_or",
    "op_right_after",
    "op_seq",
    "parse_tree",
    "pass_select",
    "run_benchmark",
    "run_pipeline",
    "save_bundle",
    "save_ovd_source",
    "save_report",
    "save_scripts",
    "select_frames",
    "serialize",
    "smooth",
    "topk_select",
    "uniform_select",
]
