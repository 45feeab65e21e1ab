"""Expert-signal providers: per-video artifact bundles and leaf scorers."""
from .bundle import (
    FORMAT_VERSION,
    ExpertBundle,
    OcrFrameText,
    OvdSource,
    ScoreTable,
    TranscriptSegment,
    bundle_digest,
    bundle_from_obj,
    bundle_to_obj,
    dumps_bundle,
    dumps_ovd,
    load_bundle,
    load_ovd_source,
    loads_bundle,
    ovd_from_obj,
    ovd_to_obj,
    save_bundle,
    save_ovd_source,
)
from .matching import (
    FUZZY_THRESHOLD,
    levenshtein,
    match_score,
    similarity,
    windowed_match_score,
)
from .scoring import (
    ProviderCounters,
    evaluate_leaves,
    query_variants,
    score_asr_leaf,
    score_embedding_leaf,
    score_ocr_leaf,
    score_ovd_leaf,
)

__all__ = [
    "FORMAT_VERSION",
    "FUZZY_THRESHOLD",
    "ExpertBundle",
    "OcrFrameText",
    "OvdSource",
    "ProviderCounters",
    "ScoreTable",
    "TranscriptSegment",
    "bundle_digest",
    "bundle_from_obj",
    "bundle_to_obj",
    "dumps_bundle",
    "dumps_ovd",
    "evaluate_leaves",
    "levenshtein",
    "load_bundle",
    "load_ovd_source",
    "loads_bundle",
    "match_score",
    "ovd_from_obj",
    "ovd_to_obj",
    "query_variants",
    "save_bundle",
    "save_ovd_source",
    "score_asr_leaf",
    "score_embedding_leaf",
    "score_ocr_leaf",
    "score_ovd_leaf",
    "similarity",
    "windowed_match_score",
]
