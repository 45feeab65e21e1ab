"""Leaf scoring: turn (expert, query) predicates into raw per-frame signals.

Embedding-style experts read score-table rows from the per-video bundle.
Object detection is query-conditioned: its scores come from a separate
per-query source and are recomputed on every evaluation instead of being
cached. Transcript and on-screen-text scoring run the text matchers and map
results onto the frame timeline.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    LeafEvaluationError,
    MissingArtifactError,
    MissingRowError,
)
from ..signals import Signal, Stage
from ..tree import ExpertKind, LogicTree
from .bundle import ExpertBundle, OvdSource, ScoreTable, OcrFrameText, TranscriptSegment
from .matching import match_score, windowed_match_score


def query_variants(query: str) -> tuple[str, ...]:
    """Deterministic detection-query variants: as-is, naive plural, head noun.

    The head-noun variant drops leading modifiers by keeping the final
    whitespace token, so "red sports car" also matches rows for "car".
    """
    base = " ".join(query.split())
    variants = [base, base + "s"]
    words = base.split()
    if len(words) > 1:
        variants.append(words[-1])
    seen: set[str] = set()
    unique = []
    for v in variants:
        key = v.casefold()
        if key not in seen:
            seen.add(key)
            unique.append(v)
    return tuple(unique)


def score_embedding_leaf(bundle: ExpertBundle, expert: ExpertKind, query: str) -> Signal:
    """Raw signal for a CLIP or CLAP leaf from the bundle's score table."""
    if expert is ExpertKind.CLIP:
        table: ScoreTable | None = bundle.clip_table
    elif expert is ExpertKind.CLAP:
        table = bundle.clap_table
    else:
        raise ValueError(f"{expert} is not an embedding-scored expert")
    if table is None:
        raise MissingArtifactError(
            f"bundle {bundle.video_id!r} has no {expert.value} score table"
        )
    values = table.lookup(query)
    if values is None:
        raise MissingRowError(
            f"{expert.value} table for {bundle.video_id!r} has no row for {query!r}"
        )
    return Signal(values=values, stage=Stage.RAW)


def score_ovd_leaf(source: OvdSource | None, query: str, num_frames: int) -> Signal:
    """Raw detection signal: per-frame max confidence over query variants.

    A missing source or unmatched query yields zeros; detection absence is
    a legitimate score of 0, not an error.
    """
    if source is None:
        values = np.zeros(num_frames, dtype=np.float64)
    else:
        values = source.max_over(query_variants(query), num_frames)
    return Signal(values=values, stage=Stage.RAW)


def score_asr_leaf(
    transcript: tuple[TranscriptSegment, ...],
    query: str,
    num_frames: int,
    frame_rate: float,
) -> Signal:
    """Raw speech signal: segment match scores spread over overlapped frames.

    Each segment scores via windowed text matching, then frame t (covering
    [t/fps, (t+1)/fps)) receives max over segments of segment score times
    the fraction of the frame interval the segment overlaps.
    """
    values = np.zeros(num_frames, dtype=np.float64)
    for seg in transcript:
        score = windowed_match_score(query, seg.text)
        if score <= 0.0:
            continue
        first = max(0, int(np.floor(seg.start * frame_rate)))
        last = min(num_frames - 1, int(np.ceil(seg.end * frame_rate)))
        for t in range(first, last + 1):
            frame_start = t / frame_rate
            frame_end = (t + 1) / frame_rate
            overlap = min(seg.end, frame_end) - max(seg.start, frame_start)
            if overlap <= 0.0:
                continue
            fraction = overlap * frame_rate
            values[t] = max(values[t], score * fraction)
    return Signal(values=values, stage=Stage.RAW)


def score_ocr_leaf(
    ocr: tuple[OcrFrameText, ...], query: str, num_frames: int
) -> Signal:
    """Raw on-screen-text signal: per-frame max detection match score."""
    values = np.zeros(num_frames, dtype=np.float64)
    for entry in ocr:
        for detection in entry.detections:
            score = match_score(query, detection)
            if score > values[entry.frame]:
                values[entry.frame] = score
    return Signal(values=values, stage=Stage.RAW)


@dataclass
class ProviderCounters:
    """Observable scoring activity, one count per distinct computation.

    scoring_calls[e] increments once per unique (expert, query) pair each
    time a tree is evaluated, so duplicate leaves share a single call and
    experts absent from the tree stay at zero. Updates are lock-guarded so
    parallel leaf evaluation keeps counts exact.
    """

    scoring_calls: dict[ExpertKind, int] = field(
        default_factory=lambda: {kind: 0 for kind in ExpertKind}
    )
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, expert: ExpertKind) -> None:
        with self._lock:
            self.scoring_calls[expert] += 1

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return {kind.value: count for kind, count in self.scoring_calls.items()}


def _score_one(
    expert: ExpertKind,
    query: str,
    bundle: ExpertBundle,
    ovd_source: OvdSource | None,
) -> Signal:
    if expert in (ExpertKind.CLIP, ExpertKind.CLAP):
        return score_embedding_leaf(bundle, expert, query)
    if expert is ExpertKind.OVD:
        return score_ovd_leaf(ovd_source, query, bundle.num_frames)
    if expert is ExpertKind.ASR:
        if bundle.transcript is None:
            raise MissingArtifactError(f"bundle {bundle.video_id!r} has no transcript")
        return score_asr_leaf(
            bundle.transcript, query, bundle.num_frames, bundle.frame_rate
        )
    if bundle.ocr is None:
        raise MissingArtifactError(f"bundle {bundle.video_id!r} has no ocr artifacts")
    return score_ocr_leaf(bundle.ocr, query, bundle.num_frames)


def evaluate_leaves(
    tree: LogicTree,
    bundle: ExpertBundle,
    ovd_source: OvdSource | None = None,
    counters: ProviderCounters | None = None,
) -> dict[int, Signal]:
    """Raw signals for every leaf, computing each (expert, query) pair once.

    Experts with no leaves in the tree are never consulted, and duplicate
    predicates share one scoring call while still receiving their own map
    entries. Failures carry the offending leaf's identity.
    """
    if counters is None:
        counters = ProviderCounters()
    shared: dict[tuple[ExpertKind, str], Signal] = {}
    out: dict[int, Signal] = {}
    for leaf in tree.leaves:
        key = (leaf.expert, leaf.query.casefold())
        if key not in shared:
            try:
                shared[key] = _score_one(leaf.expert, leaf.query, bundle, ovd_source)
            except Exception as exc:
                raise LeafEvaluationError(
                    leaf.leaf_id, leaf.expert.value, leaf.query, exc
                ) from exc
            counters.record(leaf.expert)
        base = shared[key]
        out[leaf.leaf_id] = Signal(
            values=base.values, stage=Stage.RAW, source_leaf=leaf.leaf_id
        )
    return out
