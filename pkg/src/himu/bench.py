"""Synthetic event scripts, artifact generation, and a recall harness.

A script plants scored events on a frame timeline; the generator turns it
into the same artifact files a real video would produce (score tables,
transcript segments, text detections, detection scores), plus ground truth.
The harness runs the full selection pipeline per script, selector, and
budget, and reports how often selected frames land inside event supports.
Generation is deterministic: a fixed seed drives one PCG64 stream in a
fixed channel order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .errors import BenchmarkError, InvalidScriptError
from .experts.bundle import (
    ExpertBundle,
    OcrFrameText,
    OvdSource,
    ScoreTable,
    TranscriptSegment,
)
from .experts.scoring import ProviderCounters
from .pipeline import run_pipeline
from .tree import ExpertKind, parse_tree

SCRIPT_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

_TABLE_EXPERTS = (ExpertKind.CLIP, ExpertKind.CLAP)
_TEXT_EXPERTS = (ExpertKind.ASR, ExpertKind.OCR)
_SHIFTED_EXPERTS = (ExpertKind.ASR, ExpertKind.CLAP)


@dataclass(frozen=True)
class Event:
    """One planted occurrence: an expert sees the query on a frame span.

    support is the half-open ground-truth frame interval [start, end).
    modality_offset shifts where the signal lands for speech and audio
    channels (which lag or lead the visual timeline); ground truth stays
    unshifted.
    """

    expert: ExpertKind
    query: str
    support: tuple[int, int]
    amplitude: float = 1.0
    modality_offset: int = 0


@dataclass(frozen=True)
class EventScript:
    """Deterministic recipe for one synthetic video's artifacts."""

    script_id: str
    num_frames: int
    events: tuple[Event, ...]
    noise_level: float = 0.0
    seed: int = 0
    frame_rate: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        validate_script(self)


def validate_script(script: EventScript) -> None:
    if not script.script_id:
        raise InvalidScriptError("script_id must be nonempty")
    if script.num_frames < 1:
        raise InvalidScriptError(f"{script.script_id}: num_frames must be >= 1")
    if not (math.isfinite(script.noise_level) and script.noise_level >= 0):
        raise InvalidScriptError(f"{script.script_id}: noise_level must be >= 0")
    if not (math.isfinite(script.frame_rate) and script.frame_rate > 0):
        raise InvalidScriptError(f"{script.script_id}: frame_rate must be > 0")
    for event in script.events:
        start, end = event.support
        if not (0 <= start < end <= script.num_frames):
            raise InvalidScriptError(
                f"{script.script_id}: support [{start}, {end}) is not inside "
                f"[0, {script.num_frames})"
            )
        if not (0.0 < event.amplitude <= 1.0):
            raise InvalidScriptError(
                f"{script.script_id}: amplitude must be in (0, 1], "
                f"got {event.amplitude}"
            )
        if event.expert in _TEXT_EXPERTS and event.amplitude != 1.0:
            raise InvalidScriptError(
                f"{script.script_id}: {event.expert.value} events carry binary "
                f"match scores; amplitude must be exactly 1.0"
            )
        if not event.query.strip():
            raise InvalidScriptError(f"{script.script_id}: event query is empty")


@dataclass(frozen=True)
class GeneratedInstance:
    """Artifacts for one script plus the ground truth that produced them."""

    script: EventScript
    bundle: ExpertBundle
    ovd_source: OvdSource | None


def _signal_support(event: Event, num_frames: int) -> tuple[int, int]:
    """Where the event's signal lands, after any modality shift, clamped."""
    start, end = event.support
    if event.expert in _SHIFTED_EXPERTS:
        start += event.modality_offset
        end += event.modality_offset
    return max(0, start), min(num_frames, end)


def _table_rows(script: EventScript, expert: ExpertKind, rng) -> list[tuple[str, np.ndarray]]:
    """Score-table rows for one expert: planted amplitudes plus noise."""
    queries: list[str] = []
    for event in script.events:
        if event.expert is expert and event.query not in queries:
            queries.append(event.query)
    rows = []
    for query in queries:
        values = np.zeros(script.num_frames, dtype=np.float64)
        for event in script.events:
            if event.expert is expert and event.query == query:
                lo, hi = _signal_support(event, script.num_frames)
                if lo < hi:
                    values[lo:hi] = np.maximum(values[lo:hi], event.amplitude)
        if script.noise_level > 0:
            values = values + rng.normal(0.0, script.noise_level, script.num_frames)
        rows.append((query, np.clip(values, 0.0, 1.0)))
    return rows


def generate(script: EventScript) -> GeneratedInstance:
    """Deterministic artifacts for a script.

    Embedding and detection channels materialize as score rows holding the
    event amplitude on its (possibly shifted) support, with clipped Gaussian
    noise when noise_level > 0. Speech events become transcript segments
    whose text is the query; text events become per-frame detections; both
    match exactly at scoring time, which is why their amplitude is pinned
    to 1.0.
    """
    validate_script(script)
    rng = np.random.default_rng(script.seed)

    clip_rows = _table_rows(script, ExpertKind.CLIP, rng)
    clap_rows = _table_rows(script, ExpertKind.CLAP, rng)
    ovd_rows = _table_rows(script, ExpertKind.OVD, rng)

    segments = []
    for event in script.events:
        if event.expert is not ExpertKind.ASR:
            continue
        lo, hi = _signal_support(event, script.num_frames)
        if lo >= hi:
            continue
        segments.append(
            TranscriptSegment(
                start=lo / script.frame_rate,
                end=hi / script.frame_rate,
                text=event.query.casefold(),
            )
        )

    ocr_entries = []
    for event in script.events:
        if event.expert is not ExpertKind.OCR:
            continue
        lo, hi = _signal_support(event, script.num_frames)
        for frame in range(lo, hi):
            ocr_entries.append(OcrFrameText(frame=frame, detections=(event.query,)))

    used = {event.expert for event in script.events}
    bundle = ExpertBundle(
        video_id=script.script_id,
        num_frames=script.num_frames,
        frame_rate=script.frame_rate,
        clip_table=(
            ScoreTable(ExpertKind.CLIP, script.script_id, tuple(clip_rows))
            if ExpertKind.CLIP in used
            else None
        ),
        clap_table=(
            ScoreTable(ExpertKind.CLAP, script.script_id, tuple(clap_rows))
            if ExpertKind.CLAP in used
            else None
        ),
        transcript=tuple(segments) if ExpertKind.ASR in used else None,
        ocr=tuple(ocr_entries) if ExpertKind.OCR in used else None,
    )
    ovd_source = (
        OvdSource(script.script_id, tuple(ovd_rows)) if ExpertKind.OVD in used else None
    )
    return GeneratedInstance(script=script, bundle=bundle, ovd_source=ovd_source)


def matched_tree_document(script: EventScript) -> str:
    """Tree that asks exactly for the script's events: OR over event leaves."""
    leaves = []
    seen = set()
    for event in script.events:
        key = (event.expert, event.query)
        if key in seen:
            continue
        seen.add(key)
        leaves.append(
            {"op": "LEAF", "expert": event.expert.value, "query": event.query}
        )
    if not leaves:
        raise InvalidScriptError(f"{script.script_id}: no events to build a tree from")
    if len(leaves) == 1:
        return json.dumps(leaves[0])
    return json.dumps({"op": "OR", "children": leaves})


@dataclass(frozen=True)
class ReportEntry:
    """Aggregate outcome for one selector at one budget."""

    selector: str
    budget: int
    events_total: int
    events_hit: int
    frames_selected: int
    frames_relevant: int

    @property
    def event_recall(self) -> float:
        return self.events_hit / self.events_total if self.events_total else 0.0

    @property
    def relevant_fraction(self) -> float:
        return self.frames_relevant / self.frames_selected if self.frames_selected else 0.0


@dataclass(frozen=True)
class RecallReport:
    """Recall of every selector at every budget over a script set."""

    selectors: tuple[str, ...]
    budgets: tuple[int, ...]
    num_scripts: int
    entries: tuple[ReportEntry, ...] = field(default_factory=tuple)

    def entry(self, selector: str, budget: int) -> ReportEntry:
        for e in self.entries:
            if e.selector == selector and e.budget == budget:
                return e
        raise KeyError(f"no entry for {selector!r} at budget {budget}")


def run_benchmark(
    scripts,
    selectors=("uniform", "topk", "pass"),
    budgets=(8, 16, 32, 64),
    config: EngineConfig | None = None,
    tree_for=None,
) -> RecallReport:
    """Full pipeline per script x selector x budget, aggregated into recall.

    tree_for maps a script to its tree document; the default asks for
    exactly the script's events. Scripts are processed in script_id order
    so aggregation is deterministic regardless of input order.
    """
    if config is None:
        config = EngineConfig()
    if tree_for is None:
        tree_for = matched_tree_document
    ordered = sorted(scripts, key=lambda s: s.script_id)
    ids = [s.script_id for s in ordered]
    if len(set(ids)) != len(ids):
        raise InvalidScriptError("script_id values must be unique")

    tallies = {
        (sel, k): {"events": 0, "hit": 0, "frames": 0, "relevant": 0}
        for sel in selectors
        for k in budgets
    }
    for script in ordered:
        try:
            instance = generate(script)
            tree = parse_tree(
                tree_for(script),
                active_experts=config.active_experts,
                strict=config.strict_schema,
                max_depth=config.max_depth,
                max_leaves=config.max_leaves,
            )
            supports = [e.support for e in script.events]
            in_support = np.zeros(script.num_frames, dtype=bool)
            for start, end in supports:
                in_support[start:end] = True
            for selector in selectors:
                for budget in budgets:
                    result = run_pipeline(
                        tree,
                        instance.bundle,
                        budget,
                        config=config,
                        ovd_source=instance.ovd_source,
                        counters=ProviderCounters(),
                        strategy=selector,
                    )
                    frames = result.selection.frames
                    tally = tallies[(selector, budget)]
                    tally["events"] += len(supports)
                    tally["hit"] += sum(
                        1
                        for start, end in supports
                        if any(start <= t < end for t in frames)
                    )
                    tally["frames"] += len(frames)
                    tally["relevant"] += int(np.count_nonzero(in_support[list(frames)]))
        except InvalidScriptError:
            raise
        except Exception as exc:
            raise BenchmarkError(script.script_id, exc) from exc

    entries = tuple(
        ReportEntry(
            selector=sel,
            budget=k,
            events_total=tallies[(sel, k)]["events"],
            events_hit=tallies[(sel, k)]["hit"],
            frames_selected=tallies[(sel, k)]["frames"],
            frames_relevant=tallies[(sel, k)]["relevant"],
        )
        for sel in selectors
        for k in budgets
    )
    return RecallReport(
        selectors=tuple(selectors),
        budgets=tuple(int(k) for k in budgets),
        num_scripts=len(ordered),
        entries=entries,
    )


# --- file formats ---------------------------------------------------------------

def script_to_obj(script: EventScript) -> dict:
    return {
        "script_id": script.script_id,
        "T": script.num_frames,
        "frame_rate": script.frame_rate,
        "noise_level": script.noise_level,
        "seed": script.seed,
        "events": [
            {
                "expert": e.expert.value,
                "query": e.query,
                "support": [e.support[0], e.support[1]],
                "amplitude": e.amplitude,
                "modality_offset": e.modality_offset,
            }
            for e in script.events
        ],
    }


def script_from_obj(obj) -> EventScript:
    if not isinstance(obj, dict):
        raise InvalidScriptError("script must be a JSON object")
    try:
        events = tuple(
            Event(
                expert=ExpertKind(str(e["expert"]).upper()),
                query=str(e["query"]),
                support=(int(e["support"][0]), int(e["support"][1])),
                amplitude=float(e.get("amplitude", 1.0)),
                modality_offset=int(e.get("modality_offset", 0)),
            )
            for e in obj.get("events", [])
        )
        return EventScript(
            script_id=str(obj["script_id"]),
            num_frames=int(obj["T"]),
            events=events,
            noise_level=float(obj.get("noise_level", 0.0)),
            seed=int(obj.get("seed", 0)),
            frame_rate=float(obj.get("frame_rate", 1.0)),
        )
    except InvalidScriptError:
        raise
    except KeyError as exc:
        raise InvalidScriptError(
            f"script is missing required key {exc}"
        ) from exc
    except (ValueError, TypeError, IndexError) as exc:
        raise InvalidScriptError(f"malformed script: {exc}") from exc


def save_scripts(scripts, path) -> None:
    obj = {
        "format_version": SCRIPT_FORMAT_VERSION,
        "scripts": [script_to_obj(s) for s in scripts],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_scripts(path) -> list[EventScript]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidScriptError(f"script file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "scripts" not in obj:
        raise InvalidScriptError("script file must be {format_version, scripts}")
    if obj.get("format_version") != SCRIPT_FORMAT_VERSION:
        raise InvalidScriptError(
            f"unsupported script format_version {obj.get('format_version')}"
        )
    return [script_from_obj(s) for s in obj["scripts"]]


def report_to_obj(report: RecallReport) -> dict:
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "selectors": list(report.selectors),
        "budgets": list(report.budgets),
        "num_scripts": report.num_scripts,
        "entries": [
            {
                "selector": e.selector,
                "budget": e.budget,
                "events_total": e.events_total,
                "events_hit": e.events_hit,
                "event_recall": e.event_recall,
                "frames_selected": e.frames_selected,
                "frames_relevant": e.frames_relevant,
                "relevant_fraction": e.relevant_fraction,
            }
            for e in report.entries
        ],
    }


def report_from_obj(obj) -> RecallReport:
    if not isinstance(obj, dict) or obj.get("format_version") != REPORT_FORMAT_VERSION:
        raise ValueError("unsupported report document")
    entries = tuple(
        ReportEntry(
            selector=e["selector"],
            budget=int(e["budget"]),
            events_total=int(e["events_total"]),
            events_hit=int(e["events_hit"]),
            frames_selected=int(e["frames_selected"]),
            frames_relevant=int(e["frames_relevant"]),
        )
        for e in obj["entries"]
    )
    return RecallReport(
        selectors=tuple(obj["selectors"]),
        budgets=tuple(int(b) for b in obj["budgets"]),
        num_scripts=int(obj["num_scripts"]),
        entries=entries,
    )


def save_report(report: RecallReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_obj(report), fh, indent=2)
        fh.write("\n")


def load_report(path) -> RecallReport:
    with open(path, "r", encoding="utf-8") as fh:
        return report_from_obj(json.load(fh))
