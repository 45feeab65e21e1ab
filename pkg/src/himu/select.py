"""Budgeted frame selection over a satisfaction curve.

The main strategy is peak-and-spread: pick well-separated strict local
maxima first, surround each with its best nearby frames for context, then
fill the remaining budget with the highest-scoring frames left anywhere.
Each selected frame is labeled with the phase that chose it. Top-K and
uniform spacing are provided as baselines. All strategies are
deterministic and return sorted, duplicate-free frame lists.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .compose import AttributionMatrix, SatisfactionCurve


class SelectionPhase(enum.Enum):
    PEAK = "peak"
    NEIGHBOR = "neighbor"
    FILL = "fill"


@dataclass(frozen=True)
class PassParams:
    """Knobs for peak-and-spread selection.

    Every knob defaults from the budget K: max_peaks = floor(sqrt(K)),
    neighbors_per_peak = floor(sqrt(K)) // 2, window = floor(sqrt(K)), and
    min_distance = floor(sqrt(K)). For K = 16 that gives (4, 2, 4, 4).
    """

    budget: int
    max_peaks: int | None = None
    neighbors_per_peak: int | None = None
    window: int | None = None
    min_distance: int | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        root = max(math.isqrt(self.budget), 1)
        if self.max_peaks is None:
            object.__setattr__(self, "max_peaks", root)
        if self.neighbors_per_peak is None:
            object.__setattr__(self, "neighbors_per_peak", root // 2)
        if self.window is None:
            object.__setattr__(self, "window", root)
        if self.min_distance is None:
            object.__setattr__(self, "min_distance", root)
        if self.max_peaks < 1:
            raise ValueError("max_peaks must be >= 1")
        if self.neighbors_per_peak < 0:
            raise ValueError("neighbors_per_peak must be >= 0")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.min_distance < 1:
            raise ValueError("min_distance must be >= 1")

    @classmethod
    def from_budget(cls, budget: int) -> "PassParams":
        return cls(budget=budget)


@dataclass(frozen=True)
class SelectionResult:
    """Selected frames plus the evidence used to pick them."""

    frames: tuple[int, ...]
    scores: tuple[float, ...]
    phase: dict[int, SelectionPhase]
    peaks: tuple[int, ...]
    strategy: str
    attribution: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if len(self.frames) != len(self.scores):
            raise ValueError("frames and scores must align")
        if list(self.frames) != sorted(set(self.frames)):
            raise ValueError("frames must be strictly increasing and unique")
        if set(self.phase) != set(self.frames):
            raise ValueError("phase labels must cover exactly the selected frames")


def _check_curve(curve) -> np.ndarray:
    if isinstance(curve, SatisfactionCurve):
        return curve.values
    values = np.asarray(curve, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] < 1:
        raise ValueError("curve must be a nonempty 1-D array")
    return values


def _by_score_then_index(values: np.ndarray) -> np.ndarray:
    """Frame indices ordered by descending score, ties by ascending index."""
    return np.argsort(-values, kind="stable")


def find_peaks(curve, max_peaks: int, min_distance: int) -> list[int]:
    """At most max_peaks strict local maxima, pairwise >= min_distance apart.

    A frame qualifies only when it strictly exceeds both neighbors, so
    endpoints and plateau members never qualify. Candidates are visited in
    descending score order (ties to the lower index) and kept only when far
    enough from every peak already kept; fewer than max_peaks may exist.
    """
    values = _check_curve(curve)
    if max_peaks < 1:
        raise ValueError("max_peaks must be >= 1")
    if min_distance < 1:
        raise ValueError("min_distance must be >= 1")
    interior = np.flatnonzero(
        (values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])
    ) + 1
    if interior.size == 0:
        return []
    order = np.argsort(-values[interior], kind="stable")
    kept: list[int] = []
    for t in interior[order]:
        if len(kept) >= max_peaks:
            break
        if all(abs(int(t) - p) >= min_distance for p in kept):
            kept.append(int(t))
    return kept


def _restrict(attribution, frames):
    if attribution is None:
        return None
    if hasattr(attribution, "restrict"):
        return attribution.restrict(frames)
    # Plain per-leaf matrix of shape (num_leaves, T).
    return np.asarray(attribution, dtype=np.float64)[:, list(frames)]


def _result(values, selected, phase, peaks, strategy, attribution):
    frames = tuple(sorted(selected))
    return SelectionResult(
        frames=frames,
        scores=tuple(float(values[t]) for t in frames),
        phase=phase,
        peaks=tuple(peaks),
        strategy=strategy,
        attribution=_restrict(attribution, frames),
    )


def pass_select(
    curve,
    params: PassParams,
    attribution: AttributionMatrix | None = None,
) -> SelectionResult:
    """Peak-and-spread selection of min(budget, T) frames.

    Phase 1 keeps the separated peaks. Phase 2 walks peaks in selection
    order and adds each peak's neighbors_per_peak best unselected frames
    within window // 2. Phase 3 fills the rest of the budget with the
    globally best unselected frames. A budget beyond the timeline returns
    every frame.
    """
    values = _check_curve(curve)
    T = values.shape[0]
    budget = min(params.budget, T)

    peaks = find_peaks(values, params.max_peaks, params.min_distance)
    phase: dict[int, SelectionPhase] = {}
    selected: list[int] = []
    taken = np.zeros(T, dtype=bool)
    for p in peaks:
        if len(selected) >= budget:
            break
        selected.append(p)
        taken[p] = True
        phase[p] = SelectionPhase.PEAK

    half = params.window // 2
    for p in peaks:
        if len(selected) >= budget:
            break
        lo, hi = max(0, p - half), min(T - 1, p + half)
        local = np.arange(lo, hi + 1)
        local = local[~taken[local]]
        if local.size == 0:
            continue
        ranked = local[np.argsort(-values[local], kind="stable")]
        for t in ranked[: params.neighbors_per_peak]:
            if len(selected) >= budget:
                break
            selected.append(int(t))
            taken[t] = True
            phase[int(t)] = SelectionPhase.NEIGHBOR

    if len(selected) < budget:
        for t in _by_score_then_index(values):
            if len(selected) >= budget:
                break
            if not taken[t]:
                selected.append(int(t))
                taken[t] = True
                phase[int(t)] = SelectionPhase.FILL

    kept_peaks = [p for p in peaks if p in phase]
    return _result(values, selected, phase, kept_peaks, "pass", attribution)


def topk_select(
    curve, budget: int, attribution: AttributionMatrix | None = None
) -> SelectionResult:
    """The budget's highest-scoring frames, ties broken by lower index."""
    values = _check_curve(curve)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    k = min(budget, values.shape[0])
    selected = [int(t) for t in _by_score_then_index(values)[:k]]
    phase = {t: SelectionPhase.FILL for t in selected}
    return _result(values, selected, phase, [], "topk", attribution)


def uniform_select(
    num_frames: int,
    budget: int,
    curve=None,
    attribution: AttributionMatrix | None = None,
) -> SelectionResult:
    """Evenly spaced frames, ignoring scores.

    Ideal positions are round(i * (T - 1) / (K - 1)); a single-frame budget
    takes frame 0. When rounding collides, the nearest unused frame is
    substituted (probing lower first, then higher, at growing distance) so
    exactly min(budget, T) distinct frames come back.
    """
    if num_frames < 1:
        raise ValueError("num_frames must be >= 1")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    k = min(budget, num_frames)
    used = np.zeros(num_frames, dtype=bool)
    chosen: list[int] = []
    for i in range(k):
        ideal = 0 if k == 1 else round(i * (num_frames - 1) / (k - 1))
        t = ideal
        if used[t]:
            for d in range(1, num_frames):
                if ideal - d >= 0 and not used[ideal - d]:
                    t = ideal - d
                    break
                if ideal + d < num_frames and not used[ideal + d]:
                    t = ideal + d
                    break
        chosen.append(t)
        used[t] = True
    values = _check_curve(curve) if curve is not None else np.zeros(num_frames)
    phase = {t: SelectionPhase.FILL for t in chosen}
    return _result(values, chosen, phase, [], "uniform", attribution)
