"""End-to-end selection: score leaves, condition signals, compose, select.

The stages run in a fixed order. Raw leaf signals are produced per
(expert, query) pair, normalized jointly per expert so siblings share one
scale, smoothed with the expert's bandwidth, composed bottom-up into the
satisfaction curve, and finally reduced to a budgeted frame set.
"""
from __future__ import annotations

from dataclasses import dataclass

from .compose import AttributionMatrix, SatisfactionCurve, evaluate
from .config import EngineConfig
from .experts.bundle import ExpertBundle, OvdSource
from .experts.scoring import ProviderCounters, evaluate_leaves
from .select import (
    PassParams,
    SelectionResult,
    pass_select,
    topk_select,
    uniform_select,
)
from .signals import Signal, normalize_joint, smooth
from .tree import LogicTree, leaves_by_expert

STRATEGIES = ("pass", "topk", "uniform")


@dataclass(frozen=True)
class PipelineResult:
    """Everything one selection run produced."""

    curve: SatisfactionCurve
    attribution: AttributionMatrix
    selection: SelectionResult
    counters: ProviderCounters


def condition_signals(
    tree: LogicTree,
    raw: dict[int, Signal],
    config: EngineConfig,
) -> dict[int, Signal]:
    """Normalize raw leaf signals jointly per expert, then smooth each.

    Joint normalization pools the median and spread over all of one
    expert's leaves so sibling queries stay comparable; smoothing then
    applies that expert's bandwidth to every leaf in the group.
    """
    norm_params = config.normalization_params()
    smooth_params = config.smoothing_params()
    out: dict[int, Signal] = {}
    for expert, leaf_ids in leaves_by_expert(tree).items():
        group = [raw[i] for i in leaf_ids]
        normalized = normalize_joint(group, norm_params)
        for leaf_id, sig in zip(leaf_ids, normalized):
            out[leaf_id] = smooth(sig, expert, smooth_params)
    return out


def select_frames(
    curve: SatisfactionCurve,
    attribution: AttributionMatrix,
    budget: int,
    config: EngineConfig,
    strategy: str = "pass",
) -> SelectionResult:
    if strategy == "pass":
        params = PassParams(
            budget=budget,
            max_peaks=config.max_peaks,
            neighbors_per_peak=config.neighbors_per_peak,
            window=config.window,
            min_distance=config.min_distance,
        )
        return pass_select(curve, params, attribution)
    if strategy == "topk":
        return topk_select(curve, budget, attribution)
    if strategy == "uniform":
        return uniform_select(len(curve), budget, curve.values, attribution)
    raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")


def run_pipeline(
    tree: LogicTree,
    bundle: ExpertBundle,
    budget: int,
    config: EngineConfig | None = None,
    ovd_source: OvdSource | None = None,
    counters: ProviderCounters | None = None,
    strategy: str = "pass",
) -> PipelineResult:
    """Full run from a validated tree and bundle to selected frames."""
    if config is None:
        config = EngineConfig()
    if counters is None:
        counters = ProviderCounters()
    raw = evaluate_leaves(tree, bundle, ovd_source, counters)
    processed = condition_signals(tree, raw, config)
    curve, attribution = evaluate(tree, processed, kappa=config.kappa)
    selection = select_frames(curve, attribution, budget, config, strategy)
    return PipelineResult(
        curve=curve, attribution=attribution, selection=selection, counters=counters
    )
