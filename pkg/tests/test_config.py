import json

import pytest

from himu.config import EngineConfig, config_from_obj, load_config
from himu.errors import SchemaError
from himu.signals import DEFAULT_BANDWIDTHS
from himu.tree import ALL_EXPERTS, ExpertKind


def test_defaults():
    cfg = EngineConfig()
    assert cfg.gamma == 3.0
    assert cfg.delta == 1e-6
    assert cfg.kappa == 2.0
    assert cfg.sigma_by_expert == DEFAULT_BANDWIDTHS
    assert cfg.smoothing_mode == "renormalized"
    assert cfg.active_experts == frozenset(ALL_EXPERTS)
    assert cfg.strict_schema is True
    assert cfg.cache_capacity == 8


def test_with_overrides_returns_new_config():
    base = EngineConfig()
    changed = base.with_overrides(gamma=5.0, kappa=0.5)
    assert changed.gamma == 5.0 and changed.kappa == 0.5
    assert base.gamma == 3.0
    assert changed.sigma_by_expert == base.sigma_by_expert


def test_validation_rejects_bad_values():
    with pytest.raises(ValueError):
        EngineConfig(gamma=0.0)
    with pytest.raises(ValueError):
        EngineConfig(delta=-1.0)
    with pytest.raises(ValueError):
        EngineConfig(kappa=0.0)
    with pytest.raises(ValueError):
        EngineConfig(smoothing_mode="cubic")
    with pytest.raises(ValueError):
        EngineConfig(sigma_by_expert={ExpertKind.CLIP: -0.5})


def test_config_from_obj_merges_over_base():
    cfg = config_from_obj(
        {
            "gamma": 4.0,
            "sigma_by_expert": {"asr": 2.5},
            "active_experts": ["clip", "ASR"],
            "max_peaks": 6,
        }
    )
    assert cfg.gamma == 4.0
    assert cfg.sigma_by_expert[ExpertKind.ASR] == 2.5
    assert cfg.sigma_by_expert[ExpertKind.CLIP] == DEFAULT_BANDWIDTHS[ExpertKind.CLIP]
    assert cfg.active_experts == frozenset({ExpertKind.CLIP, ExpertKind.ASR})
    assert cfg.max_peaks == 6
    assert cfg.delta == 1e-6


def test_config_from_obj_rejects_unknowns_and_bad_types():
    with pytest.raises(SchemaError):
        config_from_obj({"gama": 4.0})
    with pytest.raises(SchemaError):
        config_from_obj({"gamma": "strong"})
    with pytest.raises(SchemaError):
        config_from_obj({"active_experts": ["clip", "radar"]})
    with pytest.raises(SchemaError):
        config_from_obj({"sigma_by_expert": {"radar": 1.0}})
    with pytest.raises(SchemaError):
        config_from_obj(["gamma", 4.0])


def test_load_config(tmp_path):
    path = tmp_path / "engine.json"
    path.write_text(json.dumps({"kappa": 1.25, "smoothing_mode": "strict"}))
    cfg = load_config(path)
    assert cfg.kappa == 1.25
    assert cfg.smoothing_mode == "strict"
    base = EngineConfig(gamma=9.0)
    assert load_config(path, base=base).gamma == 9.0
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_config(bad)


def test_param_helpers_mirror_fields():
    cfg = EngineConfig(gamma=4.5, delta=1e-5, smoothing_mode="strict")
    norm = cfg.normalization_params()
    assert norm.gamma == 4.5 and norm.delta == 1e-5
    smooth = cfg.smoothing_params()
    assert smooth.mode == "strict"
    assert smooth.sigma_by_expert == cfg.sigma_by_expert
