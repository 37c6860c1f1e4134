import pytest

from lccde_toolkit.exceptions import ConfigurationError
from lccde_toolkit.learners.config import (
    VARIANT_ORDER,
    BoosterConfig,
    Variant,
    default_configs,
)


def test_variant_order():
    assert [variant.value for variant in VARIANT_ORDER] == [
        "goss_leafwise",
        "depthwise",
        "oblivious",
    ]


def test_defaults():
    config = BoosterConfig()
    assert config.rounds == 100
    assert config.learning_rate == 0.1
    assert config.goss_top_fraction + config.goss_rand_fraction <= 1


@pytest.mark.parametrize(
    "changes",
    [
        {"rounds": 0},
        {"learning_rate": 0.0},
        {"max_depth": 0},
        {"l2_reg": -1.0},
        {"min_child_hessian": -0.5},
        {"max_leaves": 0},
        {"goss_top_fraction": 1.2},
        {"goss_top_fraction": 0.6, "goss_rand_fraction": 0.5},
        {"seed": -1},
    ],
)
def test_invalid_hyperparameters(changes):
    with pytest.raises(ConfigurationError):
        BoosterConfig(**changes)


def test_lazy_build():
    config = BoosterConfig(rounds=3)
    assert BoosterConfig.lazy_build(config) is config
    assert BoosterConfig.lazy_build(None) == BoosterConfig()
    assert BoosterConfig.lazy_build({"rounds": 3}) == config
    with pytest.raises(ConfigurationError):
        BoosterConfig.lazy_build({"depth": 3})
    with pytest.raises(TypeError):
        BoosterConfig.lazy_build(3)


@pytest.mark.parametrize(
    "name,raw,expected",
    [("rounds", "12", 12), ("learning_rate", "0.05", 0.05), ("seed", "7", 7)],
)
def test_coerce(name, raw, expected):
    value = BoosterConfig.coerce(name, raw)
    assert value == expected
    assert type(value) is type(expected)


@pytest.mark.parametrize("name,raw", [("rounds", "1.5"), ("nope", "1")])
def test_coerce_rejects(name, raw):
    with pytest.raises(ConfigurationError):
        BoosterConfig.coerce(name, raw)


def test_with_overrides():
    config = BoosterConfig().with_overrides(max_depth=3)
    assert config.max_depth == 3
    with pytest.raises(ConfigurationError):
        config.with_overrides(depth=2)


def test_default_configs_share_seed():
    configs = default_configs(seed=9)
    assert len(configs) == len(VARIANT_ORDER)
    assert all(config.seed == 9 for config in configs)


def test_to_dict_round_trip():
    config = BoosterConfig(rounds=5, learning_rate=0.2)
    assert BoosterConfig.lazy_build(config.to_dict()) == config
    assert Variant("oblivious") is Variant.OBLIVIOUS
