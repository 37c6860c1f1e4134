import itertools
from pathlib import Path

import numpy as np
import pytest

from lccde_toolkit.core import Dataset
from lccde_toolkit.ensemble import train_lccde
from lccde_toolkit.learners.config import BoosterConfig


def make_blobs(
    n_samples: int,
    n_classes: int = 3,
    n_features: int = 2,
    spread: float = 0.5,
    seed: int = 0,
    noise_by_class: bool = False,
) -> Dataset:
    """Gaussian blobs around class centers placed on a circle of radius 4"""
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(n_classes) / n_classes
    centers = np.zeros((n_classes, n_features))
    centers[:, 0] = 4 * np.cos(angles)
    centers[:, 1] = 4 * np.sin(angles)
    labels = np.arange(n_samples) % n_classes
    rng.shuffle(labels)
    scale = np.full(n_classes, spread)
    if noise_by_class:
        scale = spread * (1 + 0.5 * np.arange(n_classes))
    features = centers[labels] + rng.normal(size=(n_samples, n_features)) * scale[
        labels, None
    ]
    return Dataset(
        features,
        labels,
        [f"x{index}" for index in range(n_features)],
        [f"class{index}" for index in range(n_classes)],
    )


def step_clock():
    """A clock that advances by exactly one second per reading"""
    return itertools.count().__next__


@pytest.fixture(scope="session")
def fast_config() -> BoosterConfig:
    return BoosterConfig(rounds=8, learning_rate=0.3, max_depth=3, max_leaves=8)


@pytest.fixture(scope="session")
def fast_configs(fast_config) -> list[BoosterConfig]:
    return [fast_config] * 3


@pytest.fixture(scope="session")
def toy_dataset() -> Dataset:
    return make_blobs(120, n_classes=3, spread=0.6, seed=1)


@pytest.fixture(scope="session")
def toy_model(toy_dataset, fast_configs):
    return train_lccde(toy_dataset, fast_configs, folds=3, seed=0, clock=step_clock())


@pytest.fixture
def write_text(tmp_path: Path):
    """Write text to a file under tmp_path and return its path"""

    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
