"""Pytest configuration and shared fixtures."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from gpderain.model.network import init_params
from gpderain.models.model_config import ModelConfig
from gpderain.models.rain_config import RainParams
from gpderain.models.train_config import TrainConfig
from gpderain.rainsynth.domain import make_domain
from gpderain.rainsynth.textures import procedural_textures
from gpderain.tensor import new_tape


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow", action="store_true", default=False, help="Run tests marked slow"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="slow test; use --run-slow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def fresh_tape():
    """Start every test with an empty gradient tape."""
    new_tape()
    yield
    new_tape()


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Smallest network that keeps every stage: crop 16, latent 8 x 4."""
    return ModelConfig(
        base_channels=4,
        latent_channels=8,
        bottleneck_channels=8,
        res2_scale=2,
        n_downsamples=3,
        crop=16,
    )


@pytest.fixture
def tiny_net(tiny_config):
    return init_params(tiny_config, seed=7)


@pytest.fixture
def tiny_train_config():
    """Two quick epochs over tiny domains with the GP phase on."""
    return TrainConfig(
        batch=2,
        epochs=2,
        lr=1e-3,
        n_neighbors=2,
        bank_max_entries=4,
        lambda_p=0.0,
        gp_mode="syn2real++",
        sample_images=1,
        seed=3,
    )


@pytest.fixture
def base_images():
    return procedural_textures(4, 16, seed=0)


@pytest.fixture
def tiny_domains(temp_dir, base_images):
    """Source train/test (labeled), target train (unlabeled) and test at 16 x 16."""
    source = RainParams(orientation_deg=70.0, density=8.0, length_px=6.0, length_spread=2.0, seed=1)
    target = RainParams(orientation_deg=110.0, density=16.0, length_px=6.0, length_spread=2.0, seed=2)
    root = temp_dir / "data"
    return {
        "source_train": make_domain(
            base_images, source, 4, str(root / "source" / "train"), True, "source", "train", 16
        ),
        "source_test": make_domain(
            base_images, source, 2, str(root / "source" / "test"), True, "source", "test", 16
        ),
        "target_train": make_domain(
            base_images, target, 4, str(root / "target" / "train"), False, "target", "train", 16
        ),
        "target_test": make_domain(
            base_images, target, 2, str(root / "target" / "test"), True, "target", "test", 16
        ),
    }


def finite_difference(f, x: np.ndarray, index, h: float = 1e-5) -> float:
    """Central difference of scalar f with respect to x[index]; x is restored."""
    original = x[index]
    x[index] = original + h
    plus = f()
    x[index] = original - h
    minus = f()
    x[index] = original
    return (plus - minus) / (2.0 * h)


@pytest.fixture
def finite_diff():
    """The central-difference oracle used by gradient checks."""
    return finite_difference
