"""
Спільні фікстури тестів: крихітні світи, мережі та конфігурації.
"""

import pytest

from config import ModelConfig, RunConfig, TrainConfig, WorldConfig
from core.records import CaptionStats, ImageRecord, PostRecord, ProfileRecord
from experiments.pipeline import build_network, dataset_from_world
from synthgen.world import generate_world


TINY_WORLD = WorldConfig(
    n_influencers=12, n_hashtags=24, n_objects=10, n_other_users=12, n_windows=5,
    posts_per_window=3.0, n_topics=3, n_trending=4, seed=11,
)

TINY_MODEL = ModelConfig(
    d_embed=4, gcn_layers=2, gcn_hidden=3, gru_hidden=4,
    mlp_hidden=4, dropout=0.0, seed=0,
)


@pytest.fixture
def make_post():
    def factory(influencer_id="u0", window=0, likes=10, **fields):
        fields.setdefault("image", ImageRecord(120.0, 30.0, 6000.0))
        fields.setdefault("caption_stats", CaptionStats(1, 0, 2, 40, 0.2))
        return PostRecord(influencer_id=influencer_id, window_index=window, likes=likes, **fields)
    return factory


@pytest.fixture
def make_profile():
    def factory(influencer_id="u0", followers=(1000,), followees=100, total_posts=50,
                category="beauty"):
        return ProfileRecord(influencer_id, tuple(followers), followees, total_posts, category)
    return factory


@pytest.fixture(scope="session")
def tiny_world():
    return generate_world(TINY_WORLD)


@pytest.fixture(scope="session")
def tiny_dataset(tiny_world):
    return dataset_from_world(tiny_world)


@pytest.fixture(scope="session")
def tiny_network(tiny_dataset):
    return build_network(tiny_dataset.posts, tiny_dataset.profiles, [0, 1, 2])


@pytest.fixture
def tiny_model_config():
    return ModelConfig(**vars(TINY_MODEL))


@pytest.fixture
def tiny_train_config():
    return TrainConfig(list_size=3, lists_per_batch=4, lr=0.01, epochs=3, window_length=2,
                       validation_fraction=0.2, seed=0)


@pytest.fixture
def run_config(tmp_path):
    """Конфігурація запуску, що навчається за секунди."""
    cfg = RunConfig(command="train")
    cfg.world = WorldConfig(**{**vars(TINY_WORLD), "n_windows": 4})
    cfg.model = ModelConfig(**vars(TINY_MODEL))
    cfg.train = TrainConfig(list_size=3, lists_per_batch=4, lr=0.01, epochs=2,
                            window_length=2, seed=cfg.seed)
    cfg.paths.data_dir = str(tmp_path / "data")
    cfg.paths.out_dir = str(tmp_path / "runs")
    cfg.world.seed = cfg.model.seed = cfg.train.seed = 0
    return cfg
