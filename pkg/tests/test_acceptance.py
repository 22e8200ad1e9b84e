"""
Приймальні перевірки на синтетичному світі середнього розміру.

Запуск: pytest -m slow
"""

import time
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from config import RunConfig
from core.errors import EXIT_OK
from experiments.commands import evaluate_scores, score_influencers
from experiments.pipeline import prepare, resolve_dataset
from main import run


pytestmark = pytest.mark.slow

SEEDS = 5
HIDDEN = "64"
VARIANTS = ("full", "no-attention", "no-rnn", "no-gcn")


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    # порожній каталог даних: кожне зерно генерує власний світ
    return root / "data", root / "runs"


def invoke(workspace, command, *extra):
    data_dir, out_dir = workspace
    return run([command, "--data-dir", str(data_dir), "--out-dir", str(out_dir),
                "--hidden-dim", HIDDEN, *extra])


def medians(path: Path, label_column: str = "label") -> pd.DataFrame:
    frame = pd.read_csv(path)
    return frame[frame["seed"] == -1].set_index(label_column)


@pytest.fixture(scope="module")
def ablations(workspace):
    """Медіани за п'ятьма зернами для кожного варіанта та час навчання повної моделі."""
    elapsed = {}
    for variant in VARIANTS:
        started = time.perf_counter()
        assert invoke(workspace, "ablate", "--variant", variant,
                      "--repeats", str(SEEDS)) == EXIT_OK
        elapsed[variant] = time.perf_counter() - started
    return medians(workspace[1] / "ablate.csv"), elapsed


def followers_reference_median(data_dir: Path) -> float:
    values = []
    for seed in range(SEEDS):
        cfg = RunConfig(command="eval").with_seed(seed)
        cfg.paths.data_dir = str(data_dir)
        dataset = resolve_dataset(cfg)
        prepared = prepare(cfg, dataset)
        scores = score_influencers("followers", prepared, dataset, seed)
        values.append(evaluate_scores(cfg, prepared, scores)["ndcg@50"])
    return float(np.median(values))


def test_gradcheck_is_fast(workspace):
    started = time.perf_counter()
    assert invoke(workspace, "gradcheck") == EXIT_OK
    assert time.perf_counter() - started < 10.0


def test_full_model_learns_the_world(workspace, ablations):
    rows, elapsed = ablations
    assert elapsed["full"] <= 300.0
    assert rows.loc["full", "ndcg@10"] >= 0.85
    reference = followers_reference_median(workspace[0])
    assert rows.loc["full", "ndcg@50"] - reference >= 0.10


def test_components_matter(ablations):
    rows, _ = ablations
    ndcg = rows["ndcg@50"]
    assert ndcg["full"] >= ndcg["no-attention"] >= ndcg["no-rnn"]
    assert ndcg["full"] >= ndcg["no-gcn"]


def test_longer_history_helps(workspace):
    assert invoke(workspace, "sweep", "--axis", "history-length", "--repeats", str(SEEDS),
                  "--workers", "4") == EXIT_OK
    rows = medians(workspace[1] / "sweep.csv", "setting")["ndcg@50"]
    assert rows.loc[6.0] - rows.loc[1.0] >= 0.03


def test_train_then_eval(tmp_path):
    data_dir, out_dir = tmp_path / "data", tmp_path / "runs"
    flags = ["--data-dir", str(data_dir), "--out-dir", str(out_dir), "--hidden-dim", HIDDEN]
    assert run(["generate", *flags]) == EXIT_OK
    assert run(["train", *flags]) == EXIT_OK
    assert run(["eval", *flags]) == EXIT_OK
    frame = pd.read_csv(out_dir / "eval.csv")
    overall = frame[frame["stratum"] == "all"].set_index("label")
    assert overall.loc["model", "ndcg@50"] >= overall.loc["followers-reference", "ndcg@50"]
