"""
Модуль підготовки даних для експериментів.

Визначає протокол вікон: за W вікон навчання використовує вхідні вікна
[W-2-k, W-2) з ціллю W-2, а оцінювання - вхідні вікна [W-1-k, W-1) з
відкладеною ціллю W-1. Мережа кожного вікна будується, проріджується,
за потреби втрачає один тип вузлів, вирівнюється, після чого необмежені
ознаки масштабуються, а для абляції ознак одна категорія обнуляється.
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import RunConfig, parse_variant
from core.errors import ContractError, DataError
from core.records import NodeKind, PostRecord, ProfileRecord
from featurizer.features import scale_columns, zero_category
from hetnet.ingest import read_posts, read_profiles
from hetnet.snapshot import build_snapshot, drop_kind, prune
from hetnet.temporal import TemporalNetwork, align
from metrics.engagement import window_engagement
from model.params import ModelVariant
from synthgen.world import World, generate_world


@dataclass(frozen=True)
class Dataset:
    """
    Публікації та профілі одного набору даних.

    Атрибути:
        posts: Усі публікації
        profiles: Профілі за ідентифікатором інфлюенсера
        n_windows: Кількість часових вікон
        window_seconds: Тривалість базового вікна в секундах
    """
    posts: Tuple[PostRecord, ...]
    profiles: Dict[str, ProfileRecord]
    n_windows: int
    window_seconds: float

    def posts_in(self, window: int) -> List[PostRecord]:
        return [post for post in self.posts if post.window_index == window]


@dataclass(frozen=True)
class Prepared:
    """Навчальна та оціночна мережі з мітками для одного запуску."""
    train_net: TemporalNetwork
    train_labels: Dict[str, float]
    eval_net: TemporalNetwork
    eval_labels: Dict[str, float]
    eval_target: int

    def followers(self, dataset: Dataset, window: int) -> Dict[str, float]:
        return {
            influencer_id: float(dataset.profiles[influencer_id].followers_at(window))
            for influencer_id in self.eval_net.influencer_ids
        }


def load_dataset(data_dir: Path, window_seconds: float) -> Dataset:
    """
    Завантажує posts.jsonl та profiles.jsonl з каталогу даних.

    Raises:
        DataError: Якщо файлів немає
        IngestionError: Якщо записи некоректні
    """
    directory = Path(data_dir)
    for name in ("posts.jsonl", "profiles.jsonl"):
        if not (directory / name).is_file():
            raise DataError(f"У каталозі даних {directory} немає файлу {name}")
    profiles = {p.influencer_id: p for p in read_profiles(directory / "profiles.jsonl")}
    posts = tuple(read_posts(directory / "posts.jsonl"))
    return _dataset(posts, profiles, window_seconds)


def dataset_from_world(world: World) -> Dataset:
    profiles = {profile.influencer_id: profile for profile in world.profiles}
    return _dataset(world.posts, profiles, world.config.window_seconds)


def _dataset(posts, profiles, window_seconds) -> Dataset:
    """Набір даних; кількість вікон визначає найпізніша публікація."""
    windows = [post.window_index for post in posts]
    n_windows = max(windows) + 1 if windows else 0
    return Dataset(tuple(posts), dict(sorted(profiles.items())), n_windows, window_seconds)


def resolve_dataset(cfg: RunConfig) -> Dataset:
    """Дані з каталогу, якщо вони є; інакше світ, згенерований за конфігурацією."""
    if (Path(cfg.paths.data_dir) / "posts.jsonl").is_file():
        return load_dataset(Path(cfg.paths.data_dir), cfg.world.window_seconds)
    return dataset_from_world(generate_world(cfg.world))


def protocol(n_windows: int, k: int) -> Tuple[range, int, range, int]:
    """
    Вікна навчання та оцінювання.

    Returns:
        (вхідні вікна навчання, ціль навчання, вхідні вікна оцінювання, ціль оцінювання)

    Raises:
        ContractError: Якщо вікон замало для історії k
    """
    if k < 1 or n_windows < k + 2:
        raise ContractError(f"Для історії {k} потрібно щонайменше {k + 2} вікон, є {n_windows}")
    train_target, eval_target = n_windows - 2, n_windows - 1
    return (range(train_target - k, train_target), train_target,
            range(eval_target - k, eval_target), eval_target)


def rebin(dataset: Dataset, first_window: int, k: int,
          factor: float) -> Tuple[List[PostRecord], Dict[str, ProfileRecord], int]:
    """
    Перерозбиває вхідний проміжок з k базових вікон на вікна довжини factor.

    Вікна вирівнюються до кінця проміжку, перше вікно обрізається його
    початком. Кожна публікація проміжку потрапляє рівно в одне нове вікно,
    тож загальна кількість публікацій зберігається. Підписники нового
    вікна беруться з базового вікна, у якому воно починається.

    Returns:
        (публікації з новими номерами вікон, профілі з новими підписниками,
         кількість нових вікон)
    """
    if factor <= 0:
        raise ContractError(f"Множник довжини вікна повинен бути додатним: {factor}")
    length = dataset.window_seconds * factor
    start = first_window * dataset.window_seconds
    end = (first_window + k) * dataset.window_seconds
    n_bins = max(1, int(round(k / factor)))

    posts = []
    for post in dataset.posts:
        if not first_window <= post.window_index < first_window + k:
            continue
        from_end = int(np.ceil((end - post.timestamp) / length)) - 1
        index = min(max(n_bins - 1 - from_end, 0), n_bins - 1)
        posts.append(replace(post, window_index=index))

    bin_starts = [max(start, end - (n_bins - b) * length) for b in range(n_bins)]
    base_windows = [min(int(s // dataset.window_seconds), first_window + k - 1) for s in bin_starts]
    profiles = {
        influencer_id: replace(profile, followers_by_window=tuple(
            profile.followers_at(w) for w in base_windows
        ))
        for influencer_id, profile in dataset.profiles.items()
    }
    return posts, profiles, n_bins


def build_network(posts: Sequence[PostRecord], profiles: Mapping[str, ProfileRecord],
                  windows: Sequence[int], variant: str = "full",
                  min_freq: float = 0.01) -> TemporalNetwork:
    """
    Будує вирівняну часову мережу для вікон з урахуванням варіанта абляції.

    Args:
        posts: Публікації (можуть містити й інші вікна)
        profiles: Профілі інфлюенсерів
        windows: Вхідні вікна в хронологічному порядку
        variant: Назва варіанта, зокрема drop-node-kind:* та drop-feature:*
        min_freq: Поріг нормованої частоти ребра

    Returns:
        Часова мережа з масштабованими ознаками
    """
    kind, argument = parse_variant(variant)
    by_window: Dict[int, List[PostRecord]] = {w: [] for w in windows}
    for post in posts:
        if post.window_index in by_window:
            by_window[post.window_index].append(post)

    snapshots = []
    for window in windows:
        snapshot = prune(build_snapshot(by_window[window], profiles, window), min_freq)
        if kind == "drop-node-kind":
            snapshot = drop_kind(snapshot, NodeKind.parse(argument))
        snapshots.append(snapshot)

    net = align(snapshots)
    net = net.map_features(lambda x: scale_columns(x, net.influencer_rows))
    if kind == "drop-feature":
        net = net.map_features(lambda x: zero_category(x, argument))
    return net


def model_variant(variant: str) -> ModelVariant:
    kind, _ = parse_variant(variant)
    if kind in ("drop-node-kind", "drop-feature"):
        return ModelVariant.FULL
    return ModelVariant.parse(kind)


def prepare(cfg: RunConfig, dataset: Dataset, variant: Optional[str] = None,
            history: Optional[int] = None, factor: float = 1.0) -> Prepared:
    """
    Готує навчальну та оціночну мережі за протоколом вікон.

    Args:
        cfg: Конфігурація запуску
        dataset: Набір даних
        variant: Варіант абляції (за замовчуванням cfg.variant)
        history: Скоротити історію до n останніх знімків
        factor: Множник довжини вікна для перерозбиття вхідного проміжку

    Returns:
        Prepared з мережами та мітками цільових вікон
    """
    variant = variant if variant is not None else cfg.variant
    k = cfg.train.window_length
    train_windows, train_target, eval_windows, eval_target = protocol(dataset.n_windows, k)

    def network(windows: range) -> TemporalNetwork:
        if factor == 1.0:
            return build_network(dataset.posts, dataset.profiles, list(windows),
                                 variant, cfg.train.min_freq)
        posts, profiles, n_bins = rebin(dataset, windows.start, k, factor)
        return build_network(posts, profiles, list(range(n_bins)), variant, cfg.train.min_freq)

    train_net, eval_net = network(train_windows), network(eval_windows)
    if history is not None:
        train_net, eval_net = train_net.truncate(history), eval_net.truncate(history)
    return Prepared(
        train_net=train_net,
        train_labels=window_engagement(dataset.posts, dataset.profiles, train_target),
        eval_net=eval_net,
        eval_labels=window_engagement(dataset.posts, dataset.profiles, eval_target),
        eval_target=eval_target,
    )
