"""
Модуль генерації синтетичних світів інфлюенсерів.

Латентна якість кожного інфлюенсера змінюється за процесом AR(1). У
кожному вікні частина хештегів та об'єктів зображень стає трендовою;
множина трендів зсувається на половину свого розміру від вікна до вікна,
тож сусідні вікна мають спільні тренди. Інфлюенсер отримує прибавку до
якості пропорційно тематичній спорідненості з трендами вікна: частці
трендових сутностей у темах, зважених його сумішшю тем.

Світ із rho = 1 і нульовим шумом статичний: підписники та тренди
залишаються такими, як у вікні 0, тому залученість стала в усіх вікнах.

Кількість вподобань публікації:
    likes = round(f · engagement_scale · sigmoid(q + boost) · LogNormal(0, noise))

Вподобання не потрапляють до ознак, тому якість проявляється в
спостережуваних величинах: тональності коментарів, частці відповідей
інфлюенсера і, слабко, кількості публікацій.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import special

from config import WorldConfig
from core.errors import ContractError, DataError
from core.records import (
    INFLUENCER_CATEGORIES,
    POST_CATEGORIES,
    CaptionStats,
    ImageRecord,
    PostRecord,
    ProfileRecord,
)
from hetnet.ingest import read_posts, read_profiles, write_posts, write_profiles
from metrics.engagement import engagement_rate


MIN_FOLLOWERS = 1e3
MAX_FOLLOWERS = 1e6


@dataclass(frozen=True)
class World:
    """
    Синтетичний світ.

    Атрибути:
        config: Конфігурація генерації
        profiles: Профілі інфлюенсерів у порядку ідентифікаторів
        posts: Усі публікації, впорядковані за вікном, інфлюенсером і часом
        quality: Латентна якість q, матриця n_influencers x n_windows
        boost: Прибавка від трендових сутностей, та сама форма
        engagement: Справжня залученість, та сама форма
        trending: Трендові сутності кожного вікна
    """
    config: WorldConfig
    profiles: Tuple[ProfileRecord, ...]
    posts: Tuple[PostRecord, ...]
    quality: np.ndarray
    boost: np.ndarray
    engagement: np.ndarray
    trending: Tuple[Tuple[str, ...], ...]

    @property
    def influencer_ids(self) -> Tuple[str, ...]:
        return tuple(profile.influencer_id for profile in self.profiles)

    @property
    def n_windows(self) -> int:
        return self.quality.shape[1]

    def engagement_at(self, window: int) -> Dict[str, float]:
        self._check_window(window)
        return {i: float(self.engagement[row, window]) for row, i in enumerate(self.influencer_ids)}

    def posts_in(self, window: int) -> List[PostRecord]:
        return [post for post in self.posts if post.window_index == window]

    def _check_window(self, window: int):
        if not 0 <= window < self.n_windows:
            raise ContractError(f"Вікно {window} поза межами [0, {self.n_windows})")


def _vocabulary(prefix: str, size: int) -> List[str]:
    width = len(str(max(size - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(size)]


def _topics(rng: np.random.Generator, vocab: Sequence[str], n_topics: int) -> List[np.ndarray]:
    # кожна сутність належить одній-двом темам
    primary = rng.integers(0, n_topics, size=len(vocab))
    secondary = rng.integers(0, n_topics, size=len(vocab))
    shared = rng.random(len(vocab)) < 0.25
    topics = []
    for topic in range(n_topics):
        members = np.flatnonzero((primary == topic) | (shared & (secondary == topic)))
        if members.size == 0:
            members = np.array([topic % len(vocab)])
        topics.append(members)
    return topics


def trending_sets(cfg: WorldConfig, pool: Sequence[str]) -> Tuple[Tuple[str, ...], ...]:
    """Ковзні множини трендів зі зсувом на половину розміру; статичний світ їх не зсуває."""
    size = min(cfg.n_trending, len(pool))
    step = 0 if cfg.is_static else max(size // 2, 1)
    return tuple(
        tuple(sorted(pool[(t * step + j) % len(pool)] for j in range(size)))
        for t in range(cfg.n_windows)
    )


def _quality(cfg: WorldConfig, rng: np.random.Generator) -> np.ndarray:
    quality = np.zeros((cfg.n_influencers, cfg.n_windows))
    quality[:, 0] = rng.standard_normal(cfg.n_influencers)
    innovation = np.sqrt(1.0 - cfg.rho ** 2)
    for t in range(1, cfg.n_windows):
        quality[:, t] = cfg.rho * quality[:, t - 1] + innovation * rng.standard_normal(cfg.n_influencers)
    return quality


def _affinity(mixtures: np.ndarray, topics: Sequence[np.ndarray], pool_index: Dict[str, int],
              hot: Sequence[str]) -> np.ndarray:
    """
    Спорідненість інфлюенсерів із трендами вікна.

    Args:
        mixtures: Суміші тем, n_influencers x n_topics
        topics: Члени кожної теми як індекси в спільному словнику сутностей
        pool_index: Індекс сутності в спільному словнику
        hot: Трендові сутності вікна

    Returns:
        Вектор у [0, 1]: частка трендових членів теми, усереднена за сумішшю
    """
    is_hot = np.zeros(len(pool_index), dtype=bool)
    is_hot[[pool_index[entity] for entity in hot]] = True
    hot_share = np.array([is_hot[members].mean() for members in topics])
    return mixtures @ hot_share


def _draw(rng: np.random.Generator, vocab: Sequence[str], members: np.ndarray,
          low: int, high: int) -> Tuple[str, ...]:
    count = min(int(rng.integers(low, high + 1)), members.size)
    chosen = rng.choice(members, size=count, replace=False)
    return tuple(vocab[i] for i in sorted(chosen))


def generate_world(cfg: WorldConfig) -> World:
    """
    Генерує синтетичний світ за конфігурацією.

    Глобальні величини (підписники, теми, якість) беруться з генератора
    зерна; публікації кожної пари (вікно, інфлюенсер) - з власного
    підпотоку, тому результат не залежить від порядку обходу.

    Args:
        cfg: Конфігурація світу

    Returns:
        Світ із профілями, публікаціями та справжньою залученістю
    """
    rng = np.random.default_rng(cfg.seed)
    ids = _vocabulary("u", cfg.n_influencers)
    hashtags = _vocabulary("#h", cfg.n_hashtags)
    objects = _vocabulary("o", cfg.n_objects)
    users = _vocabulary("m", cfg.n_other_users)

    base_followers = np.exp(rng.uniform(np.log(MIN_FOLLOWERS), np.log(MAX_FOLLOWERS),
                                        size=cfg.n_influencers))
    growth = rng.uniform(-0.01, 0.03, size=cfg.n_influencers)
    if cfg.is_static:
        growth = np.zeros_like(growth)
    categories = rng.integers(0, len(INFLUENCER_CATEGORIES), size=cfg.n_influencers)
    followees = rng.integers(50, 2000, size=cfg.n_influencers)
    total_posts = rng.integers(100, 3000, size=cfg.n_influencers)
    mixtures = rng.dirichlet(np.full(cfg.n_topics, 0.3), size=cfg.n_influencers)
    category_bias = rng.dirichlet(np.ones(len(POST_CATEGORIES)), size=len(INFLUENCER_CATEGORIES))

    hashtag_topics = _topics(rng, hashtags, cfg.n_topics)
    object_topics = _topics(rng, objects, cfg.n_topics)
    user_topics = _topics(rng, users, cfg.n_topics)
    pool = [str(entity) for entity in rng.permutation(hashtags + objects)]
    trending = trending_sets(cfg, pool)
    quality = _quality(cfg, rng)

    # тема охоплює свої хештеги та об'єкти в спільному словнику
    pool_index = {entity: i for i, entity in enumerate(hashtags + objects)}
    entity_topics = [
        np.concatenate([tags, len(hashtags) + labels])
        for tags, labels in zip(hashtag_topics, object_topics)
    ]
    boost = np.stack([
        cfg.trending_boost * _affinity(mixtures, entity_topics, pool_index, trending[t])
        for t in range(cfg.n_windows)
    ], axis=1)

    profiles = []
    for row, influencer_id in enumerate(ids):
        followers = tuple(
            max(1, int(round(base_followers[row] * (1.0 + growth[row]) ** t)))
            for t in range(cfg.n_windows)
        )
        profiles.append(ProfileRecord(
            influencer_id=influencer_id,
            followers_by_window=followers,
            followees=int(followees[row]),
            total_posts=int(total_posts[row]),
            category=INFLUENCER_CATEGORIES[categories[row]],
        ))

    posts: List[PostRecord] = []
    engagement = np.zeros_like(quality)
    for t in range(cfg.n_windows):
        hot = set(trending[t])
        for row, influencer_id in enumerate(ids):
            stream = np.random.default_rng([cfg.seed, 1 + t, row])
            q = quality[row, t]
            n_posts = 1 + int(stream.poisson(max(cfg.posts_per_window * np.exp(0.2 * q) - 1.0, 0.0)))
            offsets = np.sort(stream.uniform(0.0, cfg.window_seconds, size=n_posts))

            drafts = []
            for offset in offsets:
                topic = int(stream.choice(cfg.n_topics, p=mixtures[row]))
                tags = _draw(stream, hashtags, hashtag_topics[topic], 1, 3)
                labels = _draw(stream, objects, object_topics[topic], 1, 2)
                mentions = _draw(stream, users, user_topics[topic], 0, 2)
                drafts.append((offset, tags, labels, mentions, bool(hot & set(tags + labels))))

            followers = profiles[row].followers_at(t)
            mean_likes = followers * cfg.engagement_scale * special.expit(q + boost[row, t])

            likes = []
            for offset, tags, labels, mentions, is_hot in drafts:
                noise = np.exp(cfg.noise * stream.standard_normal()) if cfg.noise > 0 else 1.0
                count = int(round(mean_likes * noise))
                likes.append(count)
                n_comments = 1 + int(stream.poisson(3.0))
                mood = np.tanh(0.6 * q + (0.4 if is_hot else 0.0))
                comments = np.clip(mood + 0.3 * stream.standard_normal(n_comments), -1.0, 1.0)
                posts.append(PostRecord(
                    influencer_id=influencer_id,
                    window_index=t,
                    likes=count,
                    hashtags=tags,
                    mentions=mentions,
                    image_objects=labels,
                    image=ImageRecord(
                        brightness=float(stream.uniform(60.0, 200.0)),
                        colorfulness=float(stream.uniform(10.0, 90.0)),
                        color_temperature=float(stream.uniform(3000.0, 9000.0)),
                    ),
                    caption_stats=CaptionStats(
                        n_hashtags=len(tags),
                        n_usertags=len(mentions),
                        n_emojis=int(stream.poisson(2.0)),
                        length=int(stream.integers(20, 300)),
                        sentiment=float(np.clip(0.1 + 0.3 * stream.standard_normal(), -1.0, 1.0)),
                    ),
                    post_category=POST_CATEGORIES[int(stream.choice(
                        len(POST_CATEGORIES), p=category_bias[categories[row]]
                    ))],
                    is_ad=bool(stream.random() < 0.1),
                    has_influencer_reply=bool(stream.random() < special.expit(q)),
                    timestamp=float(t * cfg.window_seconds + offset),
                    comment_sentiments=tuple(float(v) for v in comments),
                ))
            engagement[row, t] = engagement_rate(likes, followers)

    return World(cfg, tuple(profiles), tuple(posts), quality, boost, engagement, trending)


def planted_ideal_ranking(world: World, window: int) -> List[str]:
    """
    Ідеальне ранжування вікна: спадання залученості, рівні за зростанням id.

    Raises:
        ContractError: Якщо вікно поза межами світу
    """
    rates = world.engagement_at(window)
    return sorted(rates, key=lambda i: (-rates[i], i))


def save_world(world: World, directory: Path) -> Dict[str, Path]:
    """
    Записує світ у каталог: posts.jsonl, profiles.jsonl, truth.jsonl, world.json.

    Raises:
        DataError: Якщо каталог недоступний для запису
    """
    directory = Path(directory)
    paths = {
        "posts": directory / "posts.jsonl",
        "profiles": directory / "profiles.jsonl",
        "truth": directory / "truth.jsonl",
        "world": directory / "world.json",
    }
    write_posts(paths["posts"], world.posts)
    write_profiles(paths["profiles"], world.profiles)
    truth = []
    for row, influencer_id in enumerate(world.influencer_ids):
        for t in range(world.n_windows):
            truth.append(json.dumps({
                "influencer_id": influencer_id,
                "window": t,
                "engagement_rate": float(world.engagement[row, t]),
                "quality": float(world.quality[row, t]),
                "boost": float(world.boost[row, t]),
            }, sort_keys=True))
    meta = {"config": asdict(world.config), "trending": [list(s) for s in world.trending]}
    try:
        paths["truth"].write_text("".join(line + "\n" for line in truth), encoding="utf-8")
        paths["world"].write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n",
                                  encoding="utf-8")
    except OSError as e:
        raise DataError(f"Не вдалося записати світ у {directory}: {e}") from e
    return paths


def load_world(directory: Path) -> World:
    """
    Читає світ, записаний save_world.

    Raises:
        DataError: Якщо файли відсутні
    """
    directory = Path(directory)
    profiles = tuple(sorted(read_profiles(directory / "profiles.jsonl"),
                            key=lambda profile: profile.influencer_id))
    posts = tuple(read_posts(directory / "posts.jsonl"))
    try:
        meta = json.loads((directory / "world.json").read_text(encoding="utf-8"))
        lines = (directory / "truth.jsonl").read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"Не вдалося прочитати світ із {directory}: {e}") from e

    config = WorldConfig(**meta["config"])
    row_of = {profile.influencer_id: row for row, profile in enumerate(profiles)}
    shape = (len(profiles), config.n_windows)
    quality, boost, engagement = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        row, t = row_of[record["influencer_id"]], record["window"]
        quality[row, t] = record["quality"]
        boost[row, t] = record["boost"]
        engagement[row, t] = record["engagement_rate"]
    trending = tuple(tuple(s) for s in meta["trending"])
    return World(config, profiles, posts, quality, boost, engagement, trending)
