"""
Модуль обчислення залученості аудиторії та рівнів релевантності.

Залученість інфлюенсера у вікні дорівнює середній кількості вподобань
публікацій, поділеній на кількість підписників у цьому вікні. Рівень
релевантності 0..5 визначається п'ятьма порогами залученості.
"""

from typing import Dict, Iterable, Mapping, Sequence

import numpy as np

from core.errors import ContractError
from core.records import PostRecord, ProfileRecord


# нижні межі рівнів 5, 4, 3, 2, 1
RELEVANCE_THRESHOLDS = (0.10, 0.07, 0.05, 0.03, 0.01)


def engagement_rate(likes: Sequence[int], followers: float) -> float:
    """
    Обчислює залученість: mean(likes) / followers.

    Args:
        likes: Кількості вподобань публікацій вікна
        followers: Кількість підписників у вікні

    Returns:
        Залученість; за відсутності публікацій 0

    Raises:
        ContractError: Якщо кількість підписників не додатна
    """
    if followers <= 0:
        raise ContractError(f"Кількість підписників повинна бути додатною: {followers}")
    if len(likes) == 0:
        return 0.0
    return float(np.mean(np.asarray(likes, dtype=np.float64))) / float(followers)


def relevance_level(rate: float) -> int:
    if rate < 0:
        raise ContractError(f"Залученість не може бути від'ємною: {rate}")
    for level, threshold in zip(range(5, 0, -1), RELEVANCE_THRESHOLDS):
        if rate >= threshold:
            return level
    return 0


def relevance_levels(rates: Iterable[float]) -> np.ndarray:
    return np.array([relevance_level(rate) for rate in rates], dtype=np.int64)


def window_engagement(posts: Iterable[PostRecord], profiles: Mapping[str, ProfileRecord],
                      window: int) -> Dict[str, float]:
    """
    Залученість кожного інфлюенсера з профілів у заданому вікні.

    Інфлюенсери без публікацій у вікні отримують 0.
    """
    likes: Dict[str, list] = {influencer_id: [] for influencer_id in profiles}
    for post in posts:
        if post.window_index == window and post.influencer_id in likes:
            likes[post.influencer_id].append(post.likes)
    return {
        influencer_id: engagement_rate(values, profiles[influencer_id].followers_at(window))
        for influencer_id, values in likes.items()
    }
