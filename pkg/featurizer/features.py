"""
Модуль обчислення ознак вузлів гетерогенної мережі.

Для кожного вузла-інфлюенсера заповнюються всі шість категорій ознак за
публікаціями поточного вікна та профілем. Допоміжні вузли (хештеги, інші
користувачі, об'єкти зображень) містять лише one-hot ознаку типу, а всі
непридатні для них ознаки дорівнюють нулю. Кількість вподобань і
коментарів ніколи не потрапляє до вектора ознак.
"""

from typing import TYPE_CHECKING, Mapping, NamedTuple, Sequence

import numpy as np

from core.records import POST_CATEGORIES, NodeKind, PostRecord, ProfileRecord
from featurizer.image import resolve_image
from featurizer.layout import DEFAULT_LAYOUT, FeatureLayout, IMAGE_FIELDS, TEXT_FIELDS

if TYPE_CHECKING:
    from hetnet.snapshot import Snapshot


class Aggregate(NamedTuple):
    avg: float
    median: float
    min: float
    max: float


def aggregate(values: Sequence[float]) -> Aggregate:
    """
    Агрегує значення середнім, медіаною, мінімумом та максимумом.

    Значення попередньо сортуються, тому результат побітово не залежить
    від порядку входу. Порожній список дає чотири нулі; медіана списку
    парної довжини дорівнює середньому двох центральних значень.

    Args:
        values: Дійсні значення, можливо порожні

    Returns:
        Четвірка (avg, median, min, max)
    """
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    if ordered.size == 0:
        return Aggregate(0.0, 0.0, 0.0, 0.0)
    return Aggregate(
        float(ordered.mean()), float(np.median(ordered)),
        float(ordered[0]), float(ordered[-1]),
    )


def one_hot_type(kind: NodeKind, layout: FeatureLayout = DEFAULT_LAYOUT) -> np.ndarray:
    row = np.zeros(layout.width)
    row[layout.slice("node_type").start + kind.index] = 1.0
    return row


def featurize_influencer(posts: Sequence[PostRecord], profile: ProfileRecord, window: int,
                         layout: FeatureLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """
    Обчислює вектор ознак інфлюенсера для одного часового вікна.

    Лічильники профілю повертаються у вигляді log(1 + x); масштабування
    мін-макс у межах знімка виконує featurize_snapshot.

    Args:
        posts: Публікації інфлюенсера у вікні
        profile: Профіль інфлюенсера
        window: Номер часового вікна для вибору кількості підписників
        layout: Розкладка вектора ознак

    Returns:
        Вектор ознак ширини layout.width
    """
    row = one_hot_type(NodeKind.INFLUENCER, layout)

    counts = layout.profile_count_columns()
    row[counts] = np.log1p([
        float(profile.followers_at(window)), float(profile.followees), float(profile.total_posts),
    ])
    row[layout.category_column(profile.category)] = 1.0

    images = [resolve_image(post.image).as_tuple() for post in posts]
    start = layout.slice("image").start
    for field_index in range(len(IMAGE_FIELDS)):
        values = [stats[field_index] for stats in images]
        row[start + 4 * field_index:start + 4 * field_index + 4] = aggregate(values)

    captions = [post.caption_stats.as_tuple() for post in posts]
    start = layout.slice("text").start
    for field_index in range(len(TEXT_FIELDS)):
        values = [caption[field_index] for caption in captions]
        row[start + 4 * field_index:start + 4 * field_index + 4] = aggregate(values)

    posting = layout.slice("posting")
    if posts:
        total = float(len(posts))
        for post in posts:
            row[posting.start + POST_CATEGORIES.index(post.post_category)] += 1.0
        row[posting.start:posting.start + len(POST_CATEGORIES)] /= total
        row[posting.start + len(POST_CATEGORIES)] = sum(post.is_ad for post in posts) / total
        row[posting.start + len(POST_CATEGORIES) + 1] = \
            sum(post.has_influencer_reply for post in posts) / total
    timestamps = np.sort([post.timestamp for post in posts])
    row[posting.stop - 4:posting.stop] = aggregate(np.diff(timestamps))

    sentiments = [s for post in posts for s in post.comment_sentiments]
    row[layout.slice("reaction")] = aggregate(sentiments)
    return row


def _min_max(column: np.ndarray) -> np.ndarray:
    """Масштабує стовпець у [0, 1]; сталий стовпець стає нульовим."""
    low, high = column.min(), column.max()
    if high == low:
        return np.zeros_like(column)
    return (column - low) / (high - low)


def featurize_snapshot(snapshot: "Snapshot", profiles: Mapping[str, ProfileRecord],
                       layout: FeatureLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """
    Складає матрицю ознак X_t для всіх вузлів знімка.

    Рядки інфлюенсерів обчислюються через featurize_influencer, рядки
    допоміжних вузлів містять лише one-hot ознаку типу. Лічильники профілю
    масштабуються мін-макс серед інфлюенсерів цього знімка.

    Args:
        snapshot: Знімок із впорядкованим списком вузлів та публікаціями
        profiles: Профілі за ідентифікатором інфлюенсера
        layout: Розкладка вектора ознак

    Returns:
        Матриця розміру N x layout.width
    """
    by_influencer = {}
    for post in snapshot.posts:
        by_influencer.setdefault(post.influencer_id, []).append(post)

    x = np.zeros((len(snapshot.nodes), layout.width))
    influencer_rows = []
    for row, node in enumerate(snapshot.nodes):
        if node.kind is NodeKind.INFLUENCER:
            x[row] = featurize_influencer(
                by_influencer.get(node.key, ()), profiles[node.key], snapshot.window, layout
            )
            influencer_rows.append(row)
        else:
            x[row] = one_hot_type(node.kind, layout)

    if influencer_rows:
        counts = layout.profile_count_columns()
        for column in range(counts.start, counts.stop):
            x[influencer_rows, column] = _min_max(x[influencer_rows, column])
    return x


def scale_columns(x: np.ndarray, influencer_rows: Sequence[int],
                  layout: FeatureLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """
    Масштабує необмежені стовпці діленням на максимальний модуль.

    Масштаб визначається лише за рядками інфлюенсерів, нулі залишаються
    нулями, тож рядки допоміжних вузлів не змінюються.
    """
    scaled = x.copy()
    rows = np.asarray(influencer_rows, dtype=np.intp)
    if rows.size == 0:
        return scaled
    for column in layout.unbounded_columns():
        peak = np.abs(scaled[rows, column]).max()
        if peak > 0:
            scaled[rows, column] /= peak
    return scaled


def zero_category(x: np.ndarray, category: str,
                  layout: FeatureLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """Обнуляє одну з шести категорій ознак для абляційного експерименту."""
    cleared = x.copy()
    cleared[:, layout.slice(category)] = 0.0
    return cleared
