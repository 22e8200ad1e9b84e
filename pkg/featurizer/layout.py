"""
Модуль опису розкладки вектора ознак вузла.

Вектор ознак має ширину 67 і складається з шести послідовних
неперетинних зрізів: тип вузла, профіль, зображення, текст, публікаційна
поведінка та реакція аудиторії. Статистичні ознаки агрегуються чотирма
значеннями: середнім, медіаною, мінімумом та максимумом.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from core.records import INFLUENCER_CATEGORIES, POST_CATEGORIES, NodeKind


AGGREGATIONS: Tuple[str, ...] = ("avg", "median", "min", "max")
IMAGE_FIELDS: Tuple[str, ...] = ("brightness", "colorfulness", "color_temperature")
TEXT_FIELDS: Tuple[str, ...] = ("n_hashtags", "n_usertags", "n_emojis", "length", "sentiment")
PROFILE_COUNTS: Tuple[str, ...] = ("followers", "followees", "posts")


@dataclass(frozen=True)
class FeatureLayout:
    """
    Іменовані зрізи вектора ознак.

    Атрибути:
        categories: Пари (назва категорії, ширина) у порядку розміщення
    """
    categories: Tuple[Tuple[str, int], ...] = (
        ("node_type", len(NodeKind)),
        ("profile", len(PROFILE_COUNTS) + len(INFLUENCER_CATEGORIES)),
        ("image", len(IMAGE_FIELDS) * len(AGGREGATIONS)),
        ("text", len(TEXT_FIELDS) * len(AGGREGATIONS)),
        ("posting", len(POST_CATEGORIES) + 2 + len(AGGREGATIONS)),
        ("reaction", len(AGGREGATIONS)),
    )

    @property
    def width(self) -> int:
        return sum(size for _, size in self.categories)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.categories)

    def slice(self, name: str) -> slice:
        """
        Повертає зріз категорії ознак за її назвою.

        Raises:
            ValueError: Якщо категорію з такою назвою не визначено
        """
        start = 0
        for category, size in self.categories:
            if category == name:
                return slice(start, start + size)
            start += size
        raise ValueError(
            f"Невідома категорія ознак: {name}. Доступні варіанти: {', '.join(self.names)}"
        )

    def profile_count_columns(self) -> slice:
        start = self.slice("profile").start
        return slice(start, start + len(PROFILE_COUNTS))

    def category_column(self, category: str) -> int:
        return self.profile_count_columns().stop + INFLUENCER_CATEGORIES.index(category)

    def unbounded_columns(self) -> List[int]:
        """
        Стовпці без природних меж: характеристики зображень, текстові
        лічильники та довжина, інтервали між публікаціями.
        """
        image = self.slice("image")
        text = self.slice("text")
        posting = self.slice("posting")
        sentiment_width = len(AGGREGATIONS)
        columns = list(range(image.start, image.stop))
        columns += list(range(text.start, text.stop - sentiment_width))
        columns += list(range(posting.stop - len(AGGREGATIONS), posting.stop))
        return columns

    def describe(self) -> Dict[str, object]:
        """Серіалізовний опис розкладки для метаданих контрольної точки."""
        return {
            "width": self.width,
            "categories": [[name, size] for name, size in self.categories],
            "aggregations": list(AGGREGATIONS),
            "node_kinds": [kind.value for kind in NodeKind],
            "influencer_categories": list(INFLUENCER_CATEGORIES),
            "post_categories": list(POST_CATEGORIES),
            "image_fields": list(IMAGE_FIELDS),
            "text_fields": list(TEXT_FIELDS),
        }


DEFAULT_LAYOUT = FeatureLayout()
