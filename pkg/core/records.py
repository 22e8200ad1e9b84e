"""
Модуль визначення типів вузлів та вхідних записів системи.

Містить перелік типів вузлів гетерогенної мережі, посилання на вузли, а
також структури записів публікацій та профілів інфлюенсерів, що надходять
із файлів у форматі JSON Lines. Кожна структура вміє відновлювати себе зі
словника з перевіркою полів і серіалізуватися назад без втрат.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from core.errors import IngestionError


INFLUENCER_CATEGORIES: Tuple[str, ...] = (
    "beauty", "family", "fashion", "fitness",
    "food", "interior", "pet", "travel",
)

POST_CATEGORIES: Tuple[str, ...] = tuple(f"p{i}" for i in range(10))


class NodeKind(Enum):
    """
    Перелік типів вузлів гетерогенної мережі.

    Значення:
        INFLUENCER: Обліковий запис інфлюенсера, єдиний тип вузла, що
                    отримує оцінку ранжування
        OTHER_USER: Інший користувач, згаданий у підписі публікації
        HASHTAG: Хештег, використаний у підписі публікації
        IMAGE_OBJECT: Мітка об'єкта, розпізнаного на зображенні
    """
    INFLUENCER = "Influencer"
    OTHER_USER = "OtherUser"
    HASHTAG = "Hashtag"
    IMAGE_OBJECT = "ImageObject"

    @property
    def index(self) -> int:
        """Порядковий номер типу, що задає позицію в one-hot ознаці."""
        return _KIND_ORDER[self]

    @property
    def is_auxiliary(self) -> bool:
        return self is not NodeKind.INFLUENCER

    @classmethod
    def parse(cls, name: str) -> "NodeKind":
        """
        Перетворює текстову назву типу на елемент переліку.

        Приймає як значення ("ImageObject"), так і ім'я елемента
        ("IMAGE_OBJECT") без урахування регістру.

        Raises:
            ValueError: Якщо назва не відповідає жодному з чотирьох типів
        """
        lowered = name.strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if lowered in (kind.value.lower(), kind.name.lower().replace("_", "")):
                return kind
        available = ", ".join(kind.value for kind in cls)
        raise ValueError(f"Невідомий тип вузла: {name}. Доступні варіанти: {available}")


_KIND_ORDER = {kind: position for position, kind in enumerate(NodeKind)}


@dataclass(frozen=True)
class NodeRef:
    """
    Глобально унікальне посилання на вузол мережі.

    Атрибути:
        kind: Тип вузла з переліку NodeKind
        key: Текстовий ідентифікатор вузла в межах свого типу
    """
    kind: NodeKind
    key: str

    def sort_key(self) -> Tuple[int, str]:
        return (self.kind.index, self.key)

    def __lt__(self, other: "NodeRef") -> bool:
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class ImageRecord:
    """
    Опис зображення публікації.

    Зображення надходить або з уже обчисленими характеристиками сприйняття
    (яскравість, колірність, колірна температура), або як сирий масив
    пікселів RGB із шириною та висотою. Рівно один із двох варіантів має
    бути заповнений.

    Атрибути:
        brightness: Яскравість у діапазоні 8-бітної яскравості
        colorfulness: Колірність за Хаслером-Зюсструнком
        color_temperature: Корельована колірна температура у кельвінах
        rgb: Сплющені 8-бітні трійки каналів R, G, B
        width: Ширина зображення в пікселях
        height: Висота зображення в пікселях
    """
    brightness: Optional[float] = None
    colorfulness: Optional[float] = None
    color_temperature: Optional[float] = None
    rgb: Optional[Tuple[int, ...]] = None
    width: Optional[int] = None
    height: Optional[int] = None

    @property
    def has_stats(self) -> bool:
        return self.brightness is not None

    @classmethod
    def from_dict(cls, data: Dict[str, Any], owner: str) -> "ImageRecord":
        if "rgb" in data:
            rgb = tuple(int(v) for v in data["rgb"])
            width, height = int(data["width"]), int(data["height"])
            if len(rgb) != 3 * width * height:
                raise IngestionError(
                    f"Зображення публікації інфлюенсера {owner}: довжина rgb "
                    f"{len(rgb)} не дорівнює 3 x {width} x {height}"
                )
            if any(v < 0 or v > 255 for v in rgb):
                raise IngestionError(
                    f"Зображення публікації інфлюенсера {owner}: канали мають бути 8-бітними"
                )
            return cls(rgb=rgb, width=width, height=height)
        try:
            return cls(
                brightness=float(data["brightness"]),
                colorfulness=float(data["colorfulness"]),
                color_temperature=float(data["color_temperature"]),
            )
        except KeyError as e:
            raise IngestionError(
                f"Зображення публікації інфлюенсера {owner}: відсутнє поле {e}"
            ) from e

    def to_dict(self) -> Dict[str, Any]:
        if self.rgb is not None:
            return {"rgb": list(self.rgb), "width": self.width, "height": self.height}
        return {
            "brightness": self.brightness,
            "colorfulness": self.colorfulness,
            "color_temperature": self.color_temperature,
        }


def _flag(value: Any, name: str) -> bool:
    """Логічне поле: true/false JSON або рядок "true"/"false"."""
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise ValueError(f"поле {name} повинно бути логічним, отримано {value!r}")


@dataclass(frozen=True)
class CaptionStats:
    """
    Попередньо обчислені текстові характеристики підпису публікації.

    Атрибути:
        n_hashtags: Кількість хештегів у підписі
        n_usertags: Кількість згадок користувачів
        n_emojis: Кількість емодзі
        length: Довжина підпису в символах
        sentiment: Тональність підпису в діапазоні [-1, 1]
    """
    n_hashtags: int = 0
    n_usertags: int = 0
    n_emojis: int = 0
    length: int = 0
    sentiment: float = 0.0

    def as_tuple(self) -> Tuple[float, ...]:
        return (
            float(self.n_hashtags), float(self.n_usertags), float(self.n_emojis),
            float(self.length), float(self.sentiment),
        )


@dataclass(frozen=True)
class PostRecord:
    """
    Запис однієї публікації інфлюенсера у певному часовому вікні.

    Атрибути:
        influencer_id: Ідентифікатор автора публікації
        window_index: Номер часового вікна, до якого належить публікація
        likes: Кількість вподобань (використовується лише для цільових
               значень і ніколи не потрапляє до ознак вузлів)
        hashtags: Хештеги підпису
        mentions: Згадані користувачі
        image_objects: Мітки об'єктів, розпізнаних на зображенні
        image: Опис зображення
        caption_stats: Текстові характеристики підпису
        post_category: Одна з десяти категорій публікацій
        is_ad: Чи є публікація рекламною
        has_influencer_reply: Чи відповів інфлюенсер на коментарі
        timestamp: Час публікації в секундах
        comment_sentiments: Тональності коментарів аудиторії
    """
    influencer_id: str
    window_index: int
    likes: int
    hashtags: Tuple[str, ...] = ()
    mentions: Tuple[str, ...] = ()
    image_objects: Tuple[str, ...] = ()
    image: ImageRecord = field(default_factory=lambda: ImageRecord(128.0, 0.0, 6504.0))
    caption_stats: CaptionStats = field(default_factory=CaptionStats)
    post_category: str = POST_CATEGORIES[0]
    is_ad: bool = False
    has_influencer_reply: bool = False
    timestamp: float = 0.0
    comment_sentiments: Tuple[float, ...] = ()

    def entities(self) -> Tuple[NodeRef, ...]:
        """
        Повертає множину допоміжних вузлів, згаданих у публікації.

        Повторне використання того самого хештегу в одній публікації
        враховується один раз, тому кожна пара (публікація, сутність)
        додає до ребра рівно одиницю.
        """
        refs = {NodeRef(NodeKind.HASHTAG, tag) for tag in self.hashtags}
        refs.update(NodeRef(NodeKind.OTHER_USER, user) for user in self.mentions)
        refs.update(NodeRef(NodeKind.IMAGE_OBJECT, label) for label in self.image_objects)
        return tuple(sorted(refs))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PostRecord":
        """
        Відновлює запис публікації зі словника формату JSON Lines.

        Args:
            data: Розібраний рядок файлу публікацій

        Returns:
            Перевірений запис публікації

        Raises:
            IngestionError: Якщо відсутні обов'язкові поля або значення
                            виходять за допустимі межі
        """
        owner = str(data.get("influencer_id", "<невідомий>"))
        try:
            caption = data.get("caption_stats", {})
            post = cls(
                influencer_id=str(data["influencer_id"]),
                window_index=int(data["window_index"]),
                likes=int(data["likes"]),
                hashtags=tuple(str(v) for v in data.get("hashtags", ())),
                mentions=tuple(str(v) for v in data.get("mentions", ())),
                image_objects=tuple(str(v) for v in data.get("image_objects", ())),
                image=ImageRecord.from_dict(data["image"], owner),
                caption_stats=CaptionStats(
                    n_hashtags=int(caption.get("n_hashtags", 0)),
                    n_usertags=int(caption.get("n_usertags", 0)),
                    n_emojis=int(caption.get("n_emojis", 0)),
                    length=int(caption.get("length", 0)),
                    sentiment=float(caption.get("sentiment", 0.0)),
                ),
                post_category=str(data["post_category"]),
                is_ad=_flag(data.get("is_ad", False), "is_ad"),
                has_influencer_reply=_flag(data.get("has_influencer_reply", False),
                                           "has_influencer_reply"),
                timestamp=float(data["timestamp"]),
                comment_sentiments=tuple(float(v) for v in data.get("comment_sentiments", ())),
            )
        except KeyError as e:
            raise IngestionError(f"Публікація інфлюенсера {owner}: відсутнє поле {e}") from e
        except (TypeError, ValueError) as e:
            if isinstance(e, IngestionError):
                raise
            raise IngestionError(f"Публікація інфлюенсера {owner}: {e}") from e
        post.validate()
        return post

    def validate(self) -> None:
        owner = self.influencer_id
        if self.likes < 0:
            raise IngestionError(f"Публікація інфлюенсера {owner}: від'ємна кількість вподобань")
        if self.window_index < 0:
            raise IngestionError(f"Публікація інфлюенсера {owner}: від'ємний номер вікна")
        if self.post_category not in POST_CATEGORIES:
            raise IngestionError(
                f"Публікація інфлюенсера {owner}: невідома категорія {self.post_category}"
            )
        sentiments = (self.caption_stats.sentiment,) + self.comment_sentiments
        if any(not math.isfinite(s) or abs(s) > 1.0 for s in sentiments):
            raise IngestionError(
                f"Публікація інфлюенсера {owner}: тональність поза межами [-1, 1]"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "influencer_id": self.influencer_id,
            "window_index": self.window_index,
            "likes": self.likes,
            "hashtags": list(self.hashtags),
            "mentions": list(self.mentions),
            "image_objects": list(self.image_objects),
            "image": self.image.to_dict(),
            "caption_stats": {
                "n_hashtags": self.caption_stats.n_hashtags,
                "n_usertags": self.caption_stats.n_usertags,
                "n_emojis": self.caption_stats.n_emojis,
                "length": self.caption_stats.length,
                "sentiment": self.caption_stats.sentiment,
            },
            "post_category": self.post_category,
            "is_ad": self.is_ad,
            "has_influencer_reply": self.has_influencer_reply,
            "timestamp": self.timestamp,
            "comment_sentiments": list(self.comment_sentiments),
        }


@dataclass(frozen=True)
class ProfileRecord:
    """
    Профіль інфлюенсера.

    Атрибути:
        influencer_id: Унікальний ідентифікатор інфлюенсера
        followers_by_window: Кількість підписників у кожному часовому вікні
        followees: Кількість облікових записів, на які підписаний інфлюенсер
        total_posts: Загальна кількість опублікованих записів
        category: Одна з восьми категорій інфлюенсерів
    """
    influencer_id: str
    followers_by_window: Tuple[int, ...]
    followees: int
    total_posts: int
    category: str

    def followers_at(self, window: int) -> int:
        """
        Повертає кількість підписників у заданому вікні.

        Вікна за межами відомої історії отримують останнє відоме значення.
        """
        if not self.followers_by_window:
            return 0
        return self.followers_by_window[min(window, len(self.followers_by_window) - 1)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProfileRecord":
        owner = str(data.get("influencer_id", "<невідомий>"))
        try:
            profile = cls(
                influencer_id=str(data["influencer_id"]),
                followers_by_window=tuple(int(v) for v in data["followers_by_window"]),
                followees=int(data["followees"]),
                total_posts=int(data["total_posts"]),
                category=str(data["category"]),
            )
        except KeyError as e:
            raise IngestionError(f"Профіль інфлюенсера {owner}: відсутнє поле {e}") from e
        except (TypeError, ValueError) as e:
            raise IngestionError(f"Профіль інфлюенсера {owner}: {e}") from e
        if profile.category not in INFLUENCER_CATEGORIES:
            raise IngestionError(
                f"Профіль інфлюенсера {owner}: невідома категорія {profile.category}"
            )
        if any(v < 0 for v in profile.followers_by_window) or profile.followees < 0 \
                or profile.total_posts < 0:
            raise IngestionError(f"Профіль інфлюенсера {owner}: від'ємні лічильники")
        return profile

    def to_dict(self) -> Dict[str, Any]:
        return {
            "influencer_id": self.influencer_id,
            "followers_by_window": list(self.followers_by_window),
            "followees": self.followees,
            "total_posts": self.total_posts,
            "category": self.category,
        }
