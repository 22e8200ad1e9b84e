"""
Модуль характеристик сприйняття зображень.

Обчислює яскравість за коефіцієнтами Rec.601, колірність за метрикою
Хаслера-Зюсструнка та корельовану колірну температуру за апроксимацією
Мак-Камі з середньої хроматичності sRGB.
"""

from dataclasses import dataclass

import numpy as np

from core.errors import ContractError
from core.records import ImageRecord


LUMA = np.array([0.299, 0.587, 0.114])

SRGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])

D65_TEMPERATURE = 6504.0
MIN_TEMPERATURE = 1000.0
MAX_TEMPERATURE = 40000.0


@dataclass(frozen=True)
class ImageStats:
    """
    Характеристики сприйняття зображення.

    Атрибути:
        brightness: Середня яскравість у діапазоні [0, 255]
        colorfulness: Колірність, невід'ємна
        color_temperature: Корельована колірна температура в кельвінах
    """
    brightness: float
    colorfulness: float
    color_temperature: float

    def as_tuple(self):
        return (self.brightness, self.colorfulness, self.color_temperature)


def _linearize(channel: np.ndarray) -> np.ndarray:
    """Перетворює 8-бітний канал sRGB у лінійну яскравість."""
    c = channel / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def color_temperature(mean_rgb: np.ndarray) -> float:
    """
    Обчислює колірну температуру за формулою Мак-Камі.

    Середній колір sRGB лінеаризується, переводиться до CIE XYZ і далі до
    хроматичності xy. Для чорного кольору хроматичність не визначена,
    тому повертається температура білої точки D65. Результат обмежується
    діапазоном [1000, 40000] K, поза яким апроксимація не має сенсу.
    """
    xyz = SRGB_TO_XYZ @ _linearize(np.asarray(mean_rgb, dtype=np.float64))
    total = xyz.sum()
    if total <= 0:
        return D65_TEMPERATURE
    x, y = xyz[0] / total, xyz[1] / total
    if y == 0.1858:
        return MAX_TEMPERATURE
    n = (x - 0.3320) / (0.1858 - y)
    cct = 449.0 * n ** 3 + 3525.0 * n ** 2 + 6823.3 * n + 5520.33
    return float(np.clip(cct, MIN_TEMPERATURE, MAX_TEMPERATURE))


def image_stats(rgb) -> ImageStats:
    """
    Обчислює характеристики зображення з масиву пікселів.

    Args:
        rgb: Масив 8-бітних пікселів форми (n, 3), (h, w, 3) або сплющена
             послідовність трійок R, G, B

    Returns:
        Яскравість, колірність та колірна температура зображення

    Raises:
        ContractError: Якщо зображення порожнє або канали виходять за межі
                       8-бітного діапазону
    """
    pixels = np.asarray(rgb, dtype=np.float64).reshape(-1)
    if pixels.size == 0 or pixels.size % 3 != 0:
        raise ContractError("Зображення має містити непорожню послідовність трійок RGB")
    if pixels.min() < 0 or pixels.max() > 255:
        raise ContractError("Канали зображення мають бути 8-бітними")
    pixels = pixels.reshape(-1, 3)
    red, green, blue = pixels[:, 0], pixels[:, 1], pixels[:, 2]

    brightness = float((pixels @ LUMA).mean())

    rg = red - green
    yb = 0.5 * (red + green) - blue
    sigma = np.sqrt(rg.std() ** 2 + yb.std() ** 2)
    mu = np.sqrt(rg.mean() ** 2 + yb.mean() ** 2)
    colorfulness = float(sigma + 0.3 * mu)

    return ImageStats(brightness, colorfulness, color_temperature(pixels.mean(axis=0)))


def resolve_image(image: ImageRecord) -> ImageStats:
    """Повертає готові характеристики або обчислює їх із сирих пікселів."""
    if image.has_stats:
        return ImageStats(image.brightness, image.colorfulness, image.color_temperature)
    if image.rgb is None:
        raise ContractError("Запис зображення не містить ні характеристик, ні пікселів")
    return image_stats(image.rgb)
