"""
Модуль збереження та завантаження контрольних точок моделі.

Формат файлу:
    6 байтів      сигнатура IRCKPT
    2 байти       версія формату (little-endian)
    4 байти       довжина заголовка (little-endian)
    заголовок     JSON з конфігурацією моделі, варіантом, розкладкою ознак
                  та переліком параметрів (назва, форма) у порядку запису
    дані          значення параметрів як little-endian float64

Заголовок серіалізується з відсортованими ключами, тому однакові
параметри завжди дають побітово однаковий файл.
"""

import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict

import numpy as np

from config import ModelConfig
from core.errors import DataError
from featurizer.layout import DEFAULT_LAYOUT, FeatureLayout
from model.params import ModelVariant, Params, check_params


MAGIC = b"IRCKPT"
VERSION = 1
_PREFIX = struct.Struct("<6sHI")


@dataclass
class Checkpoint:
    """
    Вміст контрольної точки.

    Атрибути:
        params: Параметри моделі
        config: Конфігурація розмірностей
        variant: Варіант архітектури
        layout: Опис розкладки ознак
        metadata: Довільні серіалізовні дані (епоха, зерно тощо)
    """
    params: Params
    config: ModelConfig
    variant: ModelVariant = ModelVariant.FULL
    layout: Dict[str, Any] = field(default_factory=DEFAULT_LAYOUT.describe)
    metadata: Dict[str, Any] = field(default_factory=dict)


def encode(checkpoint: Checkpoint) -> bytes:
    names = sorted(checkpoint.params)
    header = json.dumps({
        "config": asdict(checkpoint.config),
        "variant": checkpoint.variant.value,
        "layout": checkpoint.layout,
        "metadata": checkpoint.metadata,
        "params": [[name, list(checkpoint.params[name].shape)] for name in names],
    }, sort_keys=True).encode("utf-8")
    payload = b"".join(
        np.ascontiguousarray(checkpoint.params[name], dtype="<f8").tobytes() for name in names
    )
    return _PREFIX.pack(MAGIC, VERSION, len(header)) + header + payload


def decode(blob: bytes, source: str = "<bytes>") -> Checkpoint:
    """
    Розбирає байти контрольної точки.

    Raises:
        DataError: Якщо сигнатура, версія або довжина даних некоректні
    """
    if len(blob) < _PREFIX.size:
        raise DataError(f"{source}: файл занадто короткий для контрольної точки")
    magic, version, header_length = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise DataError(f"{source}: файл не є контрольною точкою")
    if version != VERSION:
        raise DataError(f"{source}: непідтримувана версія формату {version}")

    start = _PREFIX.size
    try:
        header = json.loads(blob[start:start + header_length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"{source}: пошкоджений заголовок контрольної точки") from e

    offset = start + header_length
    params = {}
    for name, shape in header["params"]:
        count = int(np.prod(shape))
        end = offset + 8 * count
        if end > len(blob):
            raise DataError(f"{source}: дані параметра {name} обрізані")
        params[name] = np.frombuffer(blob[offset:end], dtype="<f8").reshape(shape).astype(np.float64)
        offset = end
    if offset != len(blob):
        raise DataError(f"{source}: зайві байти після даних параметрів")

    config = ModelConfig(**header["config"])
    variant = ModelVariant.parse(header["variant"])
    layout = FeatureLayout(tuple((name, size) for name, size in header["layout"]["categories"]))
    check_params(params, config, variant, layout.width)
    return Checkpoint(params, config, variant, header["layout"], header["metadata"])


def save_checkpoint(path: Path, checkpoint: Checkpoint):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(encode(checkpoint))
    except OSError as e:
        raise DataError(f"Не вдалося записати контрольну точку {path}: {e}") from e


def load_checkpoint(path: Path) -> Checkpoint:
    """
    Завантажує контрольну точку з файлу.

    Raises:
        DataError: Якщо файл відсутній або пошкоджений
    """
    try:
        blob = Path(path).read_bytes()
    except OSError as e:
        raise DataError(f"Не вдалося прочитати контрольну точку {path}: {e}") from e
    return decode(blob, str(path))
