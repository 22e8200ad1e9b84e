"""
Модуль читання та запису вхідних файлів у форматі JSON Lines.

Файл публікацій і файл профілів містять по одному JSON-об'єкту на рядок.
Помилки розбору завжди повідомляють номер рядка та ідентифікатор запису.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, TypeVar

from core.errors import DataError, IngestionError
from core.records import PostRecord, ProfileRecord


T = TypeVar("T")


def _read_jsonl(path: Path, parse: Callable[[Dict[str, Any]], T]) -> List[T]:
    """Розбирає кожен непорожній рядок; помилка містить номер рядка."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"Не вдалося прочитати файл {path}: {e}") from e

    records = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise IngestionError(f"{path}, рядок {number}: некоректний JSON ({e.msg})") from e
        if not isinstance(data, dict):
            raise IngestionError(f"{path}, рядок {number}: очікувався JSON-об'єкт")
        try:
            records.append(parse(data))
        except IngestionError as e:
            raise IngestionError(f"{path}, рядок {number}: {e}") from e
    return records


def _write_jsonl(path: Path, rows: Iterable[Dict[str, Any]]):
    """Записує рядки з відсортованими ключами, створюючи каталог."""
    text = "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataError(f"Не вдалося записати файл {path}: {e}") from e


def read_posts(path: Path) -> List[PostRecord]:
    return _read_jsonl(path, PostRecord.from_dict)


def read_profiles(path: Path) -> List[ProfileRecord]:
    """
    Читає файл профілів.

    Raises:
        DataError: Якщо файл недоступний
        IngestionError: Якщо рядок некоректний або ідентифікатор повторюється
    """
    profiles = _read_jsonl(path, ProfileRecord.from_dict)
    seen = set()
    for profile in profiles:
        if profile.influencer_id in seen:
            raise IngestionError(
                f"{path}: профіль інфлюенсера {profile.influencer_id} повторюється"
            )
        seen.add(profile.influencer_id)
    return profiles


def write_posts(path: Path, posts: Iterable[PostRecord]):
    _write_jsonl(path, (post.to_dict() for post in posts))


def write_profiles(path: Path, profiles: Iterable[ProfileRecord]):
    _write_jsonl(path, (profile.to_dict() for profile in profiles))
