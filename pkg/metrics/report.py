"""
Модуль запису звітів метрик у CSV.

Усі рядки звіту проходять через один об'єкт ReportWriter, який
серіалізує додавання рядків блокуванням. Кожен рядок містить повну
розв'язану конфігурацію запуску у вигляді JSON.
"""

import json
import threading
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import pandas as pd

from core.errors import DataError


class ReportWriter:
    """
    Накопичувач рядків звіту.

    Атрибути:
        path: Файл CSV, у який записується звіт
        config: Розв'язана конфігурація, що додається до кожного рядка
        rows: Накопичені рядки у порядку додавання
    """

    def __init__(self, path: Path, config: Optional[Mapping[str, Any]] = None,
                 append: bool = False):
        self.path = Path(path)
        self.append = append
        self.config = json.dumps(config or {}, sort_keys=True)
        self.rows: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def add(self, run_id: str, label: str, seed: int, metrics: Mapping[str, float],
            **extra: Any):
        """
        Додає рядок звіту.

        Args:
            run_id: Ідентифікатор запуску
            label: Мітка рядка (варіант, страта, налаштування перебору)
            seed: Зерно, з яким отримано рядок
            metrics: Значення метрик
            extra: Додаткові стовпці (наприклад, значення осі перебору)
        """
        row = {"run_id": run_id, "label": label, "seed": seed, **extra, **metrics}
        row["config"] = self.config
        with self._lock:
            self.rows.append(row)

    def add_median(self, run_id: str, label: str, rows: Sequence[Mapping[str, float]],
                   keys: Sequence[str], **extra: Any):
        """Додає рядок медіан метрик за кількома зернами."""
        frame = pd.DataFrame([{key: row[key] for key in keys} for row in rows])
        self.add(run_id, label, -1, frame.median().to_dict(), **extra)

    def frame(self) -> pd.DataFrame:
        with self._lock:
            frame = pd.DataFrame(self.rows)
        if "config" in frame.columns:
            frame = frame[[c for c in frame.columns if c != "config"] + ["config"]]
        return frame

    def write(self) -> Path:
        """
        Записує накопичені рядки у файл.

        Raises:
            DataError: Якщо файл не вдалося записати
        """
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            frame = self.frame()
            if self.append and self.path.is_file():
                frame = pd.concat([read_report(self.path), frame], ignore_index=True)
            frame.to_csv(self.path, index=False)
        except OSError as e:
            raise DataError(f"Не вдалося записати звіт {self.path}: {e}") from e
        return self.path


def read_report(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except OSError as e:
        raise DataError(f"Не вдалося прочитати звіт {path}: {e}") from e
