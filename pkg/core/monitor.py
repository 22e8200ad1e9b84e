"""
Модуль журналювання перебігу виконання команд.

Надає об'єкт монітора, що друкує повідомлення з часовою позначкою від
початку виконання. Компоненти конвеєра отримують монітор явно як
аргумент і не звертаються до глобального стану.
"""

import sys
import time
from typing import Optional, TextIO


class RunMonitor:
    """
    Монітор виконання команди.

    Атрибути:
        verbose: Прапорець детального виведення; без нього друкуються лише
                 примусові повідомлення
        stream: Потік для виведення повідомлень
        started_at: Момент створення монітора за монотонним годинником
    """

    def __init__(self, verbose: bool = False, stream: Optional[TextIO] = None):
        self.verbose = verbose
        self.stream = stream
        self.started_at = time.perf_counter()

    def elapsed(self) -> float:
        """Повертає кількість секунд від створення монітора."""
        return time.perf_counter() - self.started_at

    def log(self, message: str, force: bool = False):
        """
        Виводить повідомлення з часом від початку виконання.

        Args:
            message: Текст повідомлення для виведення
            force: Примусовий вивід навіть у non-verbose режимі
        """
        if self.verbose or force:
            stream = self.stream if self.stream is not None else sys.stdout
            print(f"[{self.elapsed():9.3f} s] | {message}", file=stream)


SILENT = RunMonitor(verbose=False)
