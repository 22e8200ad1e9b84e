"""
Модуль ієрархії винятків та кодів завершення програми.

Усі помилки предметної області успадковуються від InfluencerRankError і
водночас від стандартних ValueError або ArithmeticError, тому код, що
перехоплює ValueError, продовжує працювати. Головний модуль перетворює
кожен клас винятку на стабільний код завершення процесу.
"""


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3
EXIT_INTERRUPTED = 130


class InfluencerRankError(Exception):
    """Базовий клас усіх помилок конвеєра ранжування інфлюенсерів."""

    exit_code = EXIT_USAGE


class ContractError(InfluencerRankError, ValueError):
    """
    Порушення передумови операції.

    Виникає, коли аргументи функції не задовольняють задокументованому
    контракту: порожній вектор для softmax, нескалярна функція втрат,
    недостатній розмір пулу для вибірки списків тощо.
    """


class ShapeError(ContractError):
    """Невідповідність розмірностей матриць або векторів."""


class ConfigError(InfluencerRankError, ValueError):
    """Некоректна конфігурація або аргументи командного рядка."""


class IngestionError(InfluencerRankError, ValueError):
    """
    Помилка завантаження вхідних записів.

    Повідомлення завжди містить ідентифікатор проблемного запису або номер
    рядка файлу, щоб користувач міг знайти та виправити джерело даних.
    """

    exit_code = EXIT_DATA


class DataError(InfluencerRankError, OSError):
    """Відсутні або недоступні файли даних, контрольних точок чи звітів."""

    exit_code = EXIT_DATA


class NumericalError(InfluencerRankError, ArithmeticError):
    """Нескінченне значення функції втрат або провал перевірки градієнтів."""

    exit_code = EXIT_NUMERICAL
