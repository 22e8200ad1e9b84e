"""
Головний модуль програми ранжування інфлюенсерів.

Цей модуль забезпечує пакетний інтерфейс командного рядка: генерацію
синтетичних світів, навчання моделі на часових гетерогенних мережах,
оцінювання ранжування на відкладеному вікні, абляції, перебори довжини
вікна та історії і перевірку градієнтів.

Кожна підкоманда завершується стабільним кодом: 0 успіх, 1 помилка
використання, 2 помилка даних, 3 числовий збій, 130 переривання.
"""

import sys
from typing import List, Optional

from config import RunConfig, parse_arguments, validate_config
from core.errors import EXIT_INTERRUPTED, EXIT_OK, EXIT_USAGE, InfluencerRankError
from experiments.commands import COMMAND_HANDLERS


def print_configuration(config: RunConfig):
    """
    Виводить основні параметри запуску перед виконанням підкоманди.

    Args:
        config: Розв'язана конфігурація запуску
    """
    print(f"Підкоманда: {config.command}")
    print(f"  Зерно: {config.seed}")
    print(f"  Варіант: {config.variant}")
    print(f"  Каталог даних: {config.paths.data_dir}")
    print(f"  Каталог результатів: {config.paths.out_dir}")
    print()
    print("Параметри моделі:")
    print(f"  Шарів GCN: {config.model.gcn_layers}")
    print(f"  Прихована розмірність: {config.model.gru_hidden}")
    print(f"  Відкидання: {config.model.dropout}")
    print()
    print("Параметри навчання:")
    print(f"  Розмір списку: {config.train.list_size}")
    print(f"  Списків у пакеті: {config.train.lists_per_batch}")
    print(f"  Швидкість навчання: {config.train.lr}")
    print(f"  Епох: {config.train.epochs}")
    print(f"  Довжина історії: {config.train.window_length}")
    print()


def run(args: List[str]) -> int:
    """
    Виконує одну підкоманду та повертає код завершення.

    Args:
        args: Аргументи командного рядка без назви програми

    Returns:
        Код завершення з core.errors
    """
    config: Optional[RunConfig] = None
    try:
        config = parse_arguments(args)
        validate_config(config)
        print_configuration(config)
        return COMMAND_HANDLERS[config.command](config)

    except InfluencerRankError as e:
        print(f"Помилка: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\n\nВиконання перервано користувачем.", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception as e:
        print(f"Критична помилка: {e}", file=sys.stderr)
        if config is not None and config.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_USAGE


def main() -> int:
    """
    Головна функція програми.

    Returns:
        Код завершення: нуль при успіху, ненульовий код категорії помилки
        або сто тридцять при перериванні користувачем
    """
    try:
        return run(sys.argv[1:])
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
