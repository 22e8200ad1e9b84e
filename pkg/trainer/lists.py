"""
Модуль вибірки списків інфлюенсерів для спискового ранжування.
"""

from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError


@dataclass(frozen=True)
class LabeledList:
    """
    Список інфлюенсерів з цільовою залученістю.

    Атрибути:
        ids: Різні ідентифікатори інфлюенсерів (довжина m)
        rates: Залученість кожного інфлюенсера в цільовому вікні
    """
    ids: Tuple[str, ...]
    rates: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


def sample_lists(pool: Sequence[str], m: int, n_lists: int, rng: np.random.Generator,
                 rates: Optional[Mapping[str, float]] = None) -> List[LabeledList]:
    """
    Вибирає n_lists списків по m різних інфлюенсерів.

    Усередині списку вибірка без повторень, списки вибираються незалежно.

    Args:
        pool: Ідентифікатори, доступні для вибірки
        m: Розмір списку
        n_lists: Кількість списків
        rng: Генератор випадкових чисел
        rates: Цільова залученість; без неї мітки нульові

    Returns:
        Список LabeledList довжини n_lists

    Raises:
        ContractError: Якщо в пулі менше m інфлюенсерів або m < 1
    """
    if m < 1:
        raise ContractError(f"Розмір списку повинен бути додатним: {m}")
    if len(pool) < m:
        raise ContractError(f"Пул із {len(pool)} інфлюенсерів менший за розмір списку {m}")
    if rates is not None:
        missing = [i for i in pool if i not in rates]
        if missing:
            raise ContractError(f"Немає міток для інфлюенсерів: {', '.join(missing[:5])}")

    lists = []
    for _ in range(n_lists):
        chosen = tuple(pool[i] for i in rng.choice(len(pool), size=m, replace=False))
        labels = np.array([rates[i] for i in chosen] if rates is not None else np.zeros(m),
                          dtype=np.float64)
        if np.any(labels < 0):
            raise ContractError("Залученість у мітках не може бути від'ємною")
        lists.append(LabeledList(chosen, labels))
    return lists
