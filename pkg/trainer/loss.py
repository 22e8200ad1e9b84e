"""
Модуль спискової функції втрат ListMLE.

Втрати дорівнюють від'ємній логарифмічній правдоподібності Плакетта-Люса
для ідеального порядку за справжньою залученістю:
Σ_i [log Σ_{j>=i} exp(ŷ_π(j)) - ŷ_π(i)]. Рівні значення залученості
впорядковуються за зростанням ідентифікатора.
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import ShapeError
from numkit import functional
from numkit import tape as ops
from numkit.tape import Node


def ideal_order(rates: Sequence[float], ids: Optional[Sequence[str]] = None) -> np.ndarray:
    """Індекси за спаданням залученості, рівні - за зростанням ідентифікатора."""
    values = np.asarray(rates, dtype=np.float64)
    keys = list(ids) if ids is not None else list(range(values.size))
    return np.array(sorted(range(values.size), key=lambda i: (-values[i], keys[i])),
                    dtype=np.intp)


def _check(size: int, rates: Sequence[float], ids: Optional[Sequence[str]]):
    if size != len(rates) or (ids is not None and len(ids) != size):
        raise ShapeError(f"Довжини оцінок ({size}) і міток ({len(rates)}) різні")
    if size < 1:
        raise ShapeError("Список для ListMLE порожній")


def listmle_loss(scores: Node, rates: Sequence[float],
                 ids: Optional[Sequence[str]] = None) -> Node:
    """
    Записує втрати ListMLE на стрічку.

    Args:
        scores: Стовпець оцінок m x 1
        rates: Справжня залученість m інфлюенсерів
        ids: Ідентифікатори для розв'язання рівностей

    Returns:
        Скалярний вузол втрат 1 x 1

    Raises:
        ShapeError: Якщо довжини не збігаються
    """
    if scores.shape[1] != 1:
        raise ShapeError(f"Оцінки мають бути стовпцем, отримано {scores.shape}")
    _check(scores.shape[0], rates, ids)
    ordered = ops.rows(scores, ideal_order(rates, ids))
    return ops.sum_all(ops.suffix_logsumexp(ordered) - ordered)


def listmle_value(scores: Sequence[float], rates: Sequence[float],
                  ids: Optional[Sequence[str]] = None) -> float:
    values = np.asarray(scores, dtype=np.float64).ravel()
    _check(values.size, rates, ids)
    ordered = values[ideal_order(rates, ids)]
    return float(np.sum(functional.suffix_logsumexp(ordered) - ordered))
