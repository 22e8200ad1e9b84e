"""
Чисельно стабільні функції без запису на стрічку.

Функції працюють безпосередньо з масивами numpy у 64-бітній точності і
використовуються як прямими викликами, так і примітивами стрічки для
обчислення значень прямого проходу.
"""

import numpy as np
from scipy import special

from core.errors import ContractError


def softmax(v, axis: int = -1) -> np.ndarray:
    """
    Обчислює softmax із відніманням максимуму для стабільності.

    Args:
        v: Вектор або матриця скінченних дійсних чисел
        axis: Вісь нормування

    Returns:
        Масив додатних імовірностей, що в сумі вздовж осі дають одиницю

    Raises:
        ContractError: Якщо вхід порожній або містить нескінченні значення
    """
    values = np.asarray(v, dtype=np.float64)
    if values.size == 0:
        raise ContractError("softmax потребує непорожнього вектора")
    if not np.all(np.isfinite(values)):
        raise ContractError("softmax потребує скінченних значень")
    shifted = values - values.max(axis=axis, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=axis, keepdims=True)


def sigmoid(x) -> np.ndarray:
    return special.expit(np.asarray(x, dtype=np.float64))


def suffix_logsumexp(x) -> np.ndarray:
    """
    Обчислює зворотну кумулятивну логарифмічну суму експонент.

    Для вектора x повертає out_i = log sum_{j >= i} exp(x_j), обчислене
    послідовним logaddexp без переповнення.
    """
    values = np.asarray(x, dtype=np.float64)
    return np.logaddexp.accumulate(values[::-1], axis=0)[::-1]
