"""
Модуль оптимізатора Adam із корекцією зміщення моментів.

Крок оптимізатора є чистою функцією: він не змінює переданих параметрів
або стану, а повертає нові словники. Це робить два запуски з однакового
стану побітово ідентичними.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from core.errors import ContractError, ShapeError


Params = Dict[str, np.ndarray]


@dataclass
class AdamState:
    """
    Стан оптимізатора Adam.

    Атрибути:
        first_moment: Накопичувачі першого моменту для кожного параметра
        second_moment: Накопичувачі другого моменту для кожного параметра
        step: Кількість виконаних кроків
        beta1: Коефіцієнт згасання першого моменту
        beta2: Коефіцієнт згасання другого моменту
        eps: Стала стабілізації знаменника
    """
    first_moment: Params = field(default_factory=dict)
    second_moment: Params = field(default_factory=dict)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: Params) -> "AdamState":
        """Створює нульовий стан із формами, що збігаються з параметрами."""
        return cls(
            first_moment={name: np.zeros_like(value) for name, value in params.items()},
            second_moment={name: np.zeros_like(value) for name, value in params.items()},
        )


def adam_step(params: Params, grads: Params, state: AdamState,
              lr: float) -> Tuple[Params, AdamState]:
    """
    Виконує один крок Adam для всіх параметрів.

    Args:
        params: Поточні значення параметрів
        grads: Градієнти з тими самими назвами та формами
        state: Поточний стан оптимізатора
        lr: Швидкість навчання; нульове значення залишає параметри незмінними

    Returns:
        Пара з оновленими параметрами та новим станом оптимізатора

    Raises:
        ShapeError: Якщо форми параметрів, градієнтів чи моментів різняться
        ContractError: Якщо швидкість навчання від'ємна
    """
    if lr < 0:
        raise ContractError(f"Швидкість навчання не може бути від'ємною: {lr}")
    if set(params) != set(grads):
        raise ShapeError("Набори параметрів і градієнтів не збігаються")

    step = state.step + 1
    correction1 = 1.0 - state.beta1 ** step
    correction2 = 1.0 - state.beta2 ** step
    new_params, first, second = {}, {}, {}
    for name in sorted(params):
        value, grad = params[name], grads[name]
        m_prev = state.first_moment.get(name, np.zeros_like(value))
        v_prev = state.second_moment.get(name, np.zeros_like(value))
        if not (value.shape == grad.shape == m_prev.shape == v_prev.shape):
            raise ShapeError(
                f"Параметр {name}: форма {value.shape}, градієнт {grad.shape}"
            )
        m = state.beta1 * m_prev + (1.0 - state.beta1) * grad
        v = state.beta2 * v_prev + (1.0 - state.beta2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + state.eps)
        first[name], second[name] = m, v

    new_state = AdamState(first, second, step, state.beta1, state.beta2, state.eps)
    return new_params, new_state
