"""
Модуль перевірки градієнтів скінченними різницями.

Градієнти, отримані зворотним проходом стрічки, порівнюються з
центральними скінченними різницями (f(p + eps) - f(p - eps)) / (2 eps)
для кожного елемента кожного параметра. Відносна похибка рахується зі
знаменником max(|g|, 1e-8); розбіжності, менші за абсолютний поріг шуму
обчислень з плаваючою комою, вважаються нульовими.
"""

from typing import Callable, Dict, Optional, Tuple

import numpy as np

from core.errors import ContractError
from numkit.tape import Node, Tape, backward


LossFn = Callable[[Tape, Dict[str, Node]], Node]
GradHook = Callable[[Dict[str, np.ndarray]], Dict[str, np.ndarray]]


def evaluate(params: Dict[str, np.ndarray], loss_fn: LossFn) -> Tuple[Tape, Node]:
    """Записує прямий прохід на нову стрічку і повертає її разом із вузлом втрат."""
    tape = Tape()
    nodes = {name: tape.parameter(name, value) for name, value in sorted(params.items())}
    loss = tape.mark_loss(loss_fn(tape, nodes))
    return tape, loss


def value_and_grad(params: Dict[str, np.ndarray],
                   loss_fn: LossFn) -> Tuple[float, Dict[str, np.ndarray]]:
    tape, loss = evaluate(params, loss_fn)
    return float(loss.value[0, 0]), backward(tape, loss)


def finite_diff_errors(params: Dict[str, np.ndarray], loss_fn: LossFn, eps: float = 1e-5,
                       atol: float = 1e-8,
                       grad_hook: Optional[GradHook] = None) -> Dict[str, float]:
    """
    Обчислює найбільшу відносну похибку градієнта для кожного параметра.

    Args:
        params: Значення параметрів за назвою
        loss_fn: Функція, що записує обчислення втрат на стрічку
        eps: Крок скінченних різниць
        atol: Абсолютний поріг, нижче якого розбіжність вважається шумом
        grad_hook: Необов'язкове перетворення аналітичних градієнтів перед
                   порівнянням (використовується для ін'єкції помилок)

    Returns:
        Словник найбільших відносних похибок за назвою параметра

    Raises:
        ContractError: Якщо крок eps не додатний
    """
    if eps <= 0:
        raise ContractError(f"Крок скінченних різниць має бути додатним: {eps}")
    _, grads = value_and_grad(params, loss_fn)
    if grad_hook is not None:
        grads = grad_hook(grads)

    def loss_at(name: str, index, delta: float) -> float:
        shifted = {key: value.copy() for key, value in params.items()}
        shifted[name][index] += delta
        _, loss = evaluate(shifted, loss_fn)
        return float(loss.value[0, 0])

    errors = {}
    for name in sorted(params):
        worst = 0.0
        analytic = np.asarray(grads[name])
        for index in np.ndindex(params[name].shape):
            numeric = (loss_at(name, index, eps) - loss_at(name, index, -eps)) / (2.0 * eps)
            g = float(analytic[index])
            discrepancy = abs(g - numeric)
            if discrepancy <= atol:
                continue
            worst = max(worst, discrepancy / max(abs(g), 1e-8))
        errors[name] = worst
    return errors


def finite_diff_check(params: Dict[str, np.ndarray], loss_fn: LossFn, eps: float = 1e-5,
                      atol: float = 1e-8, grad_hook: Optional[GradHook] = None) -> float:
    """Повертає найбільшу відносну похибку серед усіх параметрів."""
    errors = finite_diff_errors(params, loss_fn, eps, atol, grad_hook)
    return max(errors.values(), default=0.0)
