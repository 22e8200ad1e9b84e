"""
Модуль зворотного автоматичного диференціювання на основі стрічки.

Стрічка зберігає впорядкований список вузлів обчислювального графа. Кожен
примітив обчислює значення прямого проходу, додає на стрічку новий вузол
із посиланнями на вхідні вузли та замиканням, що перетворює градієнт
виходу на градієнти входів. Оскільки вузли додаються лише після своїх
входів, порядок стрічки вже є топологічним, і зворотний прохід просто
обходить її у зворотному порядку.

Набір примітивів фіксований: матричний добуток, добуток розрідженої
матриці на щільну, додавання, віднімання, поелементний добуток, множення
на сталу, tanh, сигмоїда, ReLU, softmax по рядках, конкатенація стовпців,
вибір рядків та стовпців, сума, логарифм і зворотна кумулятивна
логарифмічна сума експонент. Усі значення зберігаються як двовимірні
масиви 64-бітної точності; скаляр має форму 1 x 1.
"""

from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from core.errors import ContractError, ShapeError
from numkit import functional


Backward = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


def _as_matrix(value) -> np.ndarray:
    array = np.asarray(value, dtype=np.float64)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(-1, 1)
    if array.ndim != 2:
        raise ShapeError(f"Очікувалась матриця, отримано масив розмірності {array.ndim}")
    return array


def _reduce_to(grad: np.ndarray, shape) -> np.ndarray:
    # градієнт транслюваного входу сумується вздовж розтягнутих осей
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Node:
    """
    Вузол обчислювального графа на стрічці.

    Атрибути:
        tape: Стрічка, якій належить вузол
        id: Порядковий номер вузла на стрічці
        value: Значення прямого проходу (двовимірний масив)
        op: Назва примітиву, що створив вузол
        inputs: Ідентифікатори вхідних вузлів
        backward: Замикання, що повертає градієнти входів
        requires_grad: Чи залежить вузол від хоча б одного параметра
    """

    __slots__ = ("tape", "id", "value", "op", "inputs", "backward", "requires_grad")

    def __init__(self, tape: "Tape", node_id: int, value: np.ndarray, op: str,
                 inputs: Sequence[int], backward: Optional[Backward], requires_grad: bool):
        self.tape = tape
        self.id = node_id
        self.value = value
        self.op = op
        self.inputs = tuple(inputs)
        self.backward = backward
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.value.shape

    def _lift(self, other) -> "Node":
        return other if isinstance(other, Node) else self.tape.constant(other)

    def __add__(self, other):
        return add(self, self._lift(other))

    def __radd__(self, other):
        return add(self._lift(other), self)

    def __sub__(self, other):
        return sub(self, self._lift(other))

    def __rsub__(self, other):
        return sub(self._lift(other), self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, self._lift(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __matmul__(self, other):
        return matmul(self, self._lift(other))

    def __neg__(self):
        return scale(self, -1.0)

    def __repr__(self) -> str:
        return f"Node(id={self.id}, op={self.op}, shape={self.shape})"


class Tape:
    """
    Стрічка записаних примітивних операцій.

    Атрибути:
        nodes: Вузли у порядку запису (топологічний порядок)
        parameters: Зареєстровані параметри за назвою
        loss_id: Ідентифікатор вузла, позначеного коренем функції втрат
    """

    def __init__(self):
        self.nodes: List[Node] = []
        self.parameters: Dict[str, Node] = {}
        self.loss_id: Optional[int] = None

    def record(self, op: str, value, inputs: Sequence[Node],
               backward: Optional[Backward]) -> Node:
        """
        Додає на стрічку результат примітиву.

        Args:
            op: Назва примітиву
            value: Обчислене значення прямого проходу
            inputs: Вхідні вузли, що мають уже бути на цій стрічці
            backward: Замикання зворотного проходу або None для листків

        Returns:
            Новий вузол стрічки
        """
        for node in inputs:
            if node.tape is not self:
                raise ContractError(f"{op}: вхідний вузол належить іншій стрічці")
        requires_grad = any(node.requires_grad for node in inputs)
        node = Node(self, len(self.nodes), _as_matrix(value), op,
                    [n.id for n in inputs], backward if requires_grad else None,
                    requires_grad)
        self.nodes.append(node)
        return node

    def constant(self, value) -> Node:
        return self.record("constant", value, (), None)

    def parameter(self, name: str, value) -> Node:
        """
        Реєструє параметр, відносно якого обчислюються градієнти.

        Raises:
            ContractError: Якщо параметр із такою назвою вже зареєстровано
        """
        if name in self.parameters:
            raise ContractError(f"Параметр {name} уже зареєстровано на стрічці")
        node = Node(self, len(self.nodes), _as_matrix(value).copy(), "parameter", (), None, True)
        self.nodes.append(node)
        self.parameters[name] = node
        return node

    def mark_loss(self, node: Node) -> Node:
        if node.value.size != 1:
            raise ContractError(
                f"Функція втрат має бути скаляром, отримано форму {node.shape}"
            )
        self.loss_id = node.id
        return node

    def __len__(self) -> int:
        return len(self.nodes)


def backward(tape: Tape, loss: Optional[Node] = None) -> Dict[str, np.ndarray]:
    """
    Обчислює градієнти скалярної функції втрат за всіма параметрами.

    Args:
        tape: Стрічка із записаним прямим проходом
        loss: Скалярний вузол функції втрат; за відсутності береться вузол,
              позначений через mark_loss

    Returns:
        Словник градієнтів за назвою параметра; параметри, що не брали
        участі в обчисленні, отримують нульові градієнти

    Raises:
        ContractError: Якщо функція втрат не скалярна, не скінченна або
                       не позначена
    """
    if loss is None:
        if tape.loss_id is None:
            raise ContractError("На стрічці не позначено вузол функції втрат")
        loss = tape.nodes[tape.loss_id]
    tape.mark_loss(loss)
    if not np.all(np.isfinite(loss.value)):
        raise ContractError("Функція втрат має нескінченне значення")

    grads: List[Optional[np.ndarray]] = [None] * len(tape.nodes)
    grads[loss.id] = np.ones_like(loss.value)
    for node in reversed(tape.nodes[:loss.id + 1]):
        grad = grads[node.id]
        if grad is None or node.backward is None:
            continue
        for input_id, input_grad in zip(node.inputs, node.backward(grad)):
            if input_grad is None or not tape.nodes[input_id].requires_grad:
                continue
            if grads[input_id] is None:
                grads[input_id] = input_grad
            else:
                grads[input_id] = grads[input_id] + input_grad

    result = {}
    for name, node in tape.parameters.items():
        grad = grads[node.id]
        result[name] = np.zeros_like(node.value) if grad is None else grad
    return result


def _check_broadcast(op: str, a: Node, b: Node):
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise ShapeError(f"{op}: несумісні форми {a.shape} та {b.shape}") from e


def add(a: Node, b: Node) -> Node:
    _check_broadcast("add", a, b)
    return a.tape.record(
        "add", a.value + b.value, (a, b),
        lambda g: (_reduce_to(g, a.shape), _reduce_to(g, b.shape)),
    )


def sub(a: Node, b: Node) -> Node:
    _check_broadcast("sub", a, b)
    return a.tape.record(
        "sub", a.value - b.value, (a, b),
        lambda g: (_reduce_to(g, a.shape), -_reduce_to(g, b.shape)),
    )


def mul(a: Node, b: Node) -> Node:
    """Поелементний добуток із транслюванням форм."""
    _check_broadcast("mul", a, b)
    return a.tape.record(
        "mul", a.value * b.value, (a, b),
        lambda g: (_reduce_to(g * b.value, a.shape), _reduce_to(g * a.value, b.shape)),
    )


def scale(a: Node, factor: float) -> Node:
    return a.tape.record("scale", a.value * factor, (a,), lambda g: (g * factor,))


def matmul(a: Node, b: Node) -> Node:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: несумісні форми {a.shape} та {b.shape}")
    return a.tape.record(
        "matmul", a.value @ b.value, (a, b),
        lambda g: (g @ b.value.T, a.value.T @ g),
    )


def spmm(a: sp.csr_matrix, x: Node) -> Node:
    """
    Добуток сталої розрідженої матриці на вузол.

    Структура графа не навчається, тому градієнт обчислюється лише за x.
    """
    if a.shape[1] != x.shape[0]:
        raise ShapeError(f"spmm: несумісні форми {a.shape} та {x.shape}")
    transposed = a.T.tocsr()
    return x.tape.record(
        "spmm", np.asarray(a @ x.value), (x,),
        lambda g: (np.asarray(transposed @ g),),
    )


def tanh(x: Node) -> Node:
    value = np.tanh(x.value)
    return x.tape.record("tanh", value, (x,), lambda g: (g * (1.0 - value * value),))


def sigmoid(x: Node) -> Node:
    value = functional.sigmoid(x.value)
    return x.tape.record("sigmoid", value, (x,), lambda g: (g * value * (1.0 - value),))


def relu(x: Node) -> Node:
    mask = x.value > 0
    return x.tape.record("relu", np.where(mask, x.value, 0.0), (x,), lambda g: (g * mask,))


def softmax(x: Node) -> Node:
    """Softmax уздовж кожного рядка."""
    value = functional.softmax(x.value, axis=1)

    def grad_fn(g):
        return (value * (g - (g * value).sum(axis=1, keepdims=True)),)

    return x.tape.record("softmax", value, (x,), grad_fn)


def concat(nodes: Sequence[Node]) -> Node:
    """Конкатенація вузлів уздовж стовпців."""
    if not nodes:
        raise ContractError("concat потребує хоча б одного вузла")
    rows = {node.shape[0] for node in nodes}
    if len(rows) != 1:
        raise ShapeError(f"concat: різна кількість рядків {sorted(rows)}")
    bounds = np.cumsum([0] + [node.shape[1] for node in nodes])

    def grad_fn(g):
        return tuple(g[:, bounds[i]:bounds[i + 1]] for i in range(len(nodes)))

    return nodes[0].tape.record(
        "concat", np.concatenate([node.value for node in nodes], axis=1), nodes, grad_fn
    )


def rows(x: Node, index) -> Node:
    """Вибирає рядки за масивом індексів."""
    idx = np.asarray(index, dtype=np.intp)

    def grad_fn(g):
        full = np.zeros_like(x.value)
        np.add.at(full, idx, g)
        return (full,)

    return x.tape.record("rows", x.value[idx], (x,), grad_fn)


def cols(x: Node, index) -> Node:
    """Вибирає стовпці за масивом індексів."""
    idx = np.asarray(index, dtype=np.intp)

    def grad_fn(g):
        full = np.zeros_like(x.value)
        np.add.at(full.T, idx, g.T)
        return (full,)

    return x.tape.record("cols", x.value[:, idx], (x,), grad_fn)


def sum_all(x: Node) -> Node:
    return x.tape.record(
        "sum", np.array([[x.value.sum()]]), (x,),
        lambda g: (np.full_like(x.value, g[0, 0]),),
    )


def log(x: Node) -> Node:
    if np.any(x.value <= 0):
        raise ContractError("log визначено лише для додатних значень")
    return x.tape.record("log", np.log(x.value), (x,), lambda g: (g / x.value,))


def suffix_logsumexp(x: Node) -> Node:
    """
    Зворотна кумулятивна log-sum-exp для стовпця m x 1.

    out_i = log sum_{j >= i} exp(x_j). Похідна out_i за x_j дорівнює
    exp(x_j - out_i) для j >= i і нулю інакше.
    """
    if x.shape[1] != 1:
        raise ShapeError(f"suffix_logsumexp очікує стовпець, отримано {x.shape}")
    column = x.value[:, 0]
    out = functional.suffix_logsumexp(column)

    def grad_fn(g):
        size = column.shape[0]
        upper = np.triu(np.ones((size, size), dtype=bool))
        weights = np.where(upper, np.exp(np.where(upper, column[None, :] - out[:, None], 0.0)), 0.0)
        return ((weights.T @ g[:, 0]).reshape(-1, 1),)

    return x.tape.record("suffix_logsumexp", out.reshape(-1, 1), (x,), grad_fn)


def mean_all(x: Node) -> Node:
    return scale(sum_all(x), 1.0 / x.value.size)
