"""
Модуль шарів моделі, записаних на стрічку автоматичного диференціювання.

Кожен шар приймає вузли стрічки та словник вузлів-параметрів. Відкидання
(dropout) застосовується лише тоді, коли передано генератор випадкових
чисел, тобто в режимі навчання.
"""

from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from core.errors import ContractError, ShapeError
from numkit import tape as ops
from numkit.tape import Node


ParamNodes = Mapping[str, Node]


def dropout(x: Node, p: float, rng: Optional[np.random.Generator]) -> Node:
    """Інвертоване відкидання: збережені елементи множаться на 1 / (1 - p)."""
    if rng is None or p <= 0.0:
        return x
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return ops.mul(x, x.tape.constant(mask))


def _gcn_layers(params: ParamNodes) -> List[Node]:
    """Ваги шарів GCN у порядку номерів шарів."""
    names = sorted((name for name in params if name.startswith("gcn_")),
                   key=lambda name: int(name.split("_")[1]))
    return [params[name] for name in names]


def project(x: Node, params: ParamNodes) -> Node:
    """Вхідна проєкція ознак вузлів у простір вкладень: X W_in."""
    w_in = params["W_in"]
    if x.shape[1] != w_in.shape[0]:
        raise ShapeError(f"Ширина ознак {x.shape[1]} не відповідає W_in {w_in.shape}")
    return x @ w_in


def gcn_forward(x: Node, adjacency: sp.csr_matrix, params: ParamNodes,
                rng: Optional[np.random.Generator] = None, p: float = 0.0) -> Node:
    """
    Кодує один знімок стеком шарів GCN.

    F^(0) = X W_in, F^(i) = ReLU(Â F^(i-1) W^(i-1)); результат R_t є
    конкатенацією виходів усіх шарів за стовпцями.

    Args:
        x: Матриця ознак N x D
        adjacency: Нормована матриця суміжності N x N
        params: Вузли параметрів W_in та gcn_0..gcn_{e-1}
        rng: Генератор для відкидання (лише в режимі навчання)
        p: Ймовірність відкидання виходу кожного шару

    Returns:
        Вузол R_t розміру N x (e·r)

    Raises:
        ShapeError: Якщо розмірності ознак, суміжності чи ваг несумісні
    """
    if adjacency.shape != (x.shape[0], x.shape[0]):
        raise ShapeError(f"Суміжність {adjacency.shape} не відповідає {x.shape[0]} вузлам")
    layers = _gcn_layers(params)
    if not layers:
        raise ContractError("Модель не містить шарів GCN")
    hidden = project(x, params)
    outputs = []
    for weight in layers:
        hidden = ops.relu(ops.spmm(adjacency, hidden) @ weight)
        hidden = dropout(hidden, p, rng)
        outputs.append(hidden)
    return ops.concat(outputs)


def gru_step(h_prev: Node, r_t: Node, params: ParamNodes) -> Node:
    """
    Один крок GRU над рядками інфлюенсерів.

    z = sigmoid([H, R] W_z + b_z), r = sigmoid([H, R] W_r + b_r),
    H~ = tanh([r * H, R] W_h + b_h), H' = (1 - z) H + z H~.
    """
    if h_prev.shape[0] != r_t.shape[0]:
        raise ShapeError(f"Стан {h_prev.shape} та вхід {r_t.shape} мають різну кількість рядків")
    stacked = ops.concat([h_prev, r_t])
    if stacked.shape[1] != params["gru_Wz"].shape[0]:
        raise ShapeError(
            f"Ширина [H, R] {stacked.shape[1]} не відповідає gru_Wz {params['gru_Wz'].shape}"
        )
    update = ops.sigmoid(stacked @ params["gru_Wz"] + params["gru_bz"])
    reset = ops.sigmoid(stacked @ params["gru_Wr"] + params["gru_br"])
    candidate = ops.tanh(
        ops.concat([reset * h_prev, r_t]) @ params["gru_Wh"] + params["gru_bh"]
    )
    return (1.0 - update) * h_prev + update * candidate


def attention_logits(state: Node, params: ParamNodes) -> Node:
    """τ_t = tanh(H_t w_a + b_a): повнозв'язна проєкція стану h -> 1."""
    return ops.tanh(state @ params["att_w"] + params["att_b"])


def attention_weights(logits: Node) -> Node:
    """Softmax логітів n_inf x k за часовими кроками."""
    return ops.softmax(logits)


def attention_pool(states: Sequence[Node], params: ParamNodes,
                   uniform: bool = False) -> Tuple[Node, Node]:
    """
    Зважує стани GRU за часом.

    Args:
        states: Стани H_1..H_k, кожен n_inf x h
        params: Вузли параметрів уваги (не потрібні при uniform)
        uniform: Рівномірні ваги 1/k замість навченої уваги

    Returns:
        Пара (alpha n_inf x k, c n_inf x h)

    Raises:
        ContractError: Якщо список станів порожній
    """
    if not states:
        raise ContractError("Пулінг уваги потребує хоча б одного стану")
    tape = states[0].tape
    k = len(states)
    if uniform:
        alpha = tape.constant(np.full((states[0].shape[0], k), 1.0 / k))
        pooled = ops.scale(states[0], 1.0 / k)
        for state in states[1:]:
            pooled = pooled + ops.scale(state, 1.0 / k)
        return alpha, pooled

    alpha = attention_weights(ops.concat([attention_logits(state, params) for state in states]))
    pooled = ops.cols(alpha, [0]) * states[0]
    for t, state in enumerate(states[1:], start=1):
        pooled = pooled + ops.cols(alpha, [t]) * state
    return alpha, pooled


def score(c: Node, params: ParamNodes, rng: Optional[np.random.Generator] = None,
          p: float = 0.0) -> Node:
    """
    ŷ = F_c(ReLU(F_b c)); повертає стовпець n_inf x 1.

    F_c без зміщення: спискова функція втрат інваріантна до зсуву всіх оцінок.
    """
    if c.shape[1] != params["mlp_Wb"].shape[0]:
        raise ShapeError(f"Вкладення {c.shape} не відповідає mlp_Wb {params['mlp_Wb'].shape}")
    hidden = ops.relu(c @ params["mlp_Wb"] + params["mlp_bb"])
    hidden = dropout(hidden, p, rng)
    return hidden @ params["mlp_Wc"]
