"""
Модуль прямого проходу моделі ранжування інфлюенсерів.

Кожен знімок часової мережі кодується шарами GCN, рядки інфлюенсерів
подаються в GRU крок за кроком від нульового стану, стани зважуються
увагою і перетворюються оцінювачем на скалярну оцінку кожного інфлюенсера.
"""

from typing import Dict, Mapping, Optional

import numpy as np

from core.errors import ContractError
from hetnet.temporal import TemporalNetwork
from model.layers import ParamNodes, attention_pool, dropout, gcn_forward, gru_step, project, score
from model.params import ModelVariant
from numkit import tape as ops
from numkit.tape import Node, Tape


MODES = ("train", "eval")


def encode_snapshot(x: Node, adjacency, params: ParamNodes, variant: ModelVariant,
                    rng: Optional[np.random.Generator], p: float) -> Node:
    if variant is ModelVariant.NO_GCN:
        return dropout(project(x, params), p, rng)
    return gcn_forward(x, adjacency, params, rng, p)


def forward(net: TemporalNetwork, params: ParamNodes, mode: str = "eval",
            rng: Optional[np.random.Generator] = None,
            variant: ModelVariant = ModelVariant.FULL, p: float = 0.0) -> Node:
    """
    Обчислює оцінки всіх інфлюенсерів мережі.

    Args:
        net: Вирівняна часова мережа з k знімків
        params: Вузли параметрів на одній стрічці
        mode: "train" (з відкиданням) або "eval"
        rng: Генератор відкидання; обов'язковий у режимі навчання
        variant: Варіант архітектури
        p: Ймовірність відкидання

    Returns:
        Вузол n_inf x 1 з оцінками в порядку net.influencer_ids

    Raises:
        ContractError: Якщо мережа порожня, режим невідомий або в режимі
                       навчання не передано генератор
    """
    if mode not in MODES:
        raise ContractError(f"Невідомий режим: {mode}. Доступні варіанти: {', '.join(MODES)}")
    if net.k == 0 or len(net.influencer_rows) == 0:
        raise ContractError("Мережа не містить знімків або інфлюенсерів")
    if mode == "train" and rng is None:
        raise ContractError("Режим навчання потребує генератора відкидання")
    if mode == "eval":
        rng = None

    tape = next(iter(params.values())).tape
    if variant is ModelVariant.NO_RNN:
        net = net.truncate(1)

    hidden = params["gru_bz"].shape[1]
    state = tape.constant(np.zeros((len(net.influencer_rows), hidden)))
    states = []
    for x, adjacency in zip(net.features, net.adjacency):
        encoded = encode_snapshot(tape.constant(x), adjacency, params, variant, rng, p)
        state = gru_step(state, ops.rows(encoded, net.influencer_rows), params)
        states.append(state)

    _, pooled = attention_pool(states, params, uniform=variant is ModelVariant.NO_ATTENTION)
    return score(pooled, params, rng, p)


def bind(tape: Tape, params: Mapping[str, np.ndarray], trainable: bool = True) -> Dict[str, Node]:
    """Реєструє параметри на стрічці у впорядкованому за назвою порядку."""
    if trainable:
        return {name: tape.parameter(name, value) for name, value in sorted(params.items())}
    return {name: tape.constant(value) for name, value in sorted(params.items())}


def predict(net: TemporalNetwork, params: Mapping[str, np.ndarray],
            variant: ModelVariant = ModelVariant.FULL) -> np.ndarray:
    """Оцінки в режимі оцінювання як одновимірний масив."""
    tape = Tape()
    scores = forward(net, bind(tape, params, trainable=False), "eval", None, variant)
    return scores.value[:, 0].copy()
