"""
Модуль параметрів моделі ранжування інфлюенсерів.

Параметри зберігаються як словник іменованих матриць numpy. Кожна вага
ініціалізується рівномірно за Глоро з власного підпотоку генератора,
визначеного зерном і назвою параметра, тому спільні параметри різних
варіантів моделі збігаються побітово. Зміщення ініціалізуються нулями.
"""

from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from config import ModelConfig
from core.errors import ContractError
from featurizer.layout import DEFAULT_LAYOUT
from numkit.init import glorot_uniform


Params = Dict[str, np.ndarray]

GRU_GATES: Tuple[str, ...] = ("z", "r", "h")


class ModelVariant(Enum):
    """
    Варіанти архітектури для абляційних експериментів.

    Значення:
        FULL: GCN, GRU за всіма знімками, увага та оцінювач
        NO_RNN: Лише останній знімок історії
        NO_ATTENTION: Рівномірні ваги 1/k замість уваги
        NO_GCN: Ознаки оминають шари GCN (лише вхідна проєкція)
    """
    FULL = "full"
    NO_RNN = "no-rnn"
    NO_ATTENTION = "no-attention"
    NO_GCN = "no-gcn"

    @classmethod
    def parse(cls, name: str) -> "ModelVariant":
        for variant in cls:
            if variant.value == name:
                return variant
        available = ", ".join(variant.value for variant in cls)
        raise ContractError(f"Невідомий варіант моделі: {name}. Доступні варіанти: {available}")


def gcn_names(n_layers: int) -> List[str]:
    return [f"gcn_{i}" for i in range(n_layers)]


def gru_input_width(cfg: ModelConfig, variant: ModelVariant = ModelVariant.FULL) -> int:
    """Ширина входу GRU: e·r після GCN або d_embed без нього."""
    if variant is ModelVariant.NO_GCN:
        return cfg.d_embed
    return cfg.gcn_layers * cfg.gcn_hidden


def param_shapes(cfg: ModelConfig, variant: ModelVariant = ModelVariant.FULL,
                 input_width: int = DEFAULT_LAYOUT.width) -> Dict[str, Tuple[int, int]]:
    """
    Обчислює форми всіх параметрів для конфігурації та варіанта.

    Returns:
        Словник форм у фіксованому порядку: проєкція, GCN, GRU, увага, оцінювач
    """
    shapes: Dict[str, Tuple[int, int]] = {"W_in": (input_width, cfg.d_embed)}
    if variant is not ModelVariant.NO_GCN:
        width = cfg.d_embed
        for name in gcn_names(cfg.gcn_layers):
            shapes[name] = (width, cfg.gcn_hidden)
            width = cfg.gcn_hidden

    h = cfg.gru_hidden
    stacked = h + gru_input_width(cfg, variant)
    for gate in GRU_GATES:
        shapes[f"gru_W{gate}"] = (stacked, h)
        shapes[f"gru_b{gate}"] = (1, h)

    if variant is not ModelVariant.NO_ATTENTION:
        shapes["att_w"] = (h, 1)
        shapes["att_b"] = (1, 1)

    shapes["mlp_Wb"] = (h, cfg.mlp_hidden)
    shapes["mlp_bb"] = (1, cfg.mlp_hidden)
    shapes["mlp_Wc"] = (cfg.mlp_hidden, 1)
    return shapes


def is_bias(name: str) -> bool:
    return name.split("_", 1)[1].startswith("b")


def _substream(seed: int, name: str) -> np.random.Generator:
    key = [ord(ch) for ch in name]
    return np.random.default_rng([seed, *key])


def init_params(cfg: ModelConfig, variant: ModelVariant = ModelVariant.FULL,
                input_width: int = DEFAULT_LAYOUT.width) -> Params:
    """
    Ініціалізує параметри моделі.

    Args:
        cfg: Конфігурація розмірностей та зерно
        variant: Варіант архітектури, що визначає набір параметрів
        input_width: Ширина вектора ознак вузла

    Returns:
        Словник параметрів: ваги Глоро в межах ±sqrt(6 / (fan_in + fan_out)),
        нульові зміщення
    """
    params = {}
    for name, (fan_in, fan_out) in param_shapes(cfg, variant, input_width).items():
        if is_bias(name):
            params[name] = np.zeros((fan_in, fan_out))
        else:
            params[name] = glorot_uniform(_substream(cfg.seed, name), fan_in, fan_out)
    return params


def check_params(params: Params, cfg: ModelConfig, variant: ModelVariant = ModelVariant.FULL,
                 input_width: int = DEFAULT_LAYOUT.width):
    """
    Перевіряє, що параметри узгоджені з конфігурацією.

    Raises:
        ContractError: Якщо набір назв, форми чи значення некоректні
    """
    expected = param_shapes(cfg, variant, input_width)
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        raise ContractError(f"Набір параметрів не відповідає моделі: бракує {missing}, зайві {extra}")
    for name, shape in expected.items():
        if params[name].shape != shape:
            raise ContractError(f"Параметр {name}: форма {params[name].shape}, очікувалась {shape}")
        if not np.all(np.isfinite(params[name])):
            raise ContractError(f"Параметр {name} містить нескінченні значення")
