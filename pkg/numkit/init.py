"""Ініціалізація ваг."""

import numpy as np


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Рівномірна ініціалізація Глоро в межах ±sqrt(6 / (fan_in + fan_out))."""
    bound = glorot_bound(fan_in, fan_out)
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))
