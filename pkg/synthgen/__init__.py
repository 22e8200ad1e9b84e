"""
Пакет генерації синтетичних світів із закладеною динамікою залученості.
"""

from config import WorldConfig
from synthgen.world import (
    World,
    generate_world,
    load_world,
    planted_ideal_ranking,
    save_world,
    trending_sets,
)

__all__ = [
    'WorldConfig',
    'World',
    'generate_world',
    'load_world',
    'planted_ideal_ranking',
    'save_world',
    'trending_sets',
]
