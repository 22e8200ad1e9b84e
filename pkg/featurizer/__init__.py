"""
Пакет обчислення ознак вузлів.

Містить розкладку 67-вимірного вектора ознак, характеристики сприйняття
зображень та складання матриці ознак знімка.
"""

from featurizer.features import (
    Aggregate,
    aggregate,
    featurize_influencer,
    featurize_snapshot,
    scale_columns,
    zero_category,
)
from featurizer.image import ImageStats, image_stats, resolve_image
from featurizer.layout import DEFAULT_LAYOUT, FeatureLayout

__all__ = [
    'Aggregate',
    'aggregate',
    'featurize_influencer',
    'featurize_snapshot',
    'scale_columns',
    'zero_category',
    'ImageStats',
    'image_stats',
    'resolve_image',
    'DEFAULT_LAYOUT',
    'FeatureLayout',
]
