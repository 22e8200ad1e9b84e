"""
Пакет навчання: вибірка списків, втрати ListMLE та цикл навчання.
"""

from config import TrainConfig
from trainer.lists import LabeledList, sample_lists
from trainer.loss import ideal_order, listmle_loss, listmle_value
from trainer.trainer import (
    EpochRecord,
    TrainingHistory,
    TrainResult,
    split_validation,
    train,
)

__all__ = [
    'TrainConfig',
    'LabeledList',
    'sample_lists',
    'ideal_order',
    'listmle_loss',
    'listmle_value',
    'EpochRecord',
    'TrainingHistory',
    'TrainResult',
    'split_validation',
    'train',
]
