"""
Пакет моделі ранжування інфлюенсерів.

Містить параметри та їх ініціалізацію, шари GCN, GRU, уваги й оцінювача,
прямий прохід і формат контрольних точок.
"""

from config import ModelConfig
from model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from model.influencer_rank import bind, forward, predict
from model.layers import attention_pool, gcn_forward, gru_step, score
from model.params import ModelVariant, Params, init_params, param_shapes

__all__ = [
    'ModelConfig',
    'Checkpoint',
    'load_checkpoint',
    'save_checkpoint',
    'bind',
    'forward',
    'predict',
    'attention_pool',
    'gcn_forward',
    'gru_step',
    'score',
    'ModelVariant',
    'Params',
    'init_params',
    'param_shapes',
]
