"""
Пакет експериментів: протокол вікон, побудова мереж і підкоманди.
"""

from experiments.commands import (
    COMMAND_HANDLERS,
    cmd_ablate,
    cmd_eval,
    cmd_generate,
    cmd_gradcheck,
    cmd_sweep,
    cmd_train,
)
from experiments.pipeline import (
    Dataset,
    Prepared,
    build_network,
    dataset_from_world,
    load_dataset,
    prepare,
    protocol,
    rebin,
)

__all__ = [
    'COMMAND_HANDLERS',
    'cmd_ablate',
    'cmd_eval',
    'cmd_generate',
    'cmd_gradcheck',
    'cmd_sweep',
    'cmd_train',
    'Dataset',
    'Prepared',
    'build_network',
    'dataset_from_world',
    'load_dataset',
    'prepare',
    'protocol',
    'rebin',
]
