"""
Пакет основних компонентів системи.

Містить ієрархію винятків із кодами завершення, записи публікацій і
профілів, типи вузлів гетерогенної мережі та монітор виконання.
"""

from core.errors import (
    ConfigError,
    ContractError,
    DataError,
    InfluencerRankError,
    IngestionError,
    NumericalError,
    ShapeError,
)
from core.monitor import SILENT, RunMonitor
from core.records import (
    CaptionStats,
    ImageRecord,
    NodeKind,
    NodeRef,
    PostRecord,
    ProfileRecord,
)

__all__ = [
    'ConfigError',
    'ContractError',
    'DataError',
    'InfluencerRankError',
    'IngestionError',
    'NumericalError',
    'ShapeError',
    'SILENT',
    'RunMonitor',
    'CaptionStats',
    'ImageRecord',
    'NodeKind',
    'NodeRef',
    'PostRecord',
    'ProfileRecord',
]
