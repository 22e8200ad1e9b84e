"""
Пакет побудови часових гетерогенних мереж.

Знімок кожного часового вікна будується з публікацій, проріджується і
вирівнюється разом з іншими знімками до спільного індексу вузлів.
"""

from hetnet.ingest import read_posts, read_profiles, write_posts, write_profiles
from hetnet.snapshot import Edge, Snapshot, build_snapshot, drop_kind, prune
from hetnet.temporal import TemporalNetwork, align, normalize_adjacency

__all__ = [
    'read_posts',
    'read_profiles',
    'write_posts',
    'write_profiles',
    'Edge',
    'Snapshot',
    'build_snapshot',
    'drop_kind',
    'prune',
    'TemporalNetwork',
    'align',
    'normalize_adjacency',
]
