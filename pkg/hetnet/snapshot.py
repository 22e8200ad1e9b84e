"""
Модуль побудови та проріджування знімків гетерогенної мережі.

Знімок описує одне часове вікно: вузли чотирьох типів, неорієнтовані
ребра між інфлюенсерами та сутностями, які вони використовують, і
матрицю ознак вузлів. Ребро з'єднує інфлюенсера з хештегом, згаданим
користувачем або об'єктом зображення, якщо хоча б одна публікація
інфлюенсера у вікні містить цю сутність.
"""

from dataclasses import dataclass, replace
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ContractError, IngestionError
from core.records import NodeKind, NodeRef, PostRecord, ProfileRecord
from featurizer.features import featurize_snapshot
from featurizer.layout import DEFAULT_LAYOUT, FeatureLayout


@dataclass(frozen=True)
class Edge:
    """
    Неорієнтоване ребро знімка, збережене один раз із source < target.

    Атрибути:
        source: Індекс вузла-інфлюенсера у списку вузлів знімка
        target: Індекс допоміжного вузла
        count: Кількість публікацій інфлюенсера, що містять сутність
        frequency: Частка сутності серед усіх входжень сутностей у
                   публікаціях інфлюенсера за вікно
    """
    source: int
    target: int
    count: int
    frequency: float


@dataclass(frozen=True)
class Snapshot:
    """
    Гетерогенна мережа одного часового вікна G_t.

    Атрибути:
        window: Номер часового вікна t
        nodes: Впорядкований список вузлів (інфлюенсери йдуть першими)
        edges: Ребра з лічильниками та нормованими частотами
        features: Матриця ознак X_t розміру N x D
        posts: Публікації вікна, з яких побудовано знімок
    """
    window: int
    nodes: Tuple[NodeRef, ...]
    edges: Tuple[Edge, ...]
    features: np.ndarray
    posts: Tuple[PostRecord, ...] = ()

    @property
    def size(self) -> int:
        return len(self.nodes)

    def influencer_rows(self):
        return [i for i, node in enumerate(self.nodes) if node.kind is NodeKind.INFLUENCER]


def edge_degrees(n_nodes: int, edges: Sequence[Edge]) -> np.ndarray:
    """Степінь кожного вузла за списком ребер."""
    degree = np.zeros(n_nodes, dtype=np.int64)
    for edge in edges:
        degree[edge.source] += 1
        degree[edge.target] += 1
    return degree


def _profile_map(profiles: Union[Mapping[str, ProfileRecord], Iterable[ProfileRecord]]):
    """Словник профілів за ідентифікатором."""
    if isinstance(profiles, Mapping):
        return dict(profiles)
    return {profile.influencer_id: profile for profile in profiles}


def build_snapshot(posts: Sequence[PostRecord],
                   profiles: Union[Mapping[str, ProfileRecord], Iterable[ProfileRecord]],
                   window: Optional[int] = None,
                   layout: FeatureLayout = DEFAULT_LAYOUT) -> Snapshot:
    """
    Будує знімок гетерогенної мережі з публікацій одного вікна.

    Кожен інфлюенсер із профілів отримує вузол, навіть якщо у вікні він не
    публікувався (такий вузол ізольований). Кожна різна сутність вікна
    отримує власний вузол. Лічильник ребра дорівнює кількості публікацій
    інфлюенсера, що містять сутність, а нормована частота дорівнює
    лічильнику, поділеному на загальну кількість входжень сутностей у
    публікаціях цього інфлюенсера за вікно.

    Args:
        posts: Публікації вікна у довільному порядку
        profiles: Профілі інфлюенсерів
        window: Номер вікна; якщо не задано, визначається з публікацій
        layout: Розкладка вектора ознак

    Returns:
        Знімок з вузлами, ребрами та матрицею ознак

    Raises:
        IngestionError: Якщо публікація посилається на невідомого інфлюенсера
        ContractError: Якщо вікно не можна визначити або публікації
                       належать різним вікнам
    """
    profile_by_id = _profile_map(profiles)
    if window is None:
        windows = {post.window_index for post in posts}
        if len(windows) != 1:
            raise ContractError(
                f"Неможливо визначити вікно знімка з публікацій: {sorted(windows)}"
            )
        window = windows.pop()

    entity_counts: Dict[str, Dict[NodeRef, int]] = {}
    entities = set()
    for post in posts:
        if post.influencer_id not in profile_by_id:
            raise IngestionError(
                f"Публікація посилається на невідомого інфлюенсера {post.influencer_id}"
            )
        if post.window_index != window:
            raise ContractError(
                f"Публікація інфлюенсера {post.influencer_id} належить вікну "
                f"{post.window_index}, а не {window}"
            )
        counts = entity_counts.setdefault(post.influencer_id, {})
        for ref in post.entities():
            counts[ref] = counts.get(ref, 0) + 1
            entities.add(ref)

    nodes = tuple(sorted(
        [NodeRef(NodeKind.INFLUENCER, key) for key in profile_by_id] + list(entities)
    ))
    index = {node: i for i, node in enumerate(nodes)}

    edges = []
    for influencer_id, counts in entity_counts.items():
        total = sum(counts.values())
        source = index[NodeRef(NodeKind.INFLUENCER, influencer_id)]
        for ref, count in counts.items():
            edges.append(Edge(source, index[ref], count, count / total))
    edges.sort(key=lambda edge: (edge.source, edge.target))

    snapshot = Snapshot(
        window=window, nodes=nodes, edges=tuple(edges),
        features=np.zeros((len(nodes), layout.width)), posts=tuple(posts),
    )
    return replace(snapshot, features=featurize_snapshot(snapshot, profile_by_id, layout))


def _keep_nodes(snapshot: Snapshot, keep: np.ndarray, edges: Iterable[Edge]) -> Snapshot:
    """Залишає вузли за маскою keep і переіндексує ребра та рядки ознак."""
    new_index = -np.ones(len(snapshot.nodes), dtype=np.int64)
    new_index[keep] = np.arange(int(keep.sum()))
    remapped = tuple(
        Edge(int(new_index[e.source]), int(new_index[e.target]), e.count, e.frequency)
        for e in edges if keep[e.source] and keep[e.target]
    )
    return replace(
        snapshot,
        nodes=tuple(node for node, kept in zip(snapshot.nodes, keep) if kept),
        edges=remapped,
        features=snapshot.features[keep],
    )


def prune(snapshot: Snapshot, min_freq: float = 0.01) -> Snapshot:
    """
    Проріджує знімок за один прохід.

    Спочатку відкидаються ребра з нормованою частотою, меншою за min_freq,
    потім допоміжні вузли, чий залишковий степінь не перевищує одиниці.
    Вузли інфлюенсерів ніколи не видаляються; рядки матриці ознак
    переіндексуються разом із вузлами.

    Args:
        snapshot: Знімок після побудови
        min_freq: Мінімальна нормована частота ребра

    Returns:
        Проріджений знімок
    """
    edges = [edge for edge in snapshot.edges if edge.frequency >= min_freq]
    degree = edge_degrees(len(snapshot.nodes), edges)
    auxiliary = np.array([node.kind.is_auxiliary for node in snapshot.nodes], dtype=bool)
    keep = ~(auxiliary & (degree <= 1))
    return _keep_nodes(snapshot, keep, edges)


def drop_kind(snapshot: Snapshot, kind: NodeKind) -> Snapshot:
    """Видаляє всі вузли одного допоміжного типу разом з їхніми ребрами."""
    if not kind.is_auxiliary:
        raise ContractError("Вузли інфлюенсерів не можна видаляти зі знімка")
    keep = np.array([node.kind is not kind for node in snapshot.nodes], dtype=bool)
    return _keep_nodes(snapshot, keep, snapshot.edges)
