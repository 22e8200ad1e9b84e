"""
Модуль вирівнювання знімків у часову мережу.

Знімки різних вікон містять різні множини вузлів. Вирівнювання будує
глобальний індекс як впорядковане об'єднання всіх вузлів, доповнює
матриці ознак нульовими рядками для відсутніх вузлів і будує для кожного
знімка нормовану матрицю суміжності однакової розмірності.
"""

from dataclasses import dataclass, replace
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from core.errors import ContractError
from core.records import NodeKind, NodeRef
from hetnet.snapshot import Snapshot
from numkit.sparse import as_sparse


@dataclass(frozen=True)
class TemporalNetwork:
    """
    Послідовність вирівняних знімків над спільним індексом вузлів.

    Атрибути:
        nodes: Глобальний індекс вузлів (впорядковане об'єднання)
        windows: Номери вікон знімків у хронологічному порядку
        adjacency: Нормовані матриці суміжності для кожного знімка
        features: Матриці ознак, переіндексовані до глобального індексу
        influencer_ids: Ідентифікатори інфлюенсерів у порядку індексу
        influencer_rows: Рядки інфлюенсерів у глобальному індексі
    """
    nodes: Tuple[NodeRef, ...]
    windows: Tuple[int, ...]
    adjacency: Tuple[sp.csr_matrix, ...]
    features: Tuple[np.ndarray, ...]
    influencer_ids: Tuple[str, ...]
    influencer_rows: np.ndarray

    @property
    def k(self) -> int:
        return len(self.windows)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def truncate(self, n: int) -> "TemporalNetwork":
        """Залишає лише n останніх знімків, зберігаючи глобальний індекс."""
        if not 1 <= n <= self.k:
            raise ContractError(f"Довжина історії {n} поза межами [1, {self.k}]")
        return replace(
            self,
            windows=self.windows[-n:],
            adjacency=self.adjacency[-n:],
            features=self.features[-n:],
        )

    def map_features(self, fn: Callable[[np.ndarray], np.ndarray]) -> "TemporalNetwork":
        return replace(self, features=tuple(fn(x) for x in self.features))

    def kinds(self) -> Tuple[NodeKind, ...]:
        return tuple(sorted({node.kind for node in self.nodes}, key=lambda kind: kind.index))


def normalize_adjacency(snapshot: Snapshot, n_global: int,
                        index_map: Mapping[NodeRef, int]) -> sp.csr_matrix:
    """
    Будує симетрично нормовану матрицю суміжності з петлями.

    Бінарна матриця A містить одиницю для кожного ребра знімка в обох
    напрямках. До кожного глобального вузла, включно з відсутніми у
    знімку, додається петля, після чого обчислюється
    D^{-1/2} (A + I) D^{-1/2}, де D - діагональ степенів A + I.

    Args:
        snapshot: Знімок, ребра якого переносяться до глобального індексу
        n_global: Розмір глобального індексу
        index_map: Відображення вузлів знімка на глобальні індекси

    Returns:
        Симетрична розріджена матриця n_global x n_global зі значеннями в (0, 1]
    """
    local_to_global = np.array([index_map[node] for node in snapshot.nodes], dtype=np.int64)
    if local_to_global.size and (local_to_global.min() < 0 or local_to_global.max() >= n_global):
        raise ContractError("Відображення вузлів виходить за межі глобального індексу")
    if np.unique(local_to_global).size != local_to_global.size:
        raise ContractError("Відображення вузлів не є ін'єктивним")

    sources = local_to_global[[edge.source for edge in snapshot.edges]] \
        if snapshot.edges else np.zeros(0, dtype=np.int64)
    targets = local_to_global[[edge.target for edge in snapshot.edges]] \
        if snapshot.edges else np.zeros(0, dtype=np.int64)
    loops = np.arange(n_global)
    rows = np.concatenate([sources, targets, loops])
    cols = np.concatenate([targets, sources, loops])

    binary = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n_global, n_global)).tocsr()
    binary.sum_duplicates()
    binary.data[:] = 1.0
    degree = np.asarray(binary.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(degree)

    normalized = binary.tocoo()
    values = inv_sqrt[normalized.row] * inv_sqrt[normalized.col]
    return as_sparse(sp.coo_matrix((values, (normalized.row, normalized.col)),
                                   shape=(n_global, n_global)))


def align(snapshots: Sequence[Snapshot]) -> TemporalNetwork:
    """
    Вирівнює впорядковані за часом знімки до спільного індексу вузлів.

    Args:
        snapshots: Знімки в хронологічному порядку

    Returns:
        Часова мережа з нормованими матрицями суміжності та ознаками

    Raises:
        ContractError: Якщо список знімків порожній або не впорядкований
    """
    if not snapshots:
        raise ContractError("Для вирівнювання потрібен хоча б один знімок")
    windows = [snapshot.window for snapshot in snapshots]
    if any(later <= earlier for earlier, later in zip(windows, windows[1:])):
        raise ContractError(f"Знімки мають бути впорядковані за часом: {windows}")

    nodes = tuple(sorted({node for snapshot in snapshots for node in snapshot.nodes}))
    index_map: Dict[NodeRef, int] = {node: i for i, node in enumerate(nodes)}
    width = snapshots[0].features.shape[1]

    adjacency, features = [], []
    for snapshot in snapshots:
        rows = [index_map[node] for node in snapshot.nodes]
        x = np.zeros((len(nodes), width))
        x[rows] = snapshot.features
        features.append(x)
        adjacency.append(normalize_adjacency(snapshot, len(nodes), index_map))

    influencer_rows = np.array(
        [i for i, node in enumerate(nodes) if node.kind is NodeKind.INFLUENCER], dtype=np.intp
    )
    return TemporalNetwork(
        nodes=nodes,
        windows=tuple(windows),
        adjacency=tuple(adjacency),
        features=tuple(features),
        influencer_ids=tuple(nodes[i].key for i in influencer_rows),
        influencer_rows=influencer_rows,
    )
