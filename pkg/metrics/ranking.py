"""
Модуль метрик якості ранжування.

NDCG@K використовує експоненційний виграш (2^rel - 1) / log2(rank + 1) і
нормується ідеальним DCG@K; за нульового ідеального DCG метрика дорівнює
одиниці. RBP підсумовує сирі значення залученості як виграші з
геометричним загасанням p^(rank - 1).
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError
from metrics.engagement import relevance_levels


STRATA: Tuple[str, ...] = ("micro", "mid", "macro")
MICRO_LIMIT = 20000
MACRO_LIMIT = 100000


@dataclass(frozen=True)
class RankedList:
    """
    Ранжований список інфлюенсерів.

    Атрибути:
        ids: Ідентифікатори в порядку спадання оцінки
        scores: Передбачені оцінки (не зростають)
        rates: Справжня залученість кожного інфлюенсера
        relevance: Рівні релевантності 0..5
    """
    ids: Tuple[str, ...]
    scores: np.ndarray
    rates: np.ndarray
    relevance: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    def subset(self, keep: Sequence[str]) -> "RankedList":
        """Залишає підмножину інфлюенсерів, зберігаючи їх взаємний порядок."""
        wanted = set(keep)
        mask = np.array([i in wanted for i in self.ids], dtype=bool)
        return RankedList(
            tuple(i for i, kept in zip(self.ids, mask) if kept),
            self.scores[mask], self.rates[mask], self.relevance[mask],
        )


def rank_influencers(ids: Sequence[str], scores: Sequence[float],
                     rates: Mapping[str, float]) -> RankedList:
    """
    Сортує інфлюенсерів за спаданням оцінки.

    Рівні оцінки впорядковуються за зростанням ідентифікатора.

    Raises:
        ContractError: Якщо довжини не збігаються або бракує залученості
    """
    if len(ids) != len(scores):
        raise ContractError(f"Кількість ідентифікаторів {len(ids)} і оцінок {len(scores)} різна")
    missing = [i for i in ids if i not in rates]
    if missing:
        raise ContractError(f"Немає залученості для інфлюенсерів: {', '.join(missing[:5])}")
    values = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ContractError("Оцінки містять нескінченні значення")
    order = sorted(range(len(ids)), key=lambda i: (-values[i], ids[i]))
    ordered_ids = tuple(ids[i] for i in order)
    ordered_rates = np.array([rates[i] for i in ordered_ids], dtype=np.float64)
    return RankedList(ordered_ids, values[order], ordered_rates, relevance_levels(ordered_rates))


def dcg_at_k(relevance: Sequence[int], k: int) -> float:
    gains = np.power(2.0, np.asarray(relevance, dtype=np.float64)[:k]) - 1.0
    discounts = np.log2(np.arange(2, gains.size + 2))
    return float(np.sum(gains / discounts))


def ndcg_at_k(relevance: Sequence[int], ideal: Sequence[int], k: int) -> float:
    """
    Обчислює NDCG@K.

    Args:
        relevance: Рівні релевантності в порядку ранжування
        ideal: Рівні релевантності в ідеальному порядку (буде відсортовано)
        k: Відсічка

    Returns:
        Значення в [0, 1]; за нульового ідеального DCG повертає 1

    Raises:
        ContractError: Якщо k < 1
    """
    if k < 1:
        raise ContractError(f"Відсічка NDCG повинна бути додатною: {k}")
    best = dcg_at_k(sorted(ideal, reverse=True), k)
    if best == 0.0:
        return 1.0
    return dcg_at_k(relevance, k) / best


def rbp(gains: Sequence[float], p: float = 0.95, depth: Optional[int] = None) -> float:
    """
    Обчислює RBP: (1 - p) · Σ gain_i · p^(i - 1).

    Raises:
        ContractError: Якщо p поза межами (0, 1)
    """
    if not 0.0 < p < 1.0:
        raise ContractError(f"Параметр RBP повинен лежати в (0, 1): {p}")
    values = np.asarray(gains, dtype=np.float64)
    if depth is not None:
        values = values[:depth]
    weights = np.power(p, np.arange(values.size))
    return float((1.0 - p) * np.sum(values * weights))


def evaluate_ranking(ranked: RankedList, ks: Sequence[int] = (1, 10, 50, 100, 200),
                     p: float = 0.95) -> Dict[str, float]:
    """Повертає словник {"ndcg@K": ..., "rbp": ...} для ранжованого списку."""
    result = {
        f"ndcg@{k}": ndcg_at_k(ranked.relevance, ranked.relevance, k) for k in ks
    }
    result["rbp"] = rbp(ranked.rates, p)
    return result


def follower_stratum(followers: float) -> str:
    """micro: менше 20 000 підписників, mid: до 100 000 включно, macro: більше."""
    if followers < MICRO_LIMIT:
        return "micro"
    if followers <= MACRO_LIMIT:
        return "mid"
    return "macro"


def stratified_ndcg(ranked: RankedList, followers: Mapping[str, float],
                    ks: Sequence[int] = (1, 10, 50, 100, 200), p: float = 0.95,
                    sample_size: int = 0, repeats: int = 1,
                    rng: Optional[np.random.Generator] = None) -> Dict[str, Dict[str, float]]:
    """
    Обчислює метрики окремо для кожної страти за кількістю підписників.

    Якщо sample_size > 0, із кожної страти repeats разів вибирається
    випадкова підмножина такого розміру (або вся страта, якщо вона менша),
    і метрики усереднюються за повторами.

    Returns:
        Словник {страта: {метрика: значення, "count": кількість}}; порожні
        страти пропускаються
    """
    members: Dict[str, list] = {name: [] for name in STRATA}
    for influencer_id in ranked.ids:
        members[follower_stratum(followers[influencer_id])].append(influencer_id)

    rng = rng if rng is not None else np.random.default_rng(0)
    result = {}
    for name in STRATA:
        group = members[name]
        if not group:
            continue
        if sample_size <= 0 or sample_size >= len(group):
            metrics = evaluate_ranking(ranked.subset(group), ks, p)
        else:
            runs = []
            for _ in range(repeats):
                chosen = rng.choice(len(group), size=sample_size, replace=False)
                runs.append(evaluate_ranking(ranked.subset([group[i] for i in chosen]), ks, p))
            metrics = {key: float(np.mean([run[key] for run in runs])) for key in runs[0]}
        metrics["count"] = float(len(group))
        result[name] = metrics
    return result


def followers_reference_scores(ids: Sequence[str], followers: Mapping[str, float]) -> np.ndarray:
    """Оцінки еталонного ранжувальника: логарифм кількості підписників."""
    return np.log1p(np.array([followers[i] for i in ids], dtype=np.float64))
