"""
Пакет метрик: залученість, рівні релевантності, NDCG@K, RBP і звіти.
"""

from metrics.engagement import (
    RELEVANCE_THRESHOLDS,
    engagement_rate,
    relevance_level,
    relevance_levels,
    window_engagement,
)
from metrics.ranking import (
    STRATA,
    RankedList,
    dcg_at_k,
    evaluate_ranking,
    follower_stratum,
    followers_reference_scores,
    ndcg_at_k,
    rank_influencers,
    rbp,
    stratified_ndcg,
)
from metrics.report import ReportWriter, read_report

__all__ = [
    'RELEVANCE_THRESHOLDS',
    'engagement_rate',
    'relevance_level',
    'relevance_levels',
    'window_engagement',
    'STRATA',
    'RankedList',
    'dcg_at_k',
    'evaluate_ranking',
    'follower_stratum',
    'followers_reference_scores',
    'ndcg_at_k',
    'rank_influencers',
    'rbp',
    'stratified_ndcg',
    'ReportWriter',
    'read_report',
]
