"""
Пакет чисельної основи конвеєра.

Містить розріджені матриці, стрічку зворотного автоматичного
диференціювання, стабільний softmax, оптимізатор Adam та перевірку
градієнтів скінченними різницями.
"""

from numkit import tape as ops
from numkit.functional import softmax
from numkit.gradcheck import finite_diff_check, finite_diff_errors, value_and_grad
from numkit.init import glorot_bound, glorot_uniform
from numkit.optim import AdamState, adam_step
from numkit.sparse import SparseMatrix, as_sparse, spmm
from numkit.tape import Node, Tape, backward

__all__ = [
    'ops',
    'softmax',
    'finite_diff_check',
    'finite_diff_errors',
    'value_and_grad',
    'glorot_bound',
    'glorot_uniform',
    'AdamState',
    'adam_step',
    'SparseMatrix',
    'as_sparse',
    'spmm',
    'Node',
    'Tape',
    'backward',
]
