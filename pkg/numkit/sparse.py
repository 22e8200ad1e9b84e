"""
Модуль розріджених матриць у стисненому рядковому форматі.

Розріджена матриця представлена типом scipy.sparse.csr_matrix у
канонічному вигляді: без дублікатів, із відсортованими індексами стовпців
у кожному рядку та скінченними значеннями 64-бітної точності.
"""

import numpy as np
import scipy.sparse as sp

from core.errors import ContractError, ShapeError


SparseMatrix = sp.csr_matrix


def as_sparse(matrix) -> sp.csr_matrix:
    """
    Перетворює матрицю на канонічну розріджену матрицю CSR.

    Args:
        matrix: Щільний масив або будь-яка розріджена матриця scipy

    Returns:
        Матриця CSR з відсортованими індексами та сумованими дублікатами

    Raises:
        ContractError: Якщо матриця містить нескінченні значення
    """
    csr = sp.csr_matrix(matrix, dtype=np.float64)
    csr.sum_duplicates()
    csr.sort_indices()
    if not np.all(np.isfinite(csr.data)):
        raise ContractError("Розріджена матриця містить нескінченні значення")
    return csr


def spmm(a: sp.csr_matrix, x) -> np.ndarray:
    """
    Множить розріджену матрицю на щільну.

    Args:
        a: Розріджена матриця розміру N x M
        x: Щільна матриця розміру M x d

    Returns:
        Щільна матриця розміру N x d

    Raises:
        ShapeError: Якщо кількість стовпців a не дорівнює кількості рядків x
    """
    dense = np.asarray(x, dtype=np.float64)
    if dense.ndim != 2 or a.shape[1] != dense.shape[0]:
        raise ShapeError(
            f"spmm: розмірності несумісні {a.shape} та {dense.shape}"
        )
    return np.asarray(a @ dense)
