# backend/workbench/finite_field.py
"""F_p 위 dense 선형대수 (numpy int64, 결정적 pivoting)"""

from typing import List, Optional, Tuple
import logging

import numpy as np

from .shared.config import settings
from .shared.error_handler import DimensionMismatch, DomainError, NotInvertible

logger = logging.getLogger(__name__)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p > settings.max_prime:
        raise DomainError(f"prime {p} exceeds the supported maximum {settings.max_prime}")
    return p


def as_field_array(M, p: int) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) % p


def mod_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise NotInvertible(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    return (A @ B) % p


def row_echelon(M, p: int, n_pivot_cols: Optional[int] = None,
                reduced: bool = False) -> Tuple[np.ndarray, List[int]]:
    """F_p 위 행 사다리꼴.

    Args:
        M: m x n 행렬
        p: 소수
        n_pivot_cols: 앞쪽 이 개수의 열에서만 pivot 탐색 (augmented 행렬용)
        reduced: pivot 위쪽도 소거하고 pivot 을 1 로 정규화

    Returns:
        (R, pivot_cols)
    """
    R = as_field_array(M, p).copy()
    m, n = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = n

    pivot_cols: List[int] = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        if pivot_row == m:
            break
        # 열 순서대로 첫 nonzero
        nonzero = np.nonzero(R[pivot_row:, col])[0]
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]

        R[pivot_row] = (R[pivot_row] * mod_inverse(int(R[pivot_row, col]), p)) % p
        rows = range(m) if reduced else range(pivot_row + 1, m)
        for row in rows:
            if row != pivot_row and R[row, col]:
                R[row] = (R[row] - R[row, col] * R[pivot_row]) % p

        pivot_cols.append(col)
        pivot_row += 1

    return R, pivot_cols


def rank(M, p: int) -> int:
    _, pivot_cols = row_echelon(M, p)
    return len(pivot_cols)


def inverse(M, p: int) -> np.ndarray:
    """[M | I] 를 reduced echelon 으로"""
    A = as_field_array(M, p)
    n, cols = A.shape
    if n != cols:
        raise DimensionMismatch(f"only square matrices are invertible, got {A.shape}")
    R, pivot_cols = row_echelon(np.hstack([A, identity(n)]), p, n_pivot_cols=n, reduced=True)
    if len(pivot_cols) < n:
        raise NotInvertible(f"matrix has rank {len(pivot_cols)} < {n} over F_{p}")
    return R[:, n:]
