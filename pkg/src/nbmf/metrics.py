"""Comparison statistics: sparsity, residual ratios, storage accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ValidationError, as_matrix, frobenius_residual


def sparsity(M, zero_tol: float = 0.0) -> float:
    """Fraction of entries with |entry| <= zero_tol."""
    if zero_tol < 0:
        raise ValidationError("zero_tol must be >= 0")
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 1.0
    return float(np.count_nonzero(np.abs(M) <= zero_tol) / M.size)


def default_zero_tol(M) -> float:
    """Threshold used when reporting sparsity of real-valued factors:
    1e-6 of the largest magnitude."""
    M = np.asarray(M, dtype=np.float64)
    return 1e-6 * float(np.abs(M).max()) if M.size else 0.0


def error_ratio(V, W_a, H_a, W_b, H_b) -> float:
    """residual(a) / residual(b); 1 when both residuals vanish, infinity
    when only b's does."""
    res_a = frobenius_residual(V, W_a, H_a)
    res_b = frobenius_residual(V, W_b, H_b)
    if res_b == 0.0:
        return 1.0 if res_a == 0.0 else math.inf
    return res_a / res_b


@dataclass(frozen=True)
class StorageReport:
    h_entries: int
    w_entries: int
    binary_h_bits: int        # 1 bit per coefficient
    float_h_bits: int         # float_bits per coefficient
    w_bits: int
    ratio: float              # float_h_bits / binary_h_bits


def storage_report(W, H, float_bits: int = 64) -> StorageReport:
    """Bit cost of storing H as single bits versus floats, plus W."""
    if float_bits < 1:
        raise ValidationError("float_bits must be >= 1")
    W = as_matrix(W, "W")
    H = as_matrix(H, "H")
    return StorageReport(
        h_entries=H.size,
        w_entries=W.size,
        binary_h_bits=H.size,
        float_h_bits=H.size * float_bits,
        w_bits=W.size * float_bits,
        ratio=float(float_bits),
    )
