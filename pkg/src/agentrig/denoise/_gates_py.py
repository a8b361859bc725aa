"""Pure-Python gate kernels; the reference the compiled extension must match.

All kernels take a list of confidence values and return selected indices.
Ties resolve to the lowest index so results are reproducible everywhere.
"""

from __future__ import annotations


def kernel_threshold(values: list[float], tau: float) -> list[int]:
    """Indices with value >= tau; if none, the single lowest-index argmax."""
    selected = [i for i, v in enumerate(values) if v >= tau]
    if selected:
        return selected
    best = 0
    best_value = values[0]
    for i in range(1, len(values)):
        if values[i] > best_value:
            best = i
            best_value = values[i]
    return [best]


def kernel_factor(values: list[float], gamma: float) -> list[int]:
    """Top-K indices for the largest K with (K+1)*(1 - k-th value) < gamma.

    Values are ranked descending, ties by lowest index. K = 0 falls back to
    the single argmax. The product is non-decreasing in K along the ranking,
    so the scan stops at the first failure.
    """
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    k = 0
    while k < len(order):
        if (k + 2) * (1.0 - values[order[k]]) < gamma:
            k += 1
        else:
            break
    if k == 0:
        return [order[0]]
    return order[:k]


def kernel_smallest(values: list[float], r: int) -> list[int]:
    """Indices of the r smallest values, ties by lowest index."""
    if r == 0:
        return []
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    return order[:r]
